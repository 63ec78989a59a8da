#include <catch_amalgamated.hpp>

#include <set>

#include <zmoments/characters.hpp>

using namespace zmoments;
using Catch::Approx;

namespace {

// smallest d | q with chi(a) = 1 whenever a = 1 mod d and (a, q) = 1
std::uint64_t brute_conductor(const Character& chi) {
    std::uint64_t q = chi.modulus();
    for (std::uint64_t d = 1; d <= q; ++d) {
        if (q % d) continue;
        bool ok = true;
        for (std::uint64_t a = 1; a <= q && ok; a += d)
            if (std::gcd(a, q) == 1 && std::abs(chi(a) - cplx(1)) > 1e-15L) ok = false;
        if (ok) return d;
    }
    return q;
}

}  // namespace

TEST_CASE("table shape and group structure") {
    for (std::uint64_t q = 1; q <= 60; ++q) {
        CharacterTable t(q);
        REQUIRE(t.size() == euler_phi(factor(q)));
        REQUIRE(t.principal().principal());
        int principals = 0;
        std::set<std::vector<long>> seen;
        for (auto& chi : t.characters()) {
            principals += chi.principal();
            std::vector<long> vals;
            for (std::uint64_t a = 0; a < q; ++a) vals.push_back(chi.phase_index(a) * 1000L / chi.group().exponent);
            seen.insert(vals);
            // complete multiplicativity and support
            for (std::uint64_t a = 0; a < q; ++a) {
                if (std::gcd(a, q) != 1 && q > 1) REQUIRE(chi(a) == cplx(0));
                for (std::uint64_t b = 0; b < q; ++b)
                    REQUIRE(double(std::abs(chi(a * b) - chi(a) * chi(b))) < 1e-15);
            }
        }
        REQUIRE(principals == 1);
        REQUIRE(seen.size() == t.size());
    }
}

TEST_CASE("orthogonality") {
    for (std::uint64_t q = 1; q <= 60; ++q) {
        CharacterTable t(q);
        for (std::size_t i = 0; i < t.size(); ++i)
            for (std::size_t j = 0; j < t.size(); ++j) {
                cplx s = 0;
                for (std::uint64_t a = 1; a <= q; ++a) s += t[i](a) * std::conj(t[j](a));
                real want = i == j ? real(t.size()) : 0;
                REQUIRE(double(std::abs(s - want)) < 1e-12);
            }
    }
}

TEST_CASE("conductors against brute force") {
    for (std::uint64_t q = 1; q <= 60; ++q) {
        CharacterTable t(q);
        for (auto& chi : t.characters()) REQUIRE(chi.conductor() == brute_conductor(chi));
    }
    CharacterTable t8(8);
    int full = 0;
    for (auto& c : t8.characters()) full += c.conductor() == 8;
    CHECK(full == 2);
    CHECK(CharacterTable(3).size() == 2);
    CHECK(CharacterTable(1).size() == 1);
    CHECK(CharacterTable(1)[0].primitive());
    CHECK_THROWS_AS(CharacterTable(100'001), BudgetError);
    CHECK_THROWS_AS(CharacterTable(0), DomainError);
}

TEST_CASE("gauss sums") {
    CharacterTable t3(3);
    CHECK(double(std::abs(gauss_sum(t3[1]) - cplx(0, std::sqrt(3.0L)))) < 1e-15);
    CHECK(double(std::abs(gauss_sum(CharacterTable(4).principal()))) < 1e-15);
    for (std::uint64_t q = 1; q <= 60; ++q) {
        CharacterTable t(q);
        CHECK(double(std::abs(gauss_sum(t.principal()) - real(mobius(factor(q))))) < 1e-12);
        for (auto& psi : t.primitive_characters())
            REQUIRE(double(std::fabs(std::norm(gauss_sum(psi)) - q)) < 1e-10);
    }
    for (auto& psi : CharacterTable(5).primitive_characters())
        CHECK(double(std::fabs(std::abs(gauss_sum(psi)) - std::sqrt(5.0L))) < 1e-12);
}

TEST_CASE("induced gauss sum factorisation") {
    for (std::uint64_t k = 1; k <= 40; ++k) {
        CharacterTable t(k);
        for (auto& chi : t.characters()) {
            Character psi = inducing_primitive(chi);
            REQUIRE(psi.modulus() == chi.conductor());
            REQUIRE(induces(psi, chi));
            REQUIRE(double(induced_gauss_sum_check(chi, psi)) < 1e-10);
        }
    }
    // self-induced
    auto psi5 = CharacterTable(5)[1];
    CHECK(induced_gauss_sum_check(psi5, psi5) == 0);
    // a character mod 3 does not induce one mod 4
    CHECK_THROWS_AS(induced_gauss_sum_check(CharacterTable(4)[1], CharacterTable(3)[1]), DomainError);
    CHECK_THROWS_AS(induced_gauss_sum_check(CharacterTable(6)[1], CharacterTable(6)[1]), DomainError);
}

TEST_CASE("additive to multiplicative decomposition") {
    CHECK(double(additive_decomposition_check(2, 6)) < 1e-12);
    CHECK(double(additive_decomposition_check(1, 5)) < 1e-12);
    CHECK(additive_decomposition_check(12, 6) < 1e-18L);
    real worst = 0;
    for (std::uint64_t k = 2; k <= 60; ++k)
        for (std::uint64_t m = 1; m <= k; ++m) worst = std::max(worst, additive_decomposition_check(m, k));
    CHECK(double(worst) < 1e-10);
    CHECK_THROWS_AS(additive_decomposition_check(1, 1), DomainError);
}

TEST_CASE("delta factor") {
    // one-term case q = k, d = 1
    for (std::uint64_t q : {3u, 5u, 8u, 12u})
        for (auto& psi : CharacterTable(q).primitive_characters())
            CHECK(double(std::abs(delta_factor(q, q, 1, psi) - std::conj(psi(-1)) / real(euler_phi(factor(q))))) <
                  1e-18);
    // q = 3, k = 6, d = 2 by hand: e in {1, 2}
    auto psi = CharacterTable(3)[1];
    cplx want = real(-1) / 2 * std::conj(psi(-2)) * psi(2) * real(-1)  // e = 1: mu(2)/phi(6) conj psi(-2) psi(2) mu(2)
                + real(1) / 2 * std::conj(psi(-1)) * psi(1);           // e = 2: mu(1)/phi(3) conj psi(-1) psi(1) mu(1)
    CHECK(double(std::abs(delta_factor(3, 6, 2, psi) - want)) < 1e-18);
    CHECK(double(std::abs(want + real(1))) < 1e-18);  // psi(2) = psi(-1) = -1
    // empty support: d with every mu(d/e) vanishing
    CHECK(std::abs(delta_factor(3, 3, 4, psi)) == 0);
    CHECK_THROWS_AS(delta_factor(1, 6, 1, CharacterTable(1)[0]), DomainError);
    CHECK_THROWS_AS(delta_factor(4, 6, 1, CharacterTable(4)[1]), DomainError);
}

TEST_CASE("primitive character expansion") {
    CHECK(double(primitive_decomposition_check(2, 4)) < 1e-10);
    CHECK(double(primitive_decomposition_check(8, 12)) < 1e-10);
    CHECK(double(primitive_decomposition_check(3, 7)) < 1e-12);
    real worst = 0;
    for (std::uint64_t k = 2; k <= 40; ++k)
        for (std::uint64_t m = 1; m <= k; ++m) worst = std::max(worst, primitive_decomposition_check(m, k));
    CHECK(double(worst) < 1e-10);
}

TEST_CASE("delta envelope report") {
    auto r = delta_envelope_report(200, 1e4L);
    CHECK(!r.rows.empty());
    CHECK(std::isfinite(double(r.max_ratio)));
    for (auto& row : r.rows) REQUIRE(row.envelope > 0);
}
