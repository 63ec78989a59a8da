#include <catch_amalgamated.hpp>

#include <fstream>
#include <map>

#include <zmoments/laurent.hpp>

using namespace zmoments;

namespace {

std::vector<real> stieltjes_oracle() {
    std::ifstream in(std::string(ZM_TEST_DATA) + "/stieltjes.txt");
    std::vector<real> g;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') g.push_back(std::stold(line));
    return g;
}

std::map<std::string, real> laurent_oracle() {
    std::ifstream in(std::string(ZM_TEST_DATA) + "/laurent.txt");
    std::map<std::string, real> m;
    std::string k, v;
    while (in >> k) {
        if (k[0] == '#') {
            std::getline(in, v);
            continue;
        }
        in >> v;
        m[k] = std::stold(v);
    }
    return m;
}

}  // namespace

TEST_CASE("Stieltjes constants against high-precision values") {
    auto g = stieltjes_oracle();
    REQUIRE(g.size() == 5);
    for (int n = 0; n < 5; ++n) {
        INFO("n = " << n);
        CHECK(std::fabs(stieltjes(n) - g[n]) < 1e-16L);
    }
    CHECK_THROWS_AS(stieltjes(-1), DomainError);
}

TEST_CASE("Laurent coefficients of zeta'^2/zeta at 1") {
    auto o = laurent_oracle();
    auto lc = zeta_prime_sq_over_zeta_laurent();
    CHECK(std::fabs(lc.a1 - o.at("a1")) < 1e-16L);
    CHECK(std::fabs(lc.a2 - o.at("a2")) < 1e-16L);
    CHECK(lc.series.v == -3);
    CHECK(lc.series.coeff(-3) == Catch::Approx(1.0).epsilon(1e-15));
    // closed forms in the Stieltjes constants
    CHECK(std::fabs(lc.a1 + lc.gamma0) < 1e-17L);
    CHECK(std::fabs(lc.a2 - (lc.gamma0 * lc.gamma0 + 3 * lc.gamma1)) < 1e-17L);
}

TEST_CASE("Laurent arithmetic") {
    Laurent a{-1, {1, 2, 3}};  // 1/w + 2 + 3w
    auto one = a * a.inverse();
    CHECK(one.v == 0);
    CHECK(one.coeff(0) == Catch::Approx(1.0));
    CHECK(std::fabs(one.coeff(1)) < 1e-18L);
    CHECK(std::fabs(one.coeff(2)) < 1e-18L);
    auto d = a.derivative();  // -1/w^2 + 3
    CHECK(d.coeff(-2) == -1);
    CHECK(d.coeff(-1) == 0);
    CHECK(d.coeff(0) == 3);
    CHECK_THROWS_AS((Laurent{0, {0, 1}}.inverse()), DomainError);
}

TEST_CASE("residue of zeta'^2/zeta x^z/z") {
    auto lc = zeta_prime_sq_over_zeta_laurent();
    for (real x : {1e2L, 1e4L, 1e6L}) {
        real L = std::log(x);
        real expected = L * L / 2 + (lc.a1 - 1) * L - lc.a1 + 1 + lc.a2;
        CHECK(std::fabs(residue_over_x(lc.series, L) - expected) < 1e-14L * std::max(real(1), std::fabs(expected)));
    }
}
