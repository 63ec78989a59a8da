#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "arith.hpp"

namespace zmoments {

inline constexpr std::uint64_t max_character_modulus = 100'000;

// (Z/q)^* as a product of cyclic groups, one block per prime power of q
// (two generators -1, 5 for 2^e with e >= 3).
struct UnitGroup {
    struct Block {
        std::uint64_t p = 0;
        int e = 0;
        std::uint64_t pe = 0;
        std::vector<int> gens;                 // indices into orders
        std::vector<std::array<int, 2>> log;   // residue mod p^e -> exponents (-1: not a unit)
    };

    std::uint64_t q = 1;
    std::uint64_t phi = 1;
    std::vector<Block> blocks;
    std::vector<int> orders;
    int exponent = 1;                 // lcm of the orders
    std::vector<std::int32_t> ind;    // q * ngens, -1 in the first slot for non-units
    std::vector<std::uint64_t> gen_residues;
    std::vector<cplx> roots;          // e(j / exponent)

    std::size_t ngens() const { return orders.size(); }
    const std::int32_t* index(std::uint64_t a) const { return &ind[(a % q) * ngens()]; }
};

namespace detail {

inline std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    unsigned __int128 r = 1 % m, x = b % m;
    for (; e; e >>= 1, x = x * x % m)
        if (e & 1) r = r * x % m;
    return static_cast<std::uint64_t>(r);
}

inline std::uint64_t primitive_root_mod_p(std::uint64_t p) {
    if (p == 2) return 1;
    auto f = factor(p - 1);
    for (std::uint64_t g = 2;; ++g) {
        bool ok = true;
        for (auto [r, e] : f.factors())
            if (powmod(g, (p - 1) / r, p) == 1) ok = false;
        if (ok) return g;
    }
}

inline std::shared_ptr<const UnitGroup> build_unit_group(std::uint64_t q) {
    auto G = std::make_shared<UnitGroup>();
    G->q = q;
    FactoredInteger fq = factor(q);
    G->phi = euler_phi(fq);
    for (auto [p, e] : fq.factors()) {
        UnitGroup::Block b;
        b.p = p;
        b.e = static_cast<int>(e);
        b.pe = 1;
        for (unsigned i = 0; i < e; ++i) b.pe *= p;
        b.log.assign(b.pe, {-1, -1});
        if (p == 2) {
            if (e == 1) {
                b.log[1] = {0, 0};
            } else if (e == 2) {
                b.gens = {static_cast<int>(G->orders.size())};
                G->orders.push_back(2);
                b.log[1] = {0, 0};
                b.log[3] = {1, 0};
            } else {
                int o = 1 << (e - 2);
                b.gens = {static_cast<int>(G->orders.size()), static_cast<int>(G->orders.size() + 1)};
                G->orders.push_back(2);
                G->orders.push_back(o);
                std::uint64_t x = 1;
                for (int j = 0; j < o; ++j, x = x * 5 % b.pe) {
                    b.log[x] = {0, j};
                    b.log[b.pe - x] = {1, j};
                }
            }
        } else {
            std::uint64_t g = primitive_root_mod_p(p);
            if (e >= 2 && powmod(g, p - 1, p * p) == 1) g += p;
            std::uint64_t o = b.pe / p * (p - 1);
            b.gens = {static_cast<int>(G->orders.size())};
            G->orders.push_back(static_cast<int>(o));
            std::uint64_t x = 1;
            for (std::uint64_t j = 0; j < o; ++j, x = x * g % b.pe) b.log[x] = {static_cast<int>(j), 0};
        }
        G->blocks.push_back(std::move(b));
    }
    for (int o : G->orders) G->exponent = std::lcm(G->exponent, o);
    const std::size_t ng = G->ngens();
    G->ind.assign(q * std::max<std::size_t>(ng, 1), -1);
    if (ng == 0) {
        // trivial group: q in {1, 2}; 0 marks units
        for (std::uint64_t a = 0; a < q; ++a)
            if (std::gcd(a, q) == 1) G->ind[a] = 0;
    }
    G->gen_residues.assign(ng, 0);
    for (std::uint64_t a = 0; a < q && ng; ++a) {
        if (std::gcd(a, q) != 1) continue;
        std::int32_t* row = &G->ind[a * ng];
        for (auto& b : G->blocks) {
            auto l = b.log[a % b.pe];
            for (std::size_t j = 0; j < b.gens.size(); ++j) row[b.gens[j]] = l[j];
        }
        int nonzero = 0, which = -1;
        for (std::size_t i = 0; i < ng; ++i)
            if (row[i] != 0) ++nonzero, which = static_cast<int>(i);
        if (nonzero == 1 && row[which] == 1) G->gen_residues[which] = a;
    }
    G->roots.resize(G->exponent);
    for (int j = 0; j < G->exponent; ++j) G->roots[j] = e_of(static_cast<real>(j) / G->exponent);
    return G;
}

inline std::shared_ptr<const UnitGroup> unit_group(std::uint64_t q) {
    static std::mutex mu;
    static std::map<std::uint64_t, std::shared_ptr<const UnitGroup>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[q];
    if (!slot) slot = build_unit_group(q);
    return slot;
}

}  // namespace detail

// A character mod q given by exponents c_i: chi(g_i) = e(c_i / ord_i).
class Character {
public:
    Character(std::shared_ptr<const UnitGroup> G, std::vector<int> exps) : G_(std::move(G)), c_(std::move(exps)) {
        w_.resize(c_.size());
        for (std::size_t i = 0; i < c_.size(); ++i) w_[i] = c_[i] * (G_->exponent / G_->orders[i]);
        conductor_ = compute_conductor();
    }

    std::uint64_t modulus() const { return G_->q; }
    const std::vector<int>& exponents() const { return c_; }
    bool principal() const {
        return std::all_of(c_.begin(), c_.end(), [](int c) { return c == 0; });
    }
    std::uint64_t conductor() const { return conductor_; }
    bool primitive() const { return conductor_ == G_->q; }
    const UnitGroup& group() const { return *G_; }

    // value as j with chi(a) = e(j / exponent), or -1 when (a, q) > 1
    int phase_index(std::int64_t a) const {
        std::uint64_t r = static_cast<std::uint64_t>(((a % static_cast<std::int64_t>(G_->q)) + G_->q) % G_->q);
        if (std::gcd(r, G_->q) != 1 && G_->q != 1) return -1;
        if (c_.empty()) return 0;
        const std::int32_t* row = G_->index(r);
        long long s = 0;
        for (std::size_t i = 0; i < c_.size(); ++i) s += static_cast<long long>(w_[i]) * row[i];
        return static_cast<int>(s % G_->exponent);
    }

    cplx operator()(std::int64_t a) const {
        int j = phase_index(a);
        return j < 0 ? cplx(0) : G_->roots[j];
    }

    Character conj() const {
        std::vector<int> c(c_.size());
        for (std::size_t i = 0; i < c_.size(); ++i) c[i] = (G_->orders[i] - c_[i]) % G_->orders[i];
        return {G_, std::move(c)};
    }

    bool operator==(const Character& o) const { return G_->q == o.G_->q && c_ == o.c_; }

private:
    std::uint64_t compute_conductor() const {
        std::uint64_t f = 1;
        for (auto& b : G_->blocks) {
            bool trivial = true;
            for (int g : b.gens) trivial = trivial && c_[g] == 0;
            if (trivial) continue;
            // smallest p^k with the block character trivial on 1 + p^k (mod p^e)
            std::uint64_t pk = b.p == 2 ? 4 : b.p;
            for (; pk < b.pe; pk *= b.p) {
                auto l = b.log[(1 + pk) % b.pe];
                long long s = 0;
                for (std::size_t j = 0; j < b.gens.size(); ++j)
                    s += static_cast<long long>(w_[b.gens[j]]) * l[j];
                if (s % G_->exponent == 0) break;
            }
            f *= pk;
        }
        return f;
    }

    std::shared_ptr<const UnitGroup> G_;
    std::vector<int> c_;
    std::vector<int> w_;
    std::uint64_t conductor_ = 1;
};

class CharacterTable {
public:
    explicit CharacterTable(std::uint64_t q) {
        if (q < 1) throw DomainError("character modulus must be >= 1");
        if (q > max_character_modulus) throw BudgetError("character modulus too large");
        G_ = detail::unit_group(q);
        const std::size_t ng = G_->ngens();
        std::vector<int> c(ng, 0);
        // mixed-radix enumeration, principal character first
        while (true) {
            chars_.emplace_back(G_, c);
            std::size_t i = 0;
            for (; i < ng; ++i) {
                if (++c[i] < G_->orders[i]) break;
                c[i] = 0;
            }
            if (i == ng) break;
        }
    }

    std::uint64_t q() const { return G_->q; }
    std::size_t size() const { return chars_.size(); }
    const std::vector<Character>& characters() const { return chars_; }
    const Character& operator[](std::size_t i) const { return chars_[i]; }
    const Character& principal() const { return chars_.front(); }

    std::vector<Character> primitive_characters() const {
        std::vector<Character> r;
        for (auto& c : chars_)
            if (c.primitive()) r.push_back(c);
        return r;
    }

    // character with the given generator values, as exponent indices of e(./exponent)
    Character from_generator_phases(const std::vector<int>& phase) const {
        std::vector<int> c(G_->ngens());
        for (std::size_t i = 0; i < c.size(); ++i) {
            long long num = static_cast<long long>(phase[i]) * G_->orders[i];
            if (num % G_->exponent != 0) throw DomainError("phase is not a valid generator value");
            c[i] = static_cast<int>(num / G_->exponent % G_->orders[i]);
        }
        return {G_, std::move(c)};
    }

    const UnitGroup& group() const { return *G_; }

private:
    std::shared_ptr<const UnitGroup> G_;
    std::vector<Character> chars_;
};

inline CharacterTable build_table(std::uint64_t q) { return CharacterTable(q); }

// tau(chi) = sum_{a=1}^{q} chi(a) e(a/q)
inline cplx gauss_sum(const Character& chi) {
    const std::uint64_t q = chi.modulus();
    CompensatedC s;
    for (std::uint64_t a = 1; a <= q; ++a) {
        cplx v = chi(static_cast<std::int64_t>(a));
        if (v != cplx(0)) s += v * e_of(static_cast<real>(a) / q);
    }
    return s.value();
}

// chi(a) == psi(a) for every a coprime to the modulus of chi
inline bool induces(const Character& psi, const Character& chi) {
    std::uint64_t k = chi.modulus(), q = psi.modulus();
    if (k % q != 0) return false;
    for (std::uint64_t a = 1; a <= k; ++a) {
        if (std::gcd(a, k) != 1) continue;
        if (std::abs(psi(static_cast<std::int64_t>(a)) - chi(static_cast<std::int64_t>(a))) > 1e-15L) return false;
    }
    return true;
}

// the primitive character mod conductor(chi) inducing chi
inline Character inducing_primitive(const Character& chi) {
    std::uint64_t d = chi.conductor(), k = chi.modulus();
    CharacterTable t(d);
    const auto& G = t.group();
    std::vector<int> phase(G.ngens());
    for (std::size_t i = 0; i < G.ngens(); ++i) {
        std::uint64_t a = G.gen_residues[i];
        while (std::gcd(a, k) != 1) a += d;  // lift to a unit mod k
        int j = chi.phase_index(static_cast<std::int64_t>(a));
        phase[i] = static_cast<int>(static_cast<long long>(j) * G.exponent / chi.group().exponent);
        if (static_cast<long long>(j) * G.exponent % chi.group().exponent != 0)
            throw CertificationError("inducing character has inconsistent phases");
    }
    Character psi = t.from_generator_phases(phase);
    if (!psi.primitive()) throw CertificationError("inducing character is not primitive");
    return psi;
}

// |tau(chi) - mu(k'/q) psi(k'/q) tau(psi)|
inline real induced_gauss_sum_check(const Character& chi, const Character& psi) {
    if (!psi.primitive()) throw DomainError("psi must be primitive");
    if (!induces(psi, chi)) throw DomainError("psi does not induce chi");
    std::uint64_t r = chi.modulus() / psi.modulus();
    cplx rhs = real(mobius(factor(r))) * psi(static_cast<std::int64_t>(r)) * gauss_sum(psi);
    return std::abs(gauss_sum(chi) - rhs);
}

// (1/phi(k')) sum_{chi != chi0 mod k'} tau(conj chi) chi(-m'), with m/k = m'/k' reduced
inline cplx nonprincipal_part(std::uint64_t m, std::uint64_t k) {
    std::uint64_t g = std::gcd(m, k), mp = m / g, kp = k / g;
    CharacterTable t(kp);
    CompensatedC s;
    for (std::size_t i = 1; i < t.size(); ++i) {
        const auto& chi = t[i];
        s += gauss_sum(chi.conj()) * chi(-static_cast<std::int64_t>(mp));
    }
    return s.value() / real(t.size());
}

// |mu(k')/phi(k') + nonprincipal part - e(-m/k)|
inline real additive_decomposition_check(std::uint64_t m, std::uint64_t k) {
    if (k < 2 || m < 1) throw DomainError("additive decomposition needs k >= 2, m >= 1");
    std::uint64_t kp = k / std::gcd(m, k);
    FactoredInteger fk = factor(kp);
    cplx rhs = real(mobius(fk)) / real(euler_phi(fk)) + nonprincipal_part(m, k);
    return std::abs(rhs - e_of(-static_cast<real>(m % k) / k));
}

// delta(q,k,d,psi) = sum_{e | d, e | k/q} mu(d/e)/phi(k/e) conj psi(-k/(eq)) psi(d/e) mu(k/(eq))
inline cplx delta_factor(std::uint64_t q, std::uint64_t k, std::uint64_t d, const Character& psi) {
    if (q < 2 || k % q != 0) throw DomainError("delta_factor needs q > 1 with q | k");
    if (psi.modulus() != q) throw DomainError("psi has the wrong modulus");
    if (d < 1) throw DomainError("delta_factor needs d >= 1");
    Character pb = psi.conj();
    std::uint64_t kq = k / q;
    CompensatedC s;
    for (auto e : factor(std::gcd(d, kq)).divisors()) {
        int mu1 = mobius(factor(d / e)), mu2 = mobius(factor(kq / e));
        if (!mu1 || !mu2) continue;
        cplx v = pb(-static_cast<std::int64_t>(kq / e)) * psi(static_cast<std::int64_t>(d / e));
        s += v * real(mu1 * mu2) / real(euler_phi(factor(k / e)));
    }
    return s.value();
}

// right side of the primitive-character expansion of the nonprincipal part
inline cplx primitive_expansion(std::uint64_t m, std::uint64_t k) {
    CompensatedC s;
    auto dmk = factor(std::gcd(m, k)).divisors();
    for (auto q : factor(k).divisors()) {
        if (q < 2) continue;
        CharacterTable t(q);
        for (auto& psi : t.characters()) {
            if (!psi.primitive()) continue;
            CompensatedC inner;
            for (auto d : dmk) inner += psi(static_cast<std::int64_t>(m / d)) * delta_factor(q, k, d, psi);
            s += gauss_sum(psi.conj()) * inner.value();
        }
    }
    return s.value();
}

inline real primitive_decomposition_check(std::uint64_t m, std::uint64_t k) {
    if (k < 2 || m < 1) throw DomainError("primitive decomposition needs k >= 2, m >= 1");
    return std::abs(nonprincipal_part(m, k) - primitive_expansion(m, k));
}

// |delta(q, kq, d, psi)| against 8 (d,k) loglog T / (phi(k) phi(q)); report only
struct DeltaEnvelopeRow {
    std::uint64_t q, k, d;
    real value, envelope;
};

struct DeltaEnvelopeReport {
    std::vector<DeltaEnvelopeRow> rows;
    real max_ratio = 0;
    std::size_t exceed = 0;
};

inline DeltaEnvelopeReport delta_envelope_report(std::uint64_t kq_max = 1000, real T = 1e4L) {
    DeltaEnvelopeReport r;
    const real llT = std::log(std::log(T));
    for (std::uint64_t q = 2; q <= kq_max; ++q) {
        CharacterTable t(q);
        auto prim = t.primitive_characters();
        if (prim.empty()) continue;
        for (std::uint64_t k = 1; k * q <= kq_max; ++k) {
            real env_base = 8 * llT / (real(euler_phi(factor(k))) * real(euler_phi(factor(q))));
            for (auto d : factor(k * q).divisors()) {
                real worst = 0;
                for (auto& psi : prim) worst = std::max(worst, std::abs(delta_factor(q, k * q, d, psi)));
                real env = env_base * real(std::gcd(d, k));
                r.rows.push_back({q, k, d, worst, env});
                r.max_ratio = std::max(r.max_ratio, worst / env);
                if (worst > env) ++r.exceed;
            }
        }
    }
    return r;
}

}  // namespace zmoments
