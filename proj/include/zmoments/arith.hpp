#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"

namespace zmoments {

struct PrimePower {
    std::uint64_t p;
    unsigned e;
    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

class Sieve;
std::shared_ptr<const Sieve> sieve_up_to(std::uint64_t n);

class FactoredInteger {
public:
    FactoredInteger() = default;
    FactoredInteger(std::uint64_t n);  // factors through the shared sieve

    static FactoredInteger from_factors(std::vector<PrimePower> f) {
        FactoredInteger r;
        std::uint64_t v = 1;
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (f[i].e == 0 || f[i].p < 2)
                throw DomainError("factor with exponent 0 or prime < 2");
            if (i > 0 && f[i].p <= f[i - 1].p)
                throw DomainError("primes must be strictly increasing");
            for (unsigned j = 0; j < f[i].e; ++j) {
                if (v > UINT64_MAX / f[i].p) throw DomainError("factored value overflows 64 bits");
                v *= f[i].p;
            }
        }
        r.value_ = v;
        r.factors_ = std::move(f);
        return r;
    }

    std::uint64_t value() const { return value_; }
    const std::vector<PrimePower>& factors() const { return factors_; }
    int omega() const { return static_cast<int>(factors_.size()); }
    bool is_one() const { return value_ == 1; }
    bool squarefree() const {
        return std::all_of(factors_.begin(), factors_.end(), [](auto& f) { return f.e == 1; });
    }
    bool prime_power() const { return factors_.size() == 1; }
    bool divisible_by(std::uint64_t p) const {
        return std::any_of(factors_.begin(), factors_.end(), [p](auto& f) { return f.p == p; });
    }
    real log() const { return std::log(static_cast<real>(value_)); }

    std::vector<std::uint64_t> divisors() const {
        std::vector<std::uint64_t> d{1};
        for (auto [p, e] : factors_) {
            std::size_t n = d.size();
            std::uint64_t pk = 1;
            for (unsigned j = 1; j <= e; ++j) {
                pk *= p;
                for (std::size_t i = 0; i < n; ++i) d.push_back(d[i] * pk);
            }
        }
        std::sort(d.begin(), d.end());
        return d;
    }

    // Squarefree divisors d as (d, mu(d)); the only ones that matter in mu-sums.
    std::vector<std::pair<std::uint64_t, int>> squarefree_divisors() const {
        std::vector<std::pair<std::uint64_t, int>> d{{1, 1}};
        for (auto [p, e] : factors_) {
            std::size_t n = d.size();
            for (std::size_t i = 0; i < n; ++i) d.push_back({d[i].first * p, -d[i].second});
        }
        return d;
    }

    friend bool operator==(const FactoredInteger& a, const FactoredInteger& b) {
        return a.value_ == b.value_;
    }

private:
    std::uint64_t value_ = 1;
    std::vector<PrimePower> factors_;
};

// Smallest-prime-factor table; trial division by its primes above the bound.
class Sieve {
public:
    explicit Sieve(std::uint64_t bound) : bound_(std::max<std::uint64_t>(bound, 2)), spf_(bound_ + 1, 0) {
        for (std::uint64_t i = 2; i <= bound_; ++i) {
            if (spf_[i] == 0) {
                spf_[i] = static_cast<std::uint32_t>(i);
                primes_.push_back(static_cast<std::uint32_t>(i));
            }
            for (std::uint32_t p : primes_) {
                if (p > spf_[i] || i * p > bound_) break;
                spf_[i * p] = p;
            }
        }
    }

    std::uint64_t bound() const { return bound_; }
    const std::vector<std::uint32_t>& primes() const { return primes_; }
    std::uint32_t spf(std::uint64_t n) const { return spf_[n]; }

    FactoredInteger factor(std::uint64_t n) const {
        if (n == 0) throw DomainError("cannot factor 0");
        std::vector<PrimePower> f;
        auto push = [&](std::uint64_t p) {
            if (!f.empty() && f.back().p == p)
                ++f.back().e;
            else
                f.push_back({p, 1});
        };
        if (n <= bound_) {
            while (n > 1) {
                std::uint64_t p = spf_[n];
                push(p);
                n /= p;
            }
        } else {
            for (std::uint64_t p : primes_) {
                if (p * p > n) break;
                while (n % p == 0) {
                    push(p);
                    n /= p;
                }
            }
            // beyond the table: plain odd trial division
            for (std::uint64_t p = bound_ + 1 + (bound_ % 2); p * p <= n; p += 2)
                while (n % p == 0) {
                    push(p);
                    n /= p;
                }
            if (n > 1) push(n);
        }
        return FactoredInteger::from_factors(std::move(f));
    }

private:
    std::uint64_t bound_;
    std::vector<std::uint32_t> spf_;
    std::vector<std::uint32_t> primes_;
};

inline std::shared_ptr<const Sieve> sieve_up_to(std::uint64_t n) {
    static std::mutex mu;
    static std::shared_ptr<const Sieve> cached;
    std::lock_guard lock(mu);
    if (!cached || cached->bound() < n)
        cached = std::make_shared<const Sieve>(std::max<std::uint64_t>(n, std::uint64_t{1} << 16));
    return cached;
}

inline FactoredInteger::FactoredInteger(std::uint64_t n) {
    *this = sieve_up_to(std::min<std::uint64_t>(n, std::uint64_t{1} << 22))->factor(n);
}

inline FactoredInteger factor(std::uint64_t n) { return FactoredInteger(n); }

inline std::uint64_t gcd(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }

// ---------------------------------------------------------------------------
// classical functions

inline int mobius(const FactoredInteger& n) {
    if (!n.squarefree()) return 0;
    return n.omega() % 2 ? -1 : 1;
}

inline real von_mangoldt(const FactoredInteger& n) {
    return n.prime_power() ? std::log(static_cast<real>(n.factors()[0].p)) : 0;
}

inline real lambda_k(const FactoredInteger& n, int k) {
    if (k < 1) throw DomainError("lambda_k needs k >= 1");
    if (n.omega() > k || n.is_one()) return 0;
    Compensated s;
    real logn = n.log();
    for (auto [d, mu] : n.squarefree_divisors())
        s += mu * std::pow(logn - std::log(static_cast<real>(d)), k);
    return s.value();
}

inline std::uint64_t tau_r(const FactoredInteger& n, int r) {
    if (r < 1) throw DomainError("tau_r needs r >= 1");
    std::uint64_t t = 1;
    for (auto [p, e] : n.factors()) {
        // C(e + r - 1, r - 1)
        std::uint64_t c = 1;
        for (unsigned i = 1; i <= e; ++i) c = c * (r - 1 + i) / i;
        t *= c;
    }
    return t;
}

inline std::uint64_t euler_phi(const FactoredInteger& n) {
    std::uint64_t v = n.value();
    for (auto [p, e] : n.factors()) v = v / p * (p - 1);
    return v;
}

// (Lambda * log)(n) = (log n)^2 - sum_{p^a || n} a(a+1)/2 (log p)^2
inline real lambda_log(const FactoredInteger& n) {
    real l = n.log();
    real s = l * l;
    for (auto [p, e] : n.factors()) {
        real lp = std::log(static_cast<real>(p));
        s -= real(e) * (e + 1) / 2 * lp * lp;
    }
    return s;
}

// (Lambda * Lambda)(n); nonzero only for omega(n) <= 2.
inline real lambda_lambda(const FactoredInteger& n) {
    const auto& f = n.factors();
    if (f.size() == 1) {
        real lp = std::log(static_cast<real>(f[0].p));
        return (f[0].e - 1) * lp * lp;
    }
    if (f.size() == 2)
        return 2 * std::log(static_cast<real>(f[0].p)) * std::log(static_cast<real>(f[1].p));
    return 0;
}

// ---------------------------------------------------------------------------
// bespoke functions of the main-term bookkeeping

inline real eta1(const FactoredInteger& k) {
    real s = 0;
    for (auto [p, e] : k.factors()) s += std::log(static_cast<real>(p)) / (p - 1);
    return s;
}

inline real eta2(const FactoredInteger& k) {
    real s = 0;
    for (auto [p, e] : k.factors()) {
        real q = p - 1;
        s -= p * std::log(static_cast<real>(p)) / (q * q);
    }
    return s;
}

// d/dz of -sum_{p|k} log(1 - p^{-z}) ... at z = 1, i.e. the derivative of
// eta1(k; z) = sum_{p|k} log p / (p^z - 1).
inline real eta1_prime(const FactoredInteger& k) {
    real s = 0;
    for (auto [p, e] : k.factors()) {
        real lp = std::log(static_cast<real>(p));
        real q = p - 1;
        s -= p * lp * lp / (q * q);
    }
    return s;
}

inline real g_hk(const FactoredInteger& h, const FactoredInteger& k) {
    real s = 0;
    for (auto [p, e] : h.factors()) {
        if (k.divisible_by(p)) continue;
        real lp = std::log(static_cast<real>(p));
        s += e * lp * lp / (p - 1);
    }
    return s;
}

inline real j_weight(const FactoredInteger& n) {
    real s = 1;
    for (auto [p, e] : n.factors()) s *= 1 + 10 / std::sqrt(static_cast<real>(p));
    return s;
}

// closed forms
inline real phi_1(const FactoredInteger& n) {
    if (!n.prime_power()) return 0;
    auto p = n.factors()[0].p;
    return -std::log(static_cast<real>(p)) / (p - 1);
}

inline real phi_2(const FactoredInteger& n) {
    if (!n.prime_power()) return 0;
    auto p = n.factors()[0].p;
    real q = p - 1;
    return p * std::log(static_cast<real>(p)) / (q * q);
}

inline real phi_3(const FactoredInteger& n) {
    if (!n.prime_power()) return 0;
    auto [p, e] = n.factors()[0];
    real lp = std::log(static_cast<real>(p));
    return lp / (p - 1) * e * lp;
}

inline real phi_4(const FactoredInteger& n) {
    const auto& f = n.factors();
    if (f.size() == 1) {
        real lp = std::log(static_cast<real>(f[0].p));
        return -lp * lp / (f[0].p - 1);
    }
    if (f.size() == 2) {
        real lp = std::log(static_cast<real>(f[0].p)), lq = std::log(static_cast<real>(f[1].p));
        return lp * lq * (real(1) / (f[0].p - 1) + real(1) / (f[1].p - 1));
    }
    return 0;
}

inline real phi_j(const FactoredInteger& n, int j) {
    switch (j) {
        case 1: return phi_1(n);
        case 2: return phi_2(n);
        case 3: return phi_3(n);
        case 4: return phi_4(n);
    }
    throw DomainError("phi_j: j must be 1..4");
}

// Divisor-sum definitions. For phi_3 the cofactor h = n/k is used; the
// variant taking an explicit h holds h fixed across the k-sum.
inline real phi_j_definitional(const FactoredInteger& n, int j) {
    if (j < 1 || j > 4) throw DomainError("phi_j: j must be 1..4");
    const auto& sieve = *sieve_up_to(std::min<std::uint64_t>(n.value(), std::uint64_t{1} << 22));
    Compensated s;
    for (auto [kv, mu] : n.squarefree_divisors()) {
        FactoredInteger k = sieve.factor(kv);
        real term = 0;
        switch (j) {
            case 1: term = eta1(k); break;
            case 2: term = eta2(k); break;
            case 3: term = g_hk(sieve.factor(n.value() / kv), k); break;
            case 4: term = eta1(k) * k.log(); break;
        }
        s += mu * term;
    }
    return s.value();
}

inline real phi_3_definitional(const FactoredInteger& n, const FactoredInteger& h) {
    const auto& sieve = *sieve_up_to(std::min<std::uint64_t>(n.value(), std::uint64_t{1} << 22));
    Compensated s;
    for (auto [kv, mu] : n.squarefree_divisors()) s += mu * g_hk(h, sieve.factor(kv));
    return s.value();
}

inline real alpha_1(const FactoredInteger& n) { return -phi_1(n); }

// Closed form with the free constant D.
inline real alpha_2(const FactoredInteger& n, real D) {
    const auto& f = n.factors();
    if (f.size() == 1) {
        auto [p, e] = f[0];
        real lp = std::log(static_cast<real>(p));
        real q = p - 1;
        return -(real(e) + 1) * lp * lp / q + D * lp / q - lp / (q * q);
    }
    if (f.size() == 2) {
        real lp = std::log(static_cast<real>(f[0].p)), lq = std::log(static_cast<real>(f[1].p));
        return -lp * lq * (real(1) / (f[0].p - 1) + real(1) / (f[1].p - 1));
    }
    return 0;
}

// The form produced by collapsing the exact shifted-sum residue over hk = u
// (with R1 = Rtilde1 = X + gamma0 - 1); D enters as D * alpha_1(n).
inline real alpha_2_residue(const FactoredInteger& n, real D = 0) {
    const auto& f = n.factors();
    if (f.size() == 1) {
        auto [p, e] = f[0];
        real lp = std::log(static_cast<real>(p));
        real q = p - 1;
        return -(e + real(0.5)) * lp * lp / q - lp * lp / (q * q) + D * lp / q;
    }
    if (f.size() == 2) {
        real p = f[0].p, q = f[1].p;
        real lp = std::log(p), lq = std::log(q);
        return -lp * lq * (p + q - 1) / ((p - 1) * (q - 1));
    }
    return 0;
}

// ---------------------------------------------------------------------------
// ArithFn: named evaluator with a declared support class.

enum class Support { all, prime_powers, omega_le_2, squarefree };

class ArithFn {
public:
    using Eval = std::function<real(const FactoredInteger&)>;

    ArithFn(std::string name, Support support, Eval eval)
        : name_(std::move(name)), support_(support), eval_(std::move(eval)) {}

    const std::string& name() const { return name_; }
    Support support() const { return support_; }

    bool in_support(const FactoredInteger& n) const {
        switch (support_) {
            case Support::all: return true;
            case Support::prime_powers: return n.prime_power();
            case Support::omega_le_2: return n.omega() <= 2;
            case Support::squarefree: return n.squarefree();
        }
        return false;
    }

    real operator()(const FactoredInteger& n) const { return in_support(n) ? eval_(n) : 0; }

    // values at 0..N with index 0 set to 0
    std::vector<real> table(std::uint64_t N) const {
        auto sieve = sieve_up_to(N);
        std::vector<real> t(N + 1, 0);
        for (std::uint64_t n = 1; n <= N; ++n) t[n] = (*this)(sieve->factor(n));
        return t;
    }

private:
    std::string name_;
    Support support_;
    Eval eval_;
};

namespace fn {
inline ArithFn one() { return {"1", Support::all, [](auto&) { return real(1); }}; }
inline ArithFn log() { return {"log", Support::all, [](auto& n) { return n.log(); }}; }
inline ArithFn mobius() {
    return {"mu", Support::squarefree, [](auto& n) { return real(zmoments::mobius(n)); }};
}
inline ArithFn von_mangoldt() {
    return {"Lambda", Support::prime_powers, [](auto& n) { return zmoments::von_mangoldt(n); }};
}
inline ArithFn lambda_k(int k) {
    return {"Lambda_" + std::to_string(k), Support::all,
            [k](auto& n) { return zmoments::lambda_k(n, k); }};
}
inline ArithFn tau(int r) {
    return {"tau_" + std::to_string(r), Support::all,
            [r](auto& n) { return real(zmoments::tau_r(n, r)); }};
}
inline ArithFn j_weight() {
    return {"j", Support::all, [](auto& n) { return zmoments::j_weight(n); }};
}
inline ArithFn alpha_1() {
    return {"alpha_1", Support::prime_powers, [](auto& n) { return zmoments::alpha_1(n); }};
}
inline ArithFn alpha_2(real D) {
    return {"alpha_2", Support::omega_le_2, [D](auto& n) { return zmoments::alpha_2(n, D); }};
}
}  // namespace fn

// ---------------------------------------------------------------------------
// Dirichlet convolution by divisor sweep, O(N log N).

inline std::vector<real> dirichlet_convolve(std::span<const real> f, std::span<const real> g) {
    std::size_t N = std::min(f.size(), g.size());
    if (N == 0) return {};
    std::vector<real> h(N, 0);
    for (std::size_t d = 1; d < N; ++d) {
        if (f[d] == 0) continue;
        for (std::size_t m = 1, n = d; n < N; ++m, n += d) h[n] += f[d] * g[m];
    }
    return h;
}

inline std::vector<real> dirichlet_convolve(const ArithFn& f, const ArithFn& g, std::uint64_t N) {
    if (N < 1) throw DomainError("dirichlet_convolve needs N >= 1");
    auto ft = f.table(N), gt = g.table(N);
    return dirichlet_convolve(std::span<const real>(ft), std::span<const real>(gt));
}

// Table of (Lambda*log)(n), n <= N, from the smallest-prime-factor table.
inline std::vector<real> lambda_log_table(std::uint64_t N) {
    auto sieve = sieve_up_to(N);
    std::vector<real> t(N + 1, 0);
    for (std::uint64_t n = 2; n <= N; ++n) t[n] = lambda_log(sieve->factor(n));
    return t;
}

// ---------------------------------------------------------------------------
// Decomposition identity for restricted sums of j-fold convolutions at mD:
//   sum_{m<=X,(m,k)=1} (f1*...*fj)(mD)
//     = sum_{d1...dj = D} sum_{m1...mj <= X, (mi, k)=1, (mi, d_l)=1 for l<j+1-i}
//         prod_i f_i(m_i d_{j+1-i})
// Both sides are computed independently; the residual is their difference.

struct DecomposeResult {
    real lhs = 0;
    real rhs = 0;
    real residual = 0;
    bool pass = false;
};

inline DecomposeResult conv_decompose_check(const std::vector<ArithFn>& fs, const FactoredInteger& D,
                                            const FactoredInteger& k, std::uint64_t X) {
    const std::size_t j = fs.size();
    if (j < 2) throw DomainError("conv_decompose_check needs at least two functions");
    constexpr std::uint64_t oracle_bound = 100000;
    if (X > oracle_bound) throw BudgetError("X beyond the oracle scale of 1e5");
    const std::uint64_t Dv = D.value(), kv = k.value();
    if (Dv > std::uint64_t{1} << 40 || X * Dv > std::uint64_t{1} << 26)
        throw BudgetError("divisor enumeration X*D exceeds the oracle budget");
    const std::uint64_t N = X * Dv;

    std::vector<std::vector<real>> tab;
    for (auto& f : fs) tab.push_back(f.table(N));

    // left side
    std::vector<real> conv = tab[0];
    for (std::size_t i = 1; i < j; ++i)
        conv = dirichlet_convolve(std::span<const real>(conv), std::span<const real>(tab[i]));
    Compensated lhs;
    for (std::uint64_t m = 1; m <= X; ++m)
        if (gcd(m, kv) == 1) lhs += conv[m * Dv];

    // right side: ordered factorisations D = d_1 ... d_j, then m-tuples.
    // Term i uses f_i(m_i d_{j+1-i}); m_i must be coprime to k and to d_l for
    // every l < j+1-i. That coprimality condition is what makes the split
    // unique; it is the standard one from the induction on j.
    auto divs = D.divisors();
    Compensated rhs;
    std::uint64_t work = 0;
    std::vector<std::uint64_t> d(j + 1, 1);  // 1-based
    std::function<void(std::size_t, std::uint64_t)> split = [&](std::size_t idx, std::uint64_t rest) {
        if (idx == j) {
            d[j] = rest;
            // enumerate m_1..m_j with product <= X
            std::function<void(std::size_t, std::uint64_t, real)> walk = [&](std::size_t i, std::uint64_t prod,
                                                                              real acc) {
                if (i > j) {
                    if (++work > 2'000'000'000ULL) throw BudgetError("divisor enumeration overflow");
                    rhs += acc;
                    return;
                }
                std::uint64_t di = d[j + 1 - i];
                for (std::uint64_t m = 1; prod * m <= X; ++m) {
                    if (gcd(m, kv) != 1) continue;
                    bool ok = true;
                    for (std::size_t l = 1; l < j + 1 - i && ok; ++l)
                        if (gcd(m, d[l]) != 1) ok = false;
                    if (!ok) continue;
                    real v = tab[i - 1][m * di];
                    if (v == 0) continue;
                    walk(i + 1, prod * m, acc * v);
                }
            };
            walk(1, 1, 1);
            return;
        }
        for (auto dd : divs)
            if (rest % dd == 0) {
                d[idx] = dd;
                split(idx + 1, rest / dd);
            }
    };
    split(1, Dv);

    DecomposeResult r;
    r.lhs = lhs.value();
    r.rhs = rhs.value();
    r.residual = std::fabs(r.lhs - r.rhs);
    r.pass = r.residual < 1e-9L;
    return r;
}

}  // namespace zmoments
