#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arith.hpp"
#include "poly.hpp"

namespace zmoments {

inline constexpr std::uint64_t dense_coeff_cap = 10'000'000;

// Finite sequence (c_n)_{n <= M}. Nonzeros are kept sorted; a dense table is
// kept too whenever M is within the dense cap.
class CoefficientVector {
public:
    CoefficientVector() = default;

    CoefficientVector(std::uint64_t M, std::vector<std::pair<std::uint64_t, real>> entries, std::string label)
        : M_(M), label_(std::move(label)) {
        if (M < 1) throw DomainError("coefficient vector needs M >= 1");
        std::sort(entries.begin(), entries.end());
        for (auto& [n, v] : entries) {
            if (n < 1 || n > M) throw DomainError("coefficient index outside 1..M");
            if (!nz_.empty() && nz_.back().first == n) throw DomainError("duplicate coefficient index");
            if (v != 0) nz_.push_back({n, v});
        }
        if (M <= dense_coeff_cap) {
            dense_.assign(M + 1, 0);
            for (auto& [n, v] : nz_) dense_[n] = v;
        }
    }

    // from a dense table indexed 1..M (index 0 ignored)
    static CoefficientVector dense(std::vector<real> table, std::string label) {
        if (table.size() < 2) throw DomainError("dense table needs at least c_1");
        std::vector<std::pair<std::uint64_t, real>> e;
        for (std::uint64_t n = 1; n < table.size(); ++n)
            if (table[n] != 0) e.push_back({n, table[n]});
        return {table.size() - 1, std::move(e), std::move(label)};
    }

    static CoefficientVector indicator_of_one(std::uint64_t M = 1) { return {M, {{1, 1}}, "indicator_of_1"}; }
    static CoefficientVector ones(std::uint64_t M) {
        return dense(std::vector<real>(M + 1, 1), "ones");
    }
    static CoefficientVector zero(std::uint64_t M) { return {M, {}, "zero"}; }

    std::uint64_t M() const { return M_; }
    const std::string& label() const { return label_; }
    const std::vector<std::pair<std::uint64_t, real>>& nonzeros() const { return nz_; }
    bool is_dense() const { return !dense_.empty(); }

    // c_n for 1 <= n <= M; zero beyond M so sums can index freely
    real operator()(std::uint64_t n) const {
        if (n < 1 || n > M_) return 0;
        if (!dense_.empty()) return dense_[n];
        auto it = std::lower_bound(nz_.begin(), nz_.end(), std::pair<std::uint64_t, real>{n, -INFINITY});
        return it != nz_.end() && it->first == n ? it->second : 0;
    }

    real at(std::uint64_t n) const {
        if (n < 1 || n > M_) throw DomainError("coefficient index outside 1..M");
        return (*this)(n);
    }

    CoefficientVector scaled(real s, std::string label = {}) const {
        auto e = nz_;
        for (auto& [n, v] : e) v *= s;
        return {M_, std::move(e), label.empty() ? label_ : label};
    }

    // a*this + b*other on the common bound max(M, M')
    static CoefficientVector combine(real a, const CoefficientVector& x, real b, const CoefficientVector& y) {
        std::uint64_t M = std::max(x.M(), y.M());
        std::vector<std::pair<std::uint64_t, real>> e;
        auto i = x.nz_.begin(), j = y.nz_.begin();
        while (i != x.nz_.end() || j != y.nz_.end()) {
            if (j == y.nz_.end() || (i != x.nz_.end() && i->first < j->first)) {
                e.push_back({i->first, a * i->second});
                ++i;
            } else if (i == x.nz_.end() || j->first < i->first) {
                e.push_back({j->first, b * j->second});
                ++j;
            } else {
                e.push_back({i->first, a * i->second + b * j->second});
                ++i, ++j;
            }
        }
        return {M, std::move(e), "combination"};
    }

    // Dirichlet polynomial sum_n c_n n^{-s}
    cplx dirichlet(cplx s) const {
        CompensatedC acc;
        for (auto& [n, v] : nz_) acc += v * std::exp(-s * std::log(static_cast<real>(n)));
        return acc.value();
    }

private:
    std::uint64_t M_ = 1;
    std::string label_;
    std::vector<std::pair<std::uint64_t, real>> nz_;
    std::vector<real> dense_;
};

// ---------------------------------------------------------------------------
// resonator coefficients

struct ResonatorParams {
    std::uint64_t M = 3;
    real L = 0;
    real support_lo = 0;
    real support_hi = 0;
    std::optional<std::pair<real, real>> override_interval;

    static ResonatorParams for_M(std::uint64_t M, std::optional<std::pair<real, real>> override_interval = {}) {
        if (M < 3) throw DomainError("resonator needs M >= 3");
        ResonatorParams r;
        r.M = M;
        real lm = std::log(static_cast<real>(M));
        r.L = std::sqrt(lm * std::log(lm));
        r.support_lo = r.L * r.L;
        real ll = std::log(r.L);
        r.support_hi = std::exp(ll * ll);
        r.override_interval = override_interval;
        return r;
    }

    std::pair<real, real> window() const {
        return override_interval ? *override_interval : std::pair{support_lo, support_hi};
    }
    bool default_support() const { return !override_interval; }
};

inline std::vector<std::uint64_t> resonator_primes(const ResonatorParams& rp) {
    auto [lo, hi] = rp.window();
    std::vector<std::uint64_t> ps;
    if (hi < lo || hi < 2) return ps;
    auto top = static_cast<std::uint64_t>(std::floor(std::min<real>(hi, static_cast<real>(rp.M))));
    auto sieve = sieve_up_to(top);
    for (auto p : sieve->primes()) {
        if (p > top) break;
        if (p >= lo) ps.push_back(p);
    }
    return ps;
}

inline CoefficientVector resonator(const ResonatorParams& rp) {
    if (rp.M < 3) throw DomainError("resonator needs M >= 3");
    auto ps = resonator_primes(rp);
    std::vector<real> fp;
    for (auto p : ps) fp.push_back(rp.L / std::log(static_cast<real>(p)));
    std::vector<std::pair<std::uint64_t, real>> e;
    // squarefree products of window primes up to M, multiplied in prime order
    auto walk = [&](auto&& self, std::size_t i, std::uint64_t n, real f) -> void {
        e.push_back({n, f});
        for (std::size_t j = i; j < ps.size(); ++j) {
            if (n > rp.M / ps[j]) break;
            self(self, j + 1, n * ps[j], f * fp[j]);
        }
    };
    walk(walk, 0, 1, 1);
    std::string label = rp.default_support() ? "resonator" : "resonator[override]";
    return {rp.M, std::move(e), label};
}

// x_n = mu(n) P(log(M/n)/log M)
inline CoefficientVector divisor_coefficients(std::uint64_t M, const Polynomial& P) {
    if (M < 2) throw DomainError("divisor coefficients need M >= 2");
    if (M > dense_coeff_cap) throw BudgetError("M beyond the dense coefficient cap");
    auto sieve = sieve_up_to(M);
    std::vector<real> t(M + 1, 0);
    real lM = std::log(static_cast<real>(M));
    for (std::uint64_t n = 1; n <= M; ++n) {
        int mu = mobius(sieve->factor(n));
        if (mu) t[n] = mu * P(std::log(static_cast<real>(M) / n) / lM);
    }
    return CoefficientVector::dense(std::move(t), "divisor");
}

// ---------------------------------------------------------------------------
// norms

struct Norms {
    real sup = 0;
    real l1 = 0;
    real l1_over_n = 0;
    real l2_over_n = 0;
};

inline Norms norms(const CoefficientVector& c) {
    Norms r;
    Compensated l1, l1n, l2n;
    for (auto& [n, v] : c.nonzeros()) {
        r.sup = std::max(r.sup, std::fabs(v));
        l1 += std::fabs(v);
        l1n += std::fabs(v) / n;
        l2n += v * v / n;
    }
    r.l1 = l1.value();
    r.l1_over_n = l1n.value();
    r.l2_over_n = l2n.value();
    return r;
}

// sum_{n<=M} w(n) (tau_r * c)(n) c_n / n
inline real convolved_norm(const CoefficientVector& c, int r, const ArithFn& weight) {
    if (r < 1) throw DomainError("convolved_norm needs r >= 1");
    Compensated s;
    if (c.is_dense()) {
        std::vector<real> ct(c.M() + 1, 0);
        for (auto& [n, v] : c.nonzeros()) ct[n] = v;
        auto conv = dirichlet_convolve(std::span<const real>(ct), std::span<const real>(fn::tau(r).table(c.M())));
        auto sieve = sieve_up_to(c.M());
        for (auto& [n, v] : c.nonzeros()) s += weight(sieve->factor(n)) * conv[n] * v / n;
    } else {
        for (auto& [n, v] : c.nonzeros()) {
            FactoredInteger f = factor(n);
            real conv = 0;
            for (auto d : f.divisors()) conv += c(d) * tau_r(factor(n / d), r);
            s += weight(f) * conv * v / n;
        }
    }
    return s.value();
}

}  // namespace zmoments
