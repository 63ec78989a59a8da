#pragma once

#include <vector>

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/factorials.hpp>

#include "common.hpp"

namespace zmoments {

// gamma_n = lim_N (sum_{k<=N} (log k)^n / k - (log N)^{n+1}/(n+1)), by
// Euler-Maclaurin at cut N with derivative corrections of (log x)^n / x.
inline real stieltjes(int n, int N = 40, int terms = 20) {
    if (n < 0) throw DomainError("stieltjes needs n >= 0");
    auto f = [n](real x) { return std::pow(std::log(x), n) / x; };
    Compensated s;
    for (int k = 1; k < N; ++k) s += f(k);
    const real lN = std::log(static_cast<real>(N));
    s += f(N) / 2;
    s += -std::pow(lN, n + 1) / (n + 1);
    // f^{(m)}(x) = x^{-1-m} sum_i c[i] (log x)^i
    std::vector<real> c(n + 1, 0);
    c[n] = 1;
    real xpow = 1 / static_cast<real>(N);
    for (int m = 0; m < 2 * terms; ++m) {
        std::vector<real> d(n + 1, 0);
        for (int i = 0; i <= n; ++i) {
            d[i] += -(1 + m) * c[i];
            if (i + 1 <= n) d[i] += (i + 1) * c[i + 1];
        }
        c = std::move(d);
        xpow /= N;
        // c now describes f^{(m+1)}; odd derivatives enter
        if ((m + 1) % 2 == 1) {
            int j = (m + 2) / 2;
            real poly = 0;
            for (int i = n; i >= 0; --i) poly = poly * lN + c[i];
            real b = boost::math::bernoulli_b2n<real>(j) / boost::math::factorial<real>(2 * j);
            s += -b * xpow * poly;
        }
    }
    return s.value();
}

// Truncated Laurent series sum_{i} c[i] w^{v+i}.
struct Laurent {
    int v = 0;
    std::vector<real> c;

    int order() const { return v + static_cast<int>(c.size()); }  // first omitted power
    real coeff(int k) const {
        int i = k - v;
        return i >= 0 && i < static_cast<int>(c.size()) ? c[i] : 0;
    }

    friend Laurent operator*(const Laurent& a, const Laurent& b) {
        Laurent r;
        r.v = a.v + b.v;
        int n = std::min(a.order() - a.v + b.v, b.order() - b.v + a.v) - r.v;
        r.c.assign(std::max(n, 0), 0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j)
                if (j < static_cast<int>(a.c.size()) && i - j < static_cast<int>(b.c.size()))
                    r.c[i] += a.c[j] * b.c[i - j];
        return r;
    }

    Laurent inverse() const {
        if (c.empty() || c[0] == 0) throw DomainError("Laurent inverse needs a nonzero leading coefficient");
        Laurent r;
        r.v = -v;
        r.c.assign(c.size(), 0);
        r.c[0] = 1 / c[0];
        for (std::size_t i = 1; i < c.size(); ++i) {
            real s = 0;
            for (std::size_t j = 1; j <= i; ++j) s += c[j] * r.c[i - j];
            r.c[i] = -s / c[0];
        }
        return r;
    }

    friend Laurent operator/(const Laurent& a, const Laurent& b) { return a * b.inverse(); }

    Laurent derivative() const {
        Laurent r;
        r.v = v - 1;
        r.c.resize(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) r.c[i] = (v + static_cast<int>(i)) * c[i];
        return r;
    }
};

// zeta(1 + w) = 1/w + sum_n (-1)^n gamma_n / n! w^n, through w^{n_terms - 1}
inline Laurent zeta_laurent(int n_terms, const std::vector<real>& gammas) {
    if (static_cast<int>(gammas.size()) < n_terms) throw DomainError("not enough Stieltjes constants");
    Laurent z;
    z.v = -1;
    z.c.assign(n_terms + 1, 0);
    z.c[0] = 1;
    for (int n = 0; n < n_terms; ++n)
        z.c[n + 1] = (n % 2 ? -1 : 1) * gammas[n] / boost::math::factorial<real>(n);
    return z;
}

// x^{1+w} / (1+w) around w = 0, divided by x
inline Laurent perron_kernel(real log_x, int n_terms) {
    Laurent e;
    e.c.assign(n_terms, 0);
    real t = 1;
    for (int i = 0; i < n_terms; ++i) {
        e.c[i] = t;
        t *= log_x / (i + 1);
    }
    Laurent g;
    g.c.assign(n_terms, 0);
    for (int i = 0; i < n_terms; ++i) g.c[i] = i % 2 ? -1 : 1;
    return e * g;
}

// Laurent coefficients of zeta'(z)^2/zeta(z) = (z-1)^{-3} (1 + a1 (z-1) + a2 (z-1)^2 + ...)
struct LaurentCoefficients {
    real gamma0, gamma1, gamma2;
    real a1, a2;
    Laurent series;  // zeta'^2/zeta about z = 1
};

inline LaurentCoefficients zeta_prime_sq_over_zeta_laurent() {
    std::vector<real> g{stieltjes(0), stieltjes(1), stieltjes(2)};
    Laurent z = zeta_laurent(3, g);
    Laurent zp = z.derivative();
    Laurent f = zp * zp / z;
    LaurentCoefficients r{g[0], g[1], g[2], f.coeff(-2), f.coeff(-1), f};
    return r;
}

// Res_{z=1} F(z) x^z / z for F with a pole of order <= 3, as a multiple of x
inline real residue_over_x(const Laurent& F, real log_x) {
    Laurent k = perron_kernel(log_x, 4);
    return (F * k).coeff(-1);
}

}  // namespace zmoments
