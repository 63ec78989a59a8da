#pragma once

#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "common.hpp"

namespace zmoments {

struct QuadratureOptions {
    real abs_tol = 1e-6L;
    int max_depth = 12;   // bisections per panel
    unsigned threads = 0;
};

struct QuadratureResult {
    cplx value;
    real error = 0;
    std::size_t panels = 0;
    std::size_t evaluations = 0;
};

namespace detail {

template <class F>
cplx gk15_adaptive(const F& f, real a, real b, real tol, int depth, real& err, std::size_t& evals) {
    using GK = boost::math::quadrature::gauss_kronrod<real, 15>;
    real e = 0;
    cplx v = GK::integrate(f, a, b, 0, 0, &e);
    evals += 15;
    if (e <= tol || depth == 0) {
        err += e;
        if (e > tol) err = INFINITY;
        return v;
    }
    real m = (a + b) / 2;
    return gk15_adaptive(f, a, m, tol / 2, depth - 1, err, evals) +
           gk15_adaptive(f, m, b, tol / 2, depth - 1, err, evals);
}

}  // namespace detail

// Integral of f over [a, b] split into panels no wider than pi / (2 max_freq),
// each refined adaptively with Gauss-Kronrod 7/15 until its share of abs_tol
// is met.
inline QuadratureResult oscillatory_integrate(const std::function<cplx(real)>& f, real a, real b, real max_freq,
                                              const QuadratureOptions& opt = {}) {
    if (!(b >= a)) throw DomainError("integration interval reversed");
    if (!(max_freq > 0)) throw DomainError("max_freq must be positive");
    QuadratureResult r;
    if (b == a) return r;
    const real width = pi / (2 * max_freq);
    const auto n = static_cast<std::size_t>(std::ceil((b - a) / width));
    std::vector<cplx> part(n);
    std::vector<real> errs(n, 0);
    std::vector<std::size_t> evals(n, 0);
    parallel_for(
        n,
        [&](std::size_t i) {
            real lo = a + (b - a) * i / n, hi = i + 1 == n ? b : a + (b - a) * (i + 1) / n;
            part[i] = detail::gk15_adaptive(f, lo, hi, opt.abs_tol / n, opt.max_depth, errs[i], evals[i]);
        },
        opt.threads);
    CompensatedC s;
    for (std::size_t i = 0; i < n; ++i) {
        s += part[i];
        r.error += errs[i];
        r.evaluations += evals[i];
    }
    r.value = s.value();
    r.panels = n;
    if (!std::isfinite(static_cast<double>(r.error)))
        throw QuadratureError("quadrature did not converge to the requested tolerance");
    return r;
}

}  // namespace zmoments
