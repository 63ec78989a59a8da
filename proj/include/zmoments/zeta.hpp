#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <vector>

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/factorials.hpp>

#include "arith.hpp"
#include "common.hpp"

namespace zmoments {

struct PrecisionConfig {
    real target_abs_error = 1e-14L;
    int euler_maclaurin_terms = 0;  // minimum N; raised automatically with |Im s|
    int bernoulli_order = 120;      // largest 2k used in tail corrections

    void validate() const {
        if (!(target_abs_error > 0)) throw DomainError("target_abs_error must be positive");
        if (bernoulli_order < 2 || bernoulli_order % 2) throw DomainError("bernoulli_order must be even and >= 2");
        if (euler_maclaurin_terms < 0) throw DomainError("euler_maclaurin_terms must be >= 0");
    }
};

namespace detail {

// B_{2k}/(2k)! for k = 1..K
inline const std::vector<real>& bernoulli_over_factorial() {
    static const std::vector<real> t = [] {
        std::vector<real> v(1, 0);
        for (int k = 1; k <= 160; ++k)
            v.push_back(boost::math::bernoulli_b2n<real>(k) / boost::math::factorial<real>(2 * k));
        return v;
    }();
    return t;
}

inline bool is_nonpositive_integer(cplx z) {
    return z.imag() == 0 && z.real() <= 0 && z.real() == std::floor(z.real());
}

// log sin z and log cos z without overflow for large |Im z| (branch unspecified)
inline cplx log_sin(cplx z) {
    const cplx i(0, 1);
    if (z.imag() > 1) return -i * z + std::log(cplx(0, 0.5L)) + std::log(real(1) - std::exp(real(2) * i * z));
    if (z.imag() < -1) return i * z - std::log(cplx(0, 2)) + std::log(real(1) - std::exp(real(-2) * i * z));
    return std::log(std::sin(z));
}

inline cplx log_cos(cplx z) {
    const cplx i(0, 1);
    if (z.imag() > 1) return -i * z - std::log(real(2)) + std::log(real(1) + std::exp(real(2) * i * z));
    if (z.imag() < -1) return i * z - std::log(real(2)) + std::log(real(1) + std::exp(real(-2) * i * z));
    return std::log(std::cos(z));
}

inline cplx tan_stable(cplx z) {
    const cplx i(0, 1);
    if (z.imag() > 1) {
        cplx w = std::exp(real(2) * i * z);
        return i * (real(1) - w) / (real(1) + w);
    }
    if (z.imag() < -1) {
        cplx w = std::exp(real(-2) * i * z);
        return -i * (real(1) - w) / (real(1) + w);
    }
    return std::tan(z);
}

inline cplx cot_stable(cplx z) { return real(1) / tan_stable(z); }

}  // namespace detail

// log Gamma on the principal (continuous-in-Im) branch for Re z >= 0;
// reflection below.
inline cplx log_gamma(cplx z) {
    if (detail::is_nonpositive_integer(z)) throw DomainError("Gamma has a pole at a nonpositive integer");
    if (z.real() < 0) return std::log(pi) - detail::log_sin(pi * z) - log_gamma(real(1) - z);
    cplx shift = 0;
    while (std::abs(z) < 18 || z.real() < 10) {
        shift += std::log(z);
        z += real(1);
    }
    const auto& bf = detail::bernoulli_over_factorial();
    cplx s = (z - real(0.5)) * std::log(z) - z + real(0.5) * std::log(two_pi);
    cplx zinv = real(1) / z, zinv2 = zinv * zinv, zp = zinv;
    for (int k = 1; k <= 12; ++k) {
        // B_{2k} / (2k (2k-1) z^{2k-1})
        real c = bf[k] * boost::math::factorial<real>(2 * k) / (2 * k * (2 * k - 1));
        s += c * zp;
        zp *= zinv2;
    }
    return s - shift;
}

inline cplx digamma(cplx z) {
    if (detail::is_nonpositive_integer(z)) throw DomainError("digamma has a pole at a nonpositive integer");
    if (z.real() < 0) return digamma(real(1) - z) - pi * detail::cot_stable(pi * z);
    cplx shift = 0;
    while (std::abs(z) < 18 || z.real() < 10) {
        shift += real(1) / z;
        z += real(1);
    }
    const auto& bf = detail::bernoulli_over_factorial();
    cplx s = std::log(z) - real(0.5) / z;
    cplx zinv2 = real(1) / (z * z), zp = zinv2;
    for (int k = 1; k <= 12; ++k) {
        real c = bf[k] * boost::math::factorial<real>(2 * k) / (2 * k);
        s -= c * zp;
        zp *= zinv2;
    }
    return s - shift;
}

namespace detail {

// log n and n^{-1/2} for n < size, grown on demand and never shrunk.
struct LogTable {
    std::vector<real> ln, inv_sqrt;
};

inline std::shared_ptr<const LogTable> log_table(std::size_t n) {
    static std::mutex mu;
    static std::shared_ptr<const LogTable> cached;
    std::lock_guard lock(mu);
    if (!cached || cached->ln.size() < n) {
        auto t = std::make_shared<LogTable>();
        std::size_t m = std::max<std::size_t>(n, 4096);
        t->ln.resize(m);
        t->inv_sqrt.resize(m);
        for (std::size_t k = 1; k < m; ++k) {
            t->ln[k] = std::log(static_cast<real>(k));
            t->inv_sqrt[k] = 1 / std::sqrt(static_cast<real>(k));
        }
        cached = std::move(t);
    }
    return cached;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Euler-Maclaurin core. Returns zeta(s) and, if wanted, zeta'(s).

struct ZetaPair {
    cplx value;
    cplx derivative;
};

inline ZetaPair zeta_euler_maclaurin(cplx s, const PrecisionConfig& cfg = {}, bool with_derivative = true) {
    cfg.validate();
    if (std::abs(s - real(1)) < 1e-8L) throw DomainError("zeta has a pole at s = 1");
    const real sigma = s.real(), t = s.imag();
    // (|s|/2pi N)^2 ~ 0.44 is the per-term decay of the tail corrections
    int N = std::max<int>(cfg.euler_maclaurin_terms,
                          static_cast<int>(std::ceil(0.75L * std::abs(s) / pi)) + 10);
    if (sigma < 0) N += static_cast<int>(-sigma);

    // plain long double accumulation: ~1e-19 per term is far below the target
    real zr = 0, zi = 0, dr = 0, di = 0, mag = 0;
    auto tab = detail::log_table(N);
    auto sieve = sieve_up_to(N);
    const bool half = sigma == 0.5L;
    // n^{-it} is completely multiplicative: one sincos per prime, products elsewhere
    thread_local std::vector<cplx> w;
    w.resize(N);
    if (N > 1) w[1] = 1;
    for (int n = 2; n < N; ++n) {
        std::uint32_t p = sieve->spf(n);
        if (p == static_cast<std::uint32_t>(n)) {
            real sn, cs;
            sincosl(t * tab->ln[n], &sn, &cs);
            w[n] = cplx(cs, -sn);
        } else {
            w[n] = w[p] * w[n / p];
        }
    }
    for (int n = 1; n < N; ++n) {
        real ln = tab->ln[n];
        real a = half ? tab->inv_sqrt[n] : std::exp(-sigma * ln);
        real cs = w[n].real(), sn = -w[n].imag();
        zr += a * cs;
        zi -= a * sn;
        mag += a;
        if (with_derivative) {
            dr -= ln * a * cs;
            di += ln * a * sn;
        }
    }
    CompensatedC z, dz;
    z += cplx(zr, zi);
    dz += cplx(dr, di);
    const real lN = std::log(static_cast<real>(N));
    const cplx Ns = std::exp(-s * lN);  // N^{-s}
    const cplx sm1 = s - real(1);
    z += static_cast<real>(N) * Ns / sm1 + real(0.5) * Ns;
    if (with_derivative)
        dz += -static_cast<real>(N) * Ns * lN / sm1 - static_cast<real>(N) * Ns / (sm1 * sm1) -
              real(0.5) * lN * Ns;

    // tail: sum_k B_{2k}/(2k)! (s)_{2k-1} N^{-s-2k+1}
    const auto& bf = detail::bernoulli_over_factorial();
    const int K = std::min<int>(cfg.bernoulli_order / 2, static_cast<int>(bf.size()) - 1);
    cplx P = s, dP = 1;      // (s)_{2k-1} and its derivative
    cplx Np = Ns / static_cast<real>(N);  // N^{-s-1}
    const real invN2 = real(1) / (static_cast<real>(N) * N);
    const real goal = cfg.target_abs_error / 10;
    bool converged = false;
    for (int k = 1; k <= K; ++k) {
        cplx T = bf[k] * P * Np;
        z += T;
        real size = std::abs(T);
        if (with_derivative) {
            cplx dT = bf[k] * (dP - P * lN) * Np;
            dz += dT;
            size = std::max(size, std::abs(dT));
        }
        if (size < goal) {
            converged = true;
            break;
        }
        cplx a = s + real(2 * k - 1), b = s + real(2 * k);
        dP = dP * a * b + P * (a + b);
        P = P * a * b;
        Np *= invN2;
    }
    if (!converged) throw PrecisionError("Euler-Maclaurin tail did not reach the target within bernoulli_order");
    // rounding floor of the main sum
    real floor_est = 16 * std::numeric_limits<real>::epsilon() * mag * (with_derivative ? lN + 1 : 1);
    if (cfg.target_abs_error < floor_est) throw PrecisionError("target below the rounding floor at this height");
    return {z.value(), dz.value()};
}

// ---------------------------------------------------------------------------
// chi(s) with zeta(s) = chi(s) zeta(1-s)

namespace detail {

// Sine form chi(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s): regular for Re s < 1.
inline cplx log_chi_sin_form(cplx s) {
    return s * std::log(two_pi) - std::log(pi) + log_sin(pi * s / real(2)) + log_gamma(real(1) - s);
}

// Cosine form chi(s) = (2 pi)^s / (2 Gamma(s) cos(pi s/2)): used for Re s >= 1/2.
inline cplx log_chi_cos_form(cplx s) {
    return s * std::log(two_pi) - std::log(real(2)) - log_gamma(s) - log_cos(pi * s / real(2));
}

inline bool is_odd_positive_integer(cplx s) {
    return s.imag() == 0 && s.real() > 0 && s.real() == std::floor(s.real()) &&
           static_cast<long long>(s.real()) % 2 == 1;
}

inline bool is_even_nonpositive_integer(cplx s) {
    return s.imag() == 0 && s.real() <= 0 && s.real() == std::floor(s.real()) &&
           static_cast<long long>(-s.real()) % 2 == 0;
}

}  // namespace detail

inline cplx chi(cplx s) {
    if (detail::is_odd_positive_integer(s)) throw DomainError("chi has a pole at odd positive integers");
    if (detail::is_even_nonpositive_integer(s)) return 0;
    return std::exp(s.real() >= 0.5L ? detail::log_chi_cos_form(s) : detail::log_chi_sin_form(s));
}

inline cplx chi_log_deriv(cplx s) {
    if (detail::is_odd_positive_integer(s) || detail::is_even_nonpositive_integer(s))
        throw DomainError("chi'/chi has a pole here");
    if (s.real() >= 0.5L) return std::log(two_pi) - digamma(s) + pi / 2 * detail::tan_stable(pi * s / real(2));
    return std::log(two_pi) + pi / 2 * detail::cot_stable(pi * s / real(2)) - digamma(real(1) - s);
}

// chi'(s), regular for Re s < 1 including the zeros of chi
inline cplx chi_prime_left(cplx s) {
    cplx w = pi * s / real(2);
    cplx g = std::exp(s * std::log(two_pi) - std::log(pi) + log_gamma(real(1) - s));
    return g * ((std::log(two_pi) - digamma(real(1) - s)) * std::sin(w) + pi / 2 * std::cos(w));
}

// ---------------------------------------------------------------------------
// zeta, zeta'

inline cplx zeta(cplx s, const PrecisionConfig& cfg = {}) {
    if (std::abs(s - real(1)) < 1e-8L) throw DomainError("zeta has a pole at s = 1");
    if (s.real() >= 0.5L || std::abs(s) < 0.25L) return zeta_euler_maclaurin(s, cfg, false).value;
    return chi(s) * zeta_euler_maclaurin(real(1) - s, cfg, false).value;
}

inline cplx zeta_prime(cplx s, const PrecisionConfig& cfg = {}) {
    if (std::abs(s - real(1)) < 1e-8L) throw DomainError("zeta has a pole at s = 1");
    if (s.real() >= 0.5L || std::abs(s) < 0.25L) return zeta_euler_maclaurin(s, cfg, true).derivative;
    // zeta'(s) = chi'(s) zeta(1-s) - chi(s) zeta'(1-s)
    auto r = zeta_euler_maclaurin(real(1) - s, cfg, true);
    cplx c = chi(s);
    cplx cp = std::abs(s.imag()) < 1 ? chi_prime_left(s) : c * chi_log_deriv(s);
    return cp * r.value - c * r.derivative;
}

inline cplx zeta_log_deriv(cplx s, const PrecisionConfig& cfg = {}) {
    if (s.real() >= 0.5L || std::abs(s) < 0.25L) {
        auto r = zeta_euler_maclaurin(s, cfg, true);
        return r.derivative / r.value;
    }
    auto r = zeta_euler_maclaurin(real(1) - s, cfg, true);
    return chi_log_deriv(s) - r.derivative / r.value;
}

// ---------------------------------------------------------------------------
// Riemann-Siegel theta and Hardy Z

// theta(t) = Im log Gamma(1/4 + it/2) - (t/2) log pi, any t > 0
inline real theta_exact(real t) {
    return log_gamma(cplx(0.25L, t / 2)).imag() - t / 2 * std::log(pi);
}

// asymptotic expansion, t >= 10:
// (t/2) log(t/2pi) - t/2 - pi/8 + sum_k (1 - 2^{1-2k}) |B_2k| / (4k(2k-1) t^{2k-1})
inline real theta_rs(real t) {
    if (t < 10) throw DomainError("theta_rs: asymptotic series used only for t >= 10");
    static const std::array<real, 10> c = [] {
        std::array<real, 10> a{};
        for (int k = 1; k <= 10; ++k) {
            real b = std::fabs(boost::math::bernoulli_b2n<real>(k));
            a[k - 1] = (1 - std::ldexp(real(1), 1 - 2 * k)) * b / (4 * k * (2 * k - 1));
        }
        return a;
    }();
    real s = t / 2 * std::log(t / two_pi) - t / 2 - pi / 8;
    real tinv = 1 / t, tinv2 = tinv * tinv, tp = tinv;
    for (real ck : c) {
        s += ck * tp;
        tp *= tinv2;
    }
    return s;
}

inline real theta(real t) { return t >= 10 ? theta_rs(t) : theta_exact(t); }

inline real hardy_z(real t, const PrecisionConfig& cfg = {}) {
    if (!(t > 0)) throw DomainError("hardy_z needs t > 0");
    cplx z = zeta_euler_maclaurin(cplx(0.5L, t), cfg, false).value;
    real th = theta(t);
    return (std::polar<real>(1, th) * z).real();
}

}  // namespace zmoments
