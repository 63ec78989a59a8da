#pragma once

#include <optional>
#include <sstream>
#include <vector>

#include <boost/math/special_functions/lambert_w.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "zeta.hpp"

namespace zmoments {

struct ZeroList {
    real T = 0;
    std::vector<real> gammas;
    bool certified = false;
    real abs_error = 0;

    std::size_t size() const { return gammas.size(); }

    // ordinates strictly below t
    std::size_t count_below(real t) const {
        return static_cast<std::size_t>(std::lower_bound(gammas.begin(), gammas.end(), t) - gammas.begin());
    }

    void validate() const {
        for (std::size_t i = 0; i < gammas.size(); ++i) {
            if (!(gammas[i] > 0) || !(gammas[i] < T)) throw DomainError("zero ordinate outside (0, T)");
            if (i > 0 && !(gammas[i] > gammas[i - 1])) throw DomainError("zero ordinates not strictly increasing");
        }
    }
};

// Diagnostics of the completeness certificate.
struct ZeroCertificate {
    long argument_count = -1;   // N(T) from theta/pi + 1 + S(T)
    real argument_raw = 0;      // the unrounded value
    long turing_gram_index = 0; // n with N(g_n) = n + 1 established
    real turing_gram_point = 0;
    long turing_found = -1;     // zeros located below that Gram point
    int turing_blocks = 0;      // K Rosser blocks used after g_n
    bool turing_applicable = false;
    std::size_t gram_blocks = 0;
    std::size_t densified_blocks = 0;
};

// ---------------------------------------------------------------------------
// Gram points: theta(g_n) = n pi

inline real gram_point(long n) {
    // g ~ 2 pi (n + 1/8) / W((n + 1/8)/e), then Newton on theta
    real g;
    if (n >= 0) {
        real a = (n + 0.125L) / std::numbers::e_v<real>;
        g = two_pi * (n + 0.125L) / boost::math::lambert_w0(a);
    } else {
        g = 9.6669L + 6 * (n + 1);
    }
    for (int it = 0; it < 60; ++it) {
        real f = theta(g) - n * pi;
        real d = std::log(g / two_pi) / 2;
        if (d < 0.05L) d = 0.05L;
        real step = f / d;
        g -= step;
        if (std::fabs(step) < 1e-15L * g) break;
    }
    return g;
}

// ---------------------------------------------------------------------------
// N(T) by the argument principle: theta(T)/pi + 1 + (1/pi) arg zeta(1/2 + iT),
// arg tracked continuously along sigma from 3 down to 1/2.

inline real argument_count_raw(real T, const PrecisionConfig& cfg = {}) {
    real sigma = 3;
    cplx z = zeta_euler_maclaurin(cplx(sigma, T), cfg, false).value;
    real arg = std::arg(z);  // Re zeta > 0 for sigma >= 3
    real step = 0.05L;
    while (sigma > 0.5L) {
        real next = std::max<real>(0.5L, sigma - step);
        cplx zn = zeta_euler_maclaurin(cplx(next, T), cfg, false).value;
        real d = std::arg(zn / z);
        if (std::fabs(d) > pi / 8 && step > 1e-6L) {
            step /= 4;
            continue;
        }
        arg += d;
        z = zn;
        sigma = next;
        step = std::min<real>(step * 2, 0.05L);
    }
    return theta(T) / pi + 1 + arg / pi;
}

namespace detail {

struct GramSample {
    long n;
    real g;
    real z;
    bool good() const { return (n % 2 == 0) == (z > 0); }
};

// Refine sign changes of Z on [a, b] given sample points; returns brackets.
inline std::vector<std::pair<real, real>> sign_change_brackets(const std::vector<real>& t, const std::vector<real>& z) {
    std::vector<std::pair<real, real>> br;
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
        if ((z[i] > 0) != (z[i + 1] > 0)) br.push_back({t[i], t[i + 1]});
    return br;
}

}  // namespace detail

struct FindZerosOptions {
    unsigned threads = 0;
    real width_tol = 1e-11L;  // final bracket width
};

inline ZeroList find_zeros(real T, const PrecisionConfig& cfg = {}, ZeroCertificate* cert_out = nullptr,
                           const FindZerosOptions& opt = {}) {
    if (!(T >= 15)) throw DomainError("find_zeros needs T >= 15");
    cfg.validate();
    auto Z = [&](real t) { return hardy_z(t, cfg); };

    const real turing_min = 168 * pi;
    const real g_end_est = T * 1.02L + 50;
    const real lg = std::log(g_end_est);
    const int K = std::max(1, static_cast<int>(std::ceil(0.0061L * lg * lg + 0.08L * lg)));

    // Gram samples, extended until K complete blocks lie beyond the first good point >= T
    std::vector<detail::GramSample> gs;
    auto extend_to = [&](long n_hi) {
        long n0 = gs.empty() ? -1 : gs.back().n + 1;
        if (n_hi < n0) return;
        std::vector<detail::GramSample> add(n_hi - n0 + 1);
        for (long n = n0; n <= n_hi; ++n) add[n - n0] = {n, gram_point(n), 0};
        parallel_for(add.size(), [&](std::size_t i) { add[i].z = Z(add[i].g); }, opt.threads);
        gs.insert(gs.end(), add.begin(), add.end());
    };
    long n_T = static_cast<long>(std::ceil(theta(T) / pi)) + 1;
    extend_to(n_T + 8);

    std::size_t idx_T = 0;  // index of first good Gram point at or beyond T
    std::size_t idx_end = 0;
    for (;;) {
        idx_T = 0;
        while (idx_T < gs.size() && !(gs[idx_T].g >= T && gs[idx_T].good())) ++idx_T;
        int blocks = 0;
        idx_end = idx_T;
        if (idx_T < gs.size())
            for (std::size_t i = idx_T + 1; i < gs.size() && blocks < K; ++i)
                if (gs[i].good()) {
                    ++blocks;
                    idx_end = i;
                }
        if (idx_T < gs.size() && blocks >= K) break;
        extend_to(gs.back().n + 16);
    }
    if (!gs[0].good()) throw CertificationError("first Gram point g_{-1} unexpectedly bad");

    // Rosser blocks between consecutive good Gram points
    struct Block {
        std::size_t lo, hi;  // indices into gs
        std::vector<std::pair<real, real>> brackets;
        bool densified = false;
    };
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < idx_end;) {
        std::size_t j = i + 1;
        while (!gs[j].good()) ++j;
        blocks.push_back({i, j, {}, false});
        i = j;
    }

    std::vector<std::string> failures(blocks.size());
    parallel_for(
        blocks.size(),
        [&](std::size_t b) {
            auto& blk = blocks[b];
            const std::size_t expected = blk.hi - blk.lo;
            std::vector<real> t, z;
            for (std::size_t i = blk.lo; i <= blk.hi; ++i) {
                t.push_back(gs[i].g);
                z.push_back(gs[i].z);
            }
            auto br = detail::sign_change_brackets(t, z);
            for (int factor = 4; br.size() < expected && factor <= 64; factor *= 4) {
                blk.densified = true;
                std::vector<real> t2, z2;
                for (std::size_t i = blk.lo; i < blk.hi; ++i) {
                    real a = gs[i].g, c = gs[i + 1].g;
                    for (int k = 0; k < factor; ++k) {
                        real u = a + (c - a) * k / factor;
                        t2.push_back(u);
                        z2.push_back(k == 0 ? gs[i].z : Z(u));
                    }
                }
                t2.push_back(gs[blk.hi].g);
                z2.push_back(gs[blk.hi].z);
                br = detail::sign_change_brackets(t2, z2);
            }
            if (br.size() != expected) {
                std::ostringstream os;
                os << "Gram block [g_" << gs[blk.lo].n << ", g_" << gs[blk.hi].n << ") = [" << double(gs[blk.lo].g)
                   << ", " << double(gs[blk.hi].g) << "): expected " << expected << " sign changes, found "
                   << br.size() << " after 64x densification";
                failures[b] = os.str();
                return;
            }
            blk.brackets = std::move(br);
        },
        opt.threads);
    for (auto& f : failures)
        if (!f.empty()) throw CertificationError(f);

    // refine
    std::vector<std::pair<real, real>> all;
    for (auto& blk : blocks) all.insert(all.end(), blk.brackets.begin(), blk.brackets.end());
    std::vector<real> roots(all.size());
    std::vector<real> widths(all.size());
    parallel_for(
        all.size(),
        [&](std::size_t i) {
            auto [a, b] = all[i];
            real za = Z(a), zb = Z(b);
            std::uintmax_t iters = 200;
            auto tol = [&](real x, real y) { return std::fabs(x - y) < opt.width_tol; };
            auto r = boost::math::tools::toms748_solve(Z, a, b, za, zb, tol, iters);
            roots[i] = (r.first + r.second) / 2;
            widths[i] = std::fabs(r.second - r.first) / 2;
        },
        opt.threads);
    for (std::size_t i = 1; i < roots.size(); ++i)
        if (!(roots[i] > roots[i - 1])) throw CertificationError("refined zeros not strictly increasing");

    ZeroCertificate cert;
    cert.gram_blocks = blocks.size();
    for (auto& b : blocks) cert.densified_blocks += b.densified;

    ZeroList out;
    out.T = T;
    for (std::size_t i = 0; i < roots.size(); ++i)
        if (roots[i] < T) {
            out.gammas.push_back(roots[i]);
            out.abs_error = std::max(out.abs_error, widths[i]);
        }
    out.abs_error += 1e-12L;  // allowance for the Z evaluation error near each root

    // (a) argument principle at T
    cert.argument_raw = argument_count_raw(T, cfg);
    cert.argument_count = std::lround(cert.argument_raw);
    if (std::fabs(cert.argument_raw - cert.argument_count) > 0.25L)
        throw CertificationError("argument-principle count at T is not near an integer (T too close to a zero?)");
    auto block_of_T = [&] {
        for (auto& b : blocks)
            if (gs[b.hi].g >= T) {
                std::ostringstream os;
                os << "[g_" << gs[b.lo].n << ", g_" << gs[b.hi].n << ")";
                return os.str();
            }
        return std::string("?");
    };
    if (cert.argument_count != static_cast<long>(out.gammas.size()))
        throw CertificationError("zero count " + std::to_string(out.gammas.size()) +
                                 " disagrees with argument-principle count " + std::to_string(cert.argument_count) +
                                 " near Gram block " + block_of_T());

    // (b) Turing/Brent: K Rosser blocks after a good g_n bound N(g_n) <= n + 1
    cert.turing_applicable = gs[idx_T].g >= turing_min;
    cert.turing_gram_index = gs[idx_T].n;
    cert.turing_gram_point = gs[idx_T].g;
    cert.turing_blocks = K;
    cert.turing_found = static_cast<long>(
        std::count_if(roots.begin(), roots.end(), [&](real r) { return r < gs[idx_T].g; }));
    if (cert.turing_applicable && cert.turing_found != gs[idx_T].n + 1)
        throw CertificationError("Turing count at g_" + std::to_string(gs[idx_T].n) + " expected " +
                                 std::to_string(gs[idx_T].n + 1) + ", located " + std::to_string(cert.turing_found));

    out.certified = true;
    if (cert_out) *cert_out = cert;
    return out;
}

// Moves T to the middle of the straddling zero gap when a zero lies within
// 1/log T of it.
inline real snap_endpoint(real T_raw, const ZeroList& zeros) {
    if (!(T_raw > 1)) throw DomainError("snap_endpoint needs T > 1");
    const real margin = 1 / std::log(T_raw);
    if (!zeros.certified || zeros.T < T_raw) throw DomainError("zeros are not certified beyond T_raw");
    const auto& g = zeros.gammas;
    std::size_t i = zeros.count_below(T_raw);  // g[i-1] < T_raw <= g[i]
    std::optional<real> lo, hi;
    if (i > 0) lo = g[i - 1];
    if (i < g.size()) hi = g[i];
    real d_lo = lo ? T_raw - *lo : INFINITY;
    real d_hi = hi ? *hi - T_raw : zeros.T - T_raw;
    if (d_lo > margin && d_hi > margin) return T_raw;
    if (!hi) throw DomainError("zero list does not extend far enough beyond T_raw to snap");
    if (!lo) return *hi - real(1.5) * margin;  // no zero below: step away from the first one
    return (*lo + *hi) / 2;
}

}  // namespace zmoments
