#pragma once

#include <random>
#include <string>
#include <vector>

#include "arith.hpp"
#include "characters.hpp"
#include "coeffs.hpp"

namespace zmoments {

struct IdentityResult {
    std::string name;
    real max_residual = 0;
    real tolerance = 0;
    std::size_t cases = 0;
    bool pass() const { return max_residual <= tolerance; }
};

namespace detail {
struct Tracker {
    IdentityResult r;
    void operator()(real residual) {
        ++r.cases;
        if (!(residual <= r.max_residual)) r.max_residual = std::isnan(static_cast<double>(residual)) ? INFINITY : residual;
    }
};
}  // namespace detail

// Möbius / von Mangoldt divisor-sum identities and the phi_j closed forms, n <= N.
inline std::vector<IdentityResult> arith_identity_suite(std::uint64_t N, real tol = 1e-9L) {
    std::vector<detail::Tracker> t(6);
    const char* names[] = {"sum mu(d) = [n=1]",
                           "sum mu(d) log d = -Lambda(n)",
                           "sum mu(d) log^2 d = -2 log n Lambda(n) + Lambda_2(n)",
                           "sum mu(d) log d log e = log n Lambda(n) - Lambda_2(n)",
                           "Lambda_2 = Lambda log + Lambda*Lambda",
                           "phi_1..phi_4 closed form = divisor sum"};
    for (int i = 0; i < 6; ++i) t[i].r = {names[i], 0, tol, 0};
    if (N >= 1) {
        auto sieve = sieve_up_to(N);
        auto LL = dirichlet_convolve(fn::von_mangoldt(), fn::von_mangoldt(), N);
        for (std::uint64_t n = 1; n <= N; ++n) {
            auto fn_ = sieve->factor(n);
            real ln = fn_.log(), L = von_mangoldt(fn_), L2 = lambda_k(fn_, 2);
            Compensated s0, s1, s2, s3;
            for (auto [d, mu] : fn_.squarefree_divisors()) {
                real ld = std::log(static_cast<real>(d)), le = ln - ld;
                s0 += mu;
                s1 += mu * ld;
                s2 += mu * ld * ld;
                s3 += mu * ld * le;
            }
            t[0](std::fabs(s0.value() - (n == 1)));
            t[1](std::fabs(s1.value() + L));
            t[2](std::fabs(s2.value() - (-2 * ln * L + L2)));
            t[3](std::fabs(s3.value() - (ln * L - L2)));
            t[4](std::fabs(L2 - (L * ln + LL[n])));
            for (int j = 1; j <= 4; ++j) t[5](std::fabs(phi_j(fn_, j) - phi_j_definitional(fn_, j)));
        }
    }
    std::vector<IdentityResult> out;
    for (auto& x : t) out.push_back(x.r);
    return out;
}

// Additive-character decomposition (k <= k_add), primitive expansion (k <= k_prim),
// |tau|^2 = q for primitive characters (q <= q_gauss), induced Gauss sums (k' <= k_induced).
inline std::vector<IdentityResult> character_identity_suite(std::uint64_t k_add = 60, std::uint64_t k_prim = 40,
                                                            std::uint64_t q_gauss = 60, std::uint64_t k_induced = 40,
                                                            real tol = 1e-10L) {
    detail::Tracker add, prim, gauss, ind;
    add.r = {"e(-m/k) = mu/phi + nonprincipal part", 0, tol, 0};
    prim.r = {"primitive-character expansion", 0, tol, 0};
    gauss.r = {"|tau(psi)|^2 = q for primitive psi", 0, tol, 0};
    ind.r = {"tau(chi) = mu(k'/q) psi(k'/q) tau(psi)", 0, tol, 0};
    for (std::uint64_t k = 2; k <= k_add; ++k)
        for (std::uint64_t m = 1; m <= k; ++m) add(additive_decomposition_check(m, k));
    for (std::uint64_t k = 2; k <= k_prim; ++k)
        for (std::uint64_t m = 1; m <= k; ++m) prim(primitive_decomposition_check(m, k));
    for (std::uint64_t q = 1; q <= q_gauss; ++q) {
        CharacterTable t(q);
        for (const auto& psi : t.characters())
            if (psi.primitive()) gauss(std::fabs(std::norm(gauss_sum(psi)) - real(q)));
    }
    for (std::uint64_t k = 1; k <= k_induced; ++k) {
        CharacterTable t(k);
        for (const auto& chi : t.characters()) ind(induced_gauss_sum_check(chi, inducing_primitive(chi)));
    }
    return {add.r, prim.r, gauss.r, ind.r};
}

// Resonator multiplicativity: bit-exact for prime pairs, within 8 ulp otherwise.
inline IdentityResult resonator_multiplicativity(std::uint64_t M = 5000) {
    IdentityResult r{"resonator f(mn) = f(m) f(n), (m,n) = 1", 0, 8 * std::numeric_limits<real>::epsilon(), 0};
    auto f = resonator(ResonatorParams::for_M(M, std::pair<real, real>{3, 40}));
    auto sieve = sieve_up_to(M);
    for (std::uint64_t m = 1; m <= M; ++m) {
        if (f(m) == 0) continue;
        auto fm = sieve->factor(m);
        for (std::uint64_t n = 1; m * n <= M; ++n) {
            if (std::gcd(m, n) != 1 || f(n) == 0) continue;
            ++r.cases;
            real prod = f(m) * f(n), v = f(m * n);
            bool pair = m == 1 || n == 1 || (fm.omega() == 1 && sieve->factor(n).omega() == 1);
            real rel = std::fabs(v - prod) / std::fabs(v);
            if (pair && v != prod) rel = INFINITY;
            r.max_residual = std::max(r.max_residual, rel);
        }
    }
    return r;
}

// Sieve-based convolution tables against direct per-n divisor sums, n <= N.
inline IdentityResult convolution_oracle(std::uint64_t N = 1000) {
    IdentityResult r{"Dirichlet convolution = direct divisor sums", 0, 1e-12L, 0};
    std::vector<std::pair<ArithFn, ArithFn>> pairs{{fn::von_mangoldt(), fn::log()},
                                                   {fn::mobius(), fn::one()},
                                                   {fn::von_mangoldt(), fn::von_mangoldt()},
                                                   {fn::mobius(), fn::log()}};
    auto sieve = sieve_up_to(N);
    for (auto& [f, g] : pairs) {
        auto tab = dirichlet_convolve(f, g, N);
        for (std::uint64_t n = 1; n <= N; ++n) {
            Compensated s;
            for (std::uint64_t d = 1; d <= n; ++d)
                if (n % d == 0) s += f(sieve->factor(d)) * g(sieve->factor(n / d));
            ++r.cases;
            r.max_residual = std::max(r.max_residual, std::fabs(s.value() - tab[n]));
        }
    }
    return r;
}

}  // namespace zmoments
