#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "arith.hpp"
#include "coeffs.hpp"
#include "laurent.hpp"
#include "poly.hpp"
#include "quadrature.hpp"
#include "zeros.hpp"
#include "zeta.hpp"

namespace zmoments {

// ---------------------------------------------------------------------------
// constants record

enum class Alpha2Form { residue, closed_form };
enum class ShuBracket { corrected, literal };

inline const char* to_string(Alpha2Form f) { return f == Alpha2Form::residue ? "residue" : "closed_form"; }
inline const char* to_string(ShuBracket b) { return b == ShuBracket::corrected ? "corrected" : "literal"; }

struct MainTermConstants {
    real gamma0 = NAN, gamma1 = NAN, gamma2 = NAN;
    real a1 = NAN, a2 = NAN;
    real C0 = NAN, C1 = NAN, D = 0;
    Polynomial p1, p2, r1_poly, r1_tilde, r2;
    Alpha2Form alpha2_form = Alpha2Form::residue;
    std::string source;                        // "laurent" or "calibrate"
    std::map<std::string, real> diagnostics;   // fit residuals, condition numbers, ...

    bool initialized() const {
        return std::isfinite(static_cast<double>(a1)) && std::isfinite(static_cast<double>(a2)) &&
               std::isfinite(static_cast<double>(C0)) && std::isfinite(static_cast<double>(C1)) &&
               p1.degree() == 1 && p2.degree() == 2 && r1_poly.degree() == 1 && r1_tilde.degree() == 1 &&
               r2.degree() == 2;
    }

    void require() const {
        if (!initialized()) throw DomainError("main-term constants are not initialised (derive or calibrate them first)");
        for (auto* p : {&p1, &p2, &r1_poly, &r1_tilde, &r2})
            if (!p->monic()) throw DomainError("main-term polynomials must be monic");
    }

    real alpha2(const FactoredInteger& n) const {
        return alpha2_form == Alpha2Form::residue ? alpha_2_residue(n, D) : alpha_2(n, D);
    }
};

// ---------------------------------------------------------------------------
// parameters

struct MeanValueParams {
    real T = 0;
    real theta = 0;
    std::uint64_t M = 1;
    CoefficientVector x, y;
    std::string case_label;

    static MeanValueParams make(real T, real theta, CoefficientVector x, CoefficientVector y, std::string label) {
        if (!(T > 1)) throw DomainError("T must exceed 1");
        if (!(theta >= 0 && theta < 0.5L)) throw DomainError("theta must lie in [0, 1/2)");
        MeanValueParams p;
        p.T = T;
        p.theta = theta;
        p.M = std::max(x.M(), y.M());
        if (static_cast<real>(p.M) > std::sqrt(T)) throw DomainError("M exceeds sqrt(T)");
        p.x = std::move(x);
        p.y = std::move(y);
        p.case_label = std::move(label);
        return p;
    }

    // x = y = mu(n) P(log(M/n)/log M) with M = floor(T^theta)
    static MeanValueParams divisor_case(real T, real theta, const Polynomial& P = Polynomial{0, 1}) {
        auto M = static_cast<std::uint64_t>(std::floor(std::pow(T, theta) + 1e-12L));
        if (M < 2) return indicator(T, theta);
        auto c = divisor_coefficients(M, P);
        return make(T, theta, c, c, "divisor");
    }

    static MeanValueParams with_M(real T, std::uint64_t M, const Polynomial& P = Polynomial{0, 1}) {
        if (M < 2) return indicator(T);
        auto c = divisor_coefficients(M, P);
        return make(T, std::log(static_cast<real>(M)) / std::log(T), c, c, "divisor");
    }

    // X = Y = 1
    static MeanValueParams indicator(real T, real theta = 0) {
        auto one = CoefficientVector::indicator_of_one(1);
        return make(T, theta, one, one, "indicator");
    }
};

// ---------------------------------------------------------------------------
// comparison report

struct ComparisonRow {
    std::vector<std::pair<std::string, real>> params;
    cplx direct;
    real main = 0;
    real abs_error = 0;
    real rel_error = 0;
    std::vector<std::pair<std::string, real>> extra;

    real param(const std::string& key) const {
        for (auto& [k, v] : params)
            if (k == key) return v;
        for (auto& [k, v] : extra)
            if (k == key) return v;
        throw DomainError("no field " + key + " in report row");
    }
};

struct ComparisonReport {
    std::string kind;
    std::vector<ComparisonRow> rows;
    std::vector<std::pair<std::string, std::string>> metadata;

    // rel_error = |Re direct - main| / max(|main|, 1e-30)
    void add(std::vector<std::pair<std::string, real>> params, cplx direct, real main,
             std::vector<std::pair<std::string, real>> extra = {}) {
        ComparisonRow r;
        r.params = std::move(params);
        r.direct = direct;
        r.main = main;
        r.abs_error = std::fabs(direct.real() - main);
        r.rel_error = r.abs_error / std::max(std::fabs(main), real(1e-30L));
        r.extra = std::move(extra);
        rows.push_back(std::move(r));
    }

    // number of increases of rel_error along the row order
    int inversions() const {
        int n = 0;
        for (std::size_t i = 1; i < rows.size(); ++i) n += rows[i].rel_error > rows[i - 1].rel_error;
        return n;
    }
};

// ---------------------------------------------------------------------------
// a(m) = sum_{uvw = m} Lambda(u) log(v) x_w

inline std::vector<real> a_table(std::uint64_t N, const CoefficientVector& x) {
    auto L = lambda_log_table(N);
    std::vector<real> a(N + 1, 0);
    for (auto& [w, xw] : x.nonzeros())
        for (std::uint64_t m = 1, n = w; n <= N; ++m, n += w) a[n] += xw * L[m];
    return a;
}

// a(m d) for m = 0..N (index 0 unused)
inline std::vector<real> a_coefficients(std::uint64_t d, std::uint64_t N, const CoefficientVector& x) {
    if (d < 1) throw DomainError("a_coefficients needs d >= 1");
    if (N * d > 100'000'000) throw BudgetError("a_coefficients beyond the factorisation table bound");
    auto a = a_table(N * d, x);
    std::vector<real> r(N + 1, 0);
    for (std::uint64_t m = 1; m <= N; ++m) r[m] = a[m * d];
    return r;
}

// ---------------------------------------------------------------------------
// discrete sum over zeros

// zeros with zeta'(rho) evaluated once, shared by every sweep point
struct ZeroData {
    ZeroList zeros;
    std::vector<cplx> zeta_prime;

    static ZeroData build(ZeroList z, const PrecisionConfig& cfg = {}, unsigned threads = 0) {
        ZeroData d;
        d.zeros = std::move(z);
        d.zeta_prime.resize(d.zeros.size());
        parallel_for(
            d.zeros.size(), [&](std::size_t i) { d.zeta_prime[i] = zmoments::zeta_prime(cplx(0.5L, d.zeros.gammas[i]), cfg); },
            threads);
        return d;
    }
};

inline cplx discrete_sum(const MeanValueParams& p, const ZeroData& zd) {
    if (!zd.zeros.certified) throw CertificationError("zero list is not certified");
    if (zd.zeros.T < p.T) throw CertificationError("zero list does not reach T");
    CompensatedC s;
    for (std::size_t i = 0; i < zd.zeros.size() && zd.zeros.gammas[i] < p.T; ++i) {
        real g = zd.zeros.gammas[i];
        s += zd.zeta_prime[i] * p.x.dirichlet(cplx(0.5L, g)) * p.y.dirichlet(cplx(0.5L, -g));
    }
    return s.value();
}

inline cplx discrete_sum(const MeanValueParams& p, const ZeroList& zeros, const PrecisionConfig& cfg = {}) {
    if (!zeros.certified) throw CertificationError("zero list is not certified");
    ZeroList cut = zeros;
    cut.gammas.resize(zeros.count_below(p.T));
    return discrete_sum(p, ZeroData::build(std::move(cut), cfg));
}

// ---------------------------------------------------------------------------
// Dirichlet series used on the right of the critical strip

struct DirichletSeries {
    std::string name;
    ArithFn coeffs;
    std::function<cplx(cplx, const PrecisionConfig&)> eval;
};

namespace series {
inline DirichletSeries zeta() {
    return {"zeta", fn::one(), [](cplx s, const PrecisionConfig& c) { return zeta_euler_maclaurin(s, c, false).value; }};
}
// coefficients -log n
inline DirichletSeries zeta_prime() {
    return {"zeta'", ArithFn("-log", Support::all, [](auto& n) { return -n.log(); }),
            [](cplx s, const PrecisionConfig& c) { return zeta_euler_maclaurin(s, c, true).derivative; }};
}
// coefficients (Lambda*log)(n)
inline DirichletSeries zeta_prime_sq_over_zeta() {
    return {"zeta'^2/zeta", ArithFn("Lambda*log", Support::all, [](auto& n) { return lambda_log(n); }),
            [](cplx s, const PrecisionConfig& c) {
                auto r = zeta_euler_maclaurin(s, c, true);
                return r.derivative * r.derivative / r.value;
            }};
}
}  // namespace series

// ---------------------------------------------------------------------------
// Gonek-type integral (1/2 pi i) int_{k+i}^{k+iT} chi(1-s) r^{-s} ds

struct GonekResult {
    cplx quadrature;
    cplx predicted;
    real residual = 0;
    real envelope = 0;
    bool within = false;
};

inline GonekResult gonek_integral_check(real r, real T, real kappa, const QuadratureOptions& opt = {}) {
    if (!(kappa >= 1 && kappa <= 2)) throw DomainError("kappa must lie in [1, 2]");
    if (!(r > 0)) throw DomainError("r must be positive");
    const real edge = T / two_pi;
    if (std::fabs(r - edge) < 0.05L * edge) throw DomainError("r too close to T/2pi");
    const real lr = std::log(r);
    auto f = [&](real t) {
        cplx s(kappa, t);
        return chi(real(1) - s) * std::exp(-s * lr) / two_pi;
    };
    real freq = std::max(std::fabs(std::log(T / two_pi)), std::log(two_pi)) + std::fabs(lr) + 1;
    GonekResult g;
    g.quadrature = oscillatory_integrate(f, 1, T, freq, opt).value;
    g.predicted = r <= edge ? e_of(-r) : cplx(0);
    g.residual = std::abs(g.quadrature - g.predicted);
    g.envelope = (std::pow(T, kappa - 0.5L) + std::pow(T, kappa + 0.5L) / (std::fabs(T - two_pi * r) + std::sqrt(T))) *
                 std::pow(r, -kappa);
    g.within = g.residual <= g.envelope;
    return g;
}

// ---------------------------------------------------------------------------
// J_k and the log-power integrals

// P_1 = X - 1, P_2 = X^2 - 2X + 2: t P_k(log(t/2pi)) is an antiderivative of log^k(t/2pi)
inline Polynomial log_power_antiderivative_poly(int k) {
    switch (k) {
        case 0: return Polynomial{1};
        case 1: return Polynomial{-1, 1};
        case 2: return Polynomial{2, -2, 1};
    }
    throw DomainError("k must be 0, 1 or 2");
}

struct JkResult {
    real integral = 0;           // int_1^T log^k(t/2pi) dt by quadrature
    real closed_form = 0;        // T P_k(log(T/2pi))
    real integral_gap = 0;       // integral - closed_form
    cplx quadrature;             // J_k along Re s = kappa
    real diagonal_formula = 0;   // (-1)^k T P_k(log T/2pi)/(2pi) sum alpha_n x_u y_nu /(nu)
    real rel_error = 0;
};

inline real log_power_integral(int k, real T) {
    auto f = [k](real t) { return cplx(std::pow(std::log(t / two_pi), k)); };
    return oscillatory_integrate(f, 1, T, 1 / std::sqrt(T), {1e-10L, 20, 1}).value.real();
}

inline JkResult jk_check(int k, const DirichletSeries& D, const MeanValueParams& p, const PrecisionConfig& cfg = {},
                         QuadratureOptions opt = {}, bool with_quadrature = true) {
    if (k < 0 || k > 2) throw DomainError("k must be 0, 1 or 2");
    JkResult r;
    const real L = std::log(p.T / two_pi);
    r.integral = log_power_integral(k, p.T);
    r.closed_form = p.T * log_power_antiderivative_poly(k)(L);
    r.integral_gap = r.integral - r.closed_form;
    Compensated diag;
    for (std::uint64_t u = 1; u <= p.M; ++u)
        for (std::uint64_t n = 1; n * u <= p.M; ++n)
            diag += D.coeffs(factor(n)) * p.x(u) * p.y(n * u) / real(n * u);
    r.diagonal_formula = (k % 2 ? -1 : 1) * p.T * log_power_antiderivative_poly(k)(L) / two_pi * diag.value();
    if (with_quadrature) {
        const real kappa = 1 + 1 / std::log(p.T);
        auto f = [&](real t) {
            cplx s(kappa, t);
            cplx c = std::pow(chi_log_deriv(s), k);
            return c * D.eval(s, cfg) * p.x.dirichlet(s) * p.y.dirichlet(real(1) - s) / two_pi;
        };
        if (opt.abs_tol == QuadratureOptions{}.abs_tol) opt.abs_tol = 1e-6L * p.T;
        r.quadrature = oscillatory_integrate(f, 1, p.T, std::log(p.M * p.T / two_pi), opt).value;
        r.rel_error = std::abs(r.quadrature - r.diagonal_formula) / std::max(std::fabs(r.diagonal_formula), real(1e-30L));
    }
    return r;
}

// ---------------------------------------------------------------------------
// S_R along Re s = 1 + 1/log T

inline cplx sr_quadrature(const MeanValueParams& p, const PrecisionConfig& cfg = {}, QuadratureOptions opt = {}) {
    const real kappa = 1 + 1 / std::log(p.T);
    auto f = [&](real t) {
        cplx s(kappa, t);
        auto z = zeta_euler_maclaurin(s, cfg, true);
        cplx c = chi_log_deriv(s);
        cplx core = c * c * z.value - real(2) * c * z.derivative + z.derivative * z.derivative / z.value;
        return core * p.x.dirichlet(s) * p.y.dirichlet(real(1) - s) / two_pi;
    };
    if (opt.abs_tol == QuadratureOptions{}.abs_tol) opt.abs_tol = 1e-6L * p.T;
    return oscillatory_integrate(f, 1, p.T, std::log(p.M * p.T / two_pi), opt).value;
}

// ---------------------------------------------------------------------------
// M and M_0 by brute force

inline constexpr std::uint64_t m0_budget = 100'000'000;

inline std::uint64_t m_range(const MeanValueParams& p, std::uint64_t k) {
    return static_cast<std::uint64_t>(std::floor(k * p.T / two_pi));
}

// sum_{k<=M} y_k/k sum_{m <= kT/2pi} a(m) mu(k/(m,k))/phi(k/(m,k))
inline real m0_direct(const MeanValueParams& p) {
    if (p.M * p.T / two_pi > m0_budget) throw BudgetError("m0_direct beyond its 1e8-term budget");
    auto a = a_table(m_range(p, p.M), p.x);
    Compensated s;
    for (auto& [k, yk] : p.y.nonzeros()) {
        std::vector<real> w(k + 1, 0);  // weight by gcd
        for (auto g : factor(k).divisors()) {
            auto kg = factor(k / g);
            w[g] = real(mobius(kg)) / real(euler_phi(kg));
        }
        Compensated inner;
        for (std::uint64_t m = 1, top = m_range(p, k); m <= top; ++m)
            if (a[m] != 0) inner += a[m] * w[std::gcd(m, k)];
        s += yk / k * inner.value();
    }
    return s.value();
}

// the full object with e(-m/k)
inline cplx m_direct(const MeanValueParams& p) {
    if (p.M * p.T / two_pi > m0_budget) throw BudgetError("m_direct beyond its 1e8-term budget");
    auto a = a_table(m_range(p, p.M), p.x);
    CompensatedC s;
    for (auto& [k, yk] : p.y.nonzeros()) {
        CompensatedC inner;
        for (std::uint64_t m = 1, top = m_range(p, k); m <= top; ++m)
            if (a[m] != 0) inner += a[m] * e_of(-static_cast<real>(m % k) / k);
        s += yk / k * inner.value();
    }
    return s.value();
}

// ---------------------------------------------------------------------------
// main terms

inline real H_sum(const MeanValueParams& p, std::uint64_t u, std::uint64_t v) {
    Compensated s;
    for (std::uint64_t g = 1; g * u <= p.M && g * v <= p.M; ++g) s += p.y(u * g) * p.x(v * g) / g;
    return s.value();
}

// c'(u, v) with logarithm argument log(T/2pi v)
inline real c_prime(const MeanValueParams& p, const MainTermConstants& K, std::uint64_t u, std::uint64_t v) {
    auto fu = factor(u);
    real Lv = std::log(p.T / (two_pi * v));
    return -lambda_k(fu, 2) / 2 + K.r1_poly(Lv) * von_mangoldt(fu) + K.r1_tilde(Lv) * alpha_1(fu) + K.alpha2(fu);
}

inline real m0_main_term(const MeanValueParams& p, const MainTermConstants& K) {
    K.require();
    Compensated first, second;
    for (std::uint64_t u = 1; u <= p.M; ++u)
        for (std::uint64_t v = 1; v <= p.M; ++v) {
            if (std::gcd(u, v) != 1) continue;
            real H = H_sum(p, u, v);
            if (H != 0) first += c_prime(p, K, u, v) * H / real(u * v);
        }
    for (std::uint64_t g = 1; g <= p.M; ++g)
        for (std::uint64_t v = 1; g * v <= p.M; ++v)
            second += p.y(g) * p.x(g * v) / real(g * v) * K.r2(std::log(p.T / (two_pi * v)));
    return p.T / two_pi * first.value() + p.T / (2 * two_pi) * second.value();
}

inline real theorem1_main_term(const MeanValueParams& p, const MainTermConstants& K) {
    K.require();
    const real L = std::log(p.T / two_pi);
    Compensated s1, s2, s3;
    for (std::uint64_t u = 1; u <= p.M; ++u)
        for (std::uint64_t n = 1; n * u <= p.M; ++n) {
            real ln = std::log(static_cast<real>(n));
            real r0 = K.p2(L) - 2 * K.p1(L) * ln + lambda_log(factor(n));
            s1 += p.x(u) * p.y(n * u) * r0 / real(n * u);
            s2 += p.y(u) * p.x(u * n) / real(n * u) * K.r2(std::log(p.T / (two_pi * n)));
        }
    for (std::uint64_t a = 1; a <= p.M; ++a)
        for (std::uint64_t b = 1; b <= p.M; ++b) {
            if (std::gcd(a, b) != 1) continue;
            real H = H_sum(p, a, b);
            if (H != 0) s3 += -c_prime(p, K, a, b) * H / real(a * b);
        }
    return p.T / two_pi * s1.value() - p.T / (2 * two_pi) * s2.value() + p.T / two_pi * s3.value();
}

// ---------------------------------------------------------------------------
// coprime sums: sum_{u <= x, (u,k) = 1} (Lambda*log)(hu)

// (Lambda*log)(n) = sum_p log p (v log n - log p v(v+1)/2)
inline real lambda_log_of(const std::vector<std::pair<std::uint64_t, unsigned>>& f) {
    real ln = 0;
    for (auto [p, e] : f) ln += e * std::log(static_cast<real>(p));
    real s = 0;
    for (auto [p, e] : f) {
        real lp = std::log(static_cast<real>(p));
        s += lp * (e * ln - lp * e * (e + real(1)) / 2);
    }
    return s;
}

inline constexpr real shu_x_budget = 1e7L;

// brute-force sums at each x in xs (any order), in one pass
inline std::vector<real> shu_brute(std::uint64_t h, std::uint64_t k, const std::vector<real>& xs) {
    if (h < 1 || k < 1 || h > 100 || k > 100) throw DomainError("shu sums need 1 <= h, k <= 100");
    real xmax = 0;
    for (real x : xs) {
        if (!(x >= 1)) throw DomainError("x must be >= 1");
        xmax = std::max(xmax, x);
    }
    if (xmax > shu_x_budget) throw BudgetError("shu sums beyond x = 1e7");
    auto X = static_cast<std::uint64_t>(std::floor(xmax));
    auto sieve = sieve_up_to(std::max<std::uint64_t>(X, 2));
    auto fh = factor(h);
    std::vector<std::pair<real, std::size_t>> order;
    for (std::size_t i = 0; i < xs.size(); ++i) order.push_back({xs[i], i});
    std::sort(order.begin(), order.end());
    std::vector<real> out(xs.size(), 0);
    Compensated s;
    std::size_t next = 0;
    std::vector<std::pair<std::uint64_t, unsigned>> f;
    for (std::uint64_t u = 1; u <= X; ++u) {
        while (next < order.size() && order[next].first < static_cast<real>(u)) out[order[next++].second] = s.value();
        if (std::gcd(u, k) != 1) continue;
        f.clear();
        for (auto [p, e] : fh.factors()) f.push_back({p, e});
        auto fu = sieve->factor(u);
        for (auto [p, e] : fu.factors()) {
            auto it = std::find_if(f.begin(), f.end(), [p = p](auto& q) { return q.first == p; });
            if (it != f.end())
                it->second += e;
            else
                f.push_back({p, e});
        }
        s += lambda_log_of(f);
    }
    while (next < order.size()) out[order[next++].second] = s.value();
    return out;
}

// the bracket's pieces that do not involve C0, C1 or the constant a2
inline real shu_known_part(std::uint64_t h, std::uint64_t k, real x, ShuBracket b) {
    auto fh = factor(h), fk = factor(k);
    real L = std::log(x), Le = L - 1, lh = std::log(static_cast<real>(h));
    real e1 = eta1(fk);
    real s = L * L / 2 + 2 * Le * lh + lambda_log(fh) - e1 * Le - g_hk(fh, fk);
    if (b == ShuBracket::corrected)
        s += -e1 * e1 / 2 - real(1.5) * eta1_prime(fk);
    else
        s += -eta2(fk);
    return s;
}

inline real shu_main_term(std::uint64_t h, std::uint64_t k, real x, const MainTermConstants& K,
                          ShuBracket b = ShuBracket::corrected) {
    if (!std::isfinite(static_cast<double>(K.C0)) || !std::isfinite(static_cast<double>(K.C1)))
        throw DomainError("main-term constants are not initialised (derive or calibrate them first)");
    auto fk = factor(k);
    real bracket = shu_known_part(h, k, x, b) + K.C0 * (std::log(x) - 1) + K.C1 * eta1(fk);
    if (b == ShuBracket::corrected) bracket += K.a2;
    return x * real(euler_phi(fk)) / k * bracket;
}

inline ComparisonReport shu_sum_check(std::uint64_t h, std::uint64_t k, const std::vector<real>& xs,
                                      const MainTermConstants& K, ShuBracket b = ShuBracket::corrected) {
    ComparisonReport rep;
    rep.kind = "shu";
    rep.metadata = {{"h", std::to_string(h)}, {"k", std::to_string(k)}, {"bracket", to_string(b)},
                    {"constants", K.source}};
    auto brute = shu_brute(h, k, xs);
    for (std::size_t i = 0; i < xs.size(); ++i)
        rep.add({{"h", real(h)}, {"k", real(k)}, {"x", xs[i]}}, brute[i], shu_main_term(h, k, xs[i], K, b));
    return rep;
}

// ---------------------------------------------------------------------------
// constants: closed-form derivation and least-squares calibration

enum class DeriveMode { laurent, calibrate };

inline MainTermConstants laurent_constants() {
    auto lc = zeta_prime_sq_over_zeta_laurent();
    MainTermConstants K;
    K.gamma0 = lc.gamma0;
    K.gamma1 = lc.gamma1;
    K.gamma2 = lc.gamma2;
    K.a1 = lc.a1;
    K.a2 = lc.a2;
    K.C0 = K.a1 - 1;
    K.C1 = K.a1;
    K.D = 0;
    K.p1 = log_power_antiderivative_poly(1);
    K.p2 = log_power_antiderivative_poly(2);
    K.r1_poly = Polynomial{-K.a1 - 1, 1};
    K.r1_tilde = Polynomial{-K.a1 - 1, 1};
    K.r2 = Polynomial{2 * (K.a2 - K.C0), 2 * K.C0, 1};
    K.source = "laurent";
    return K;
}

struct CalibrationBudget {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> shu_hk{{1, 1}, {2, 3}, {6, 5}, {1, 2}, {3, 1}, {1, 6}, {4, 3}, {5, 2}};
    std::vector<real> shu_x{1e4L, 3e4L, 1e5L, 3e5L, 1e6L};
    std::vector<real> m0_T{1e4L, 2e4L, 5e4L, 1e5L, 2e5L, 5e5L, 1e6L};
    std::vector<std::uint64_t> m0_M{1, 2, 3, 4, 6, 8};
    std::uint64_t seed = 20240601;
};

// weighted linear least squares with condition number and weighted RMS residual
struct LinearFit {
    Eigen::VectorXd beta;
    double condition = 0;
    double rms = 0;
};

inline LinearFit least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& w) {
    Eigen::MatrixXd Aw = w.asDiagonal() * A;
    Eigen::VectorXd bw = w.asDiagonal() * b;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Aw, Eigen::ComputeThinU | Eigen::ComputeThinV);
    LinearFit f;
    f.beta = svd.solve(bw);
    auto sv = svd.singularValues();
    f.condition = sv(0) / sv(sv.size() - 1);
    f.rms = std::sqrt((Aw * f.beta - bw).squaredNorm() / std::max<Eigen::Index>(1, A.rows()));
    if (!std::isfinite(f.condition) || f.condition > 1e12) throw DomainError("ill-conditioned fit (condition number " + std::to_string(f.condition) + ")");
    return f;
}

// rows: target - known = C0 log(x/e) + C1 eta1(k) + a2
struct ShuDesign {
    Eigen::MatrixXd A;
    Eigen::VectorXd known;  // per-row known part of the bracket
    Eigen::VectorXd scale;  // x phi(k)/k
    Eigen::VectorXd w;
};

inline ShuDesign shu_design(const CalibrationBudget& B) {
    std::size_t n = B.shu_hk.size() * B.shu_x.size(), r = 0;
    ShuDesign d{Eigen::MatrixXd(n, 3), Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (auto [h, k] : B.shu_hk)
        for (real x : B.shu_x) {
            auto fk = factor(k);
            d.A(r, 0) = static_cast<double>(std::log(x) - 1);
            d.A(r, 1) = static_cast<double>(eta1(fk));
            d.A(r, 2) = 1;
            d.known(r) = static_cast<double>(shu_known_part(h, k, x, ShuBracket::corrected));
            d.scale(r) = static_cast<double>(x * real(euler_phi(fk)) / k);
            d.w(r) = static_cast<double>(std::sqrt(x) / std::log(x));  // error ~ sqrt(x) log^2 x
            ++r;
        }
    return d;
}

// m0_main_term is affine in (r1_0, rt1_0 + D, r2_1, r2_0): base + features . beta
struct M0Features {
    real base = 0;
    std::array<real, 4> f{};
};

inline M0Features m0_features(const MeanValueParams& p, Alpha2Form form) {
    MainTermConstants K;
    K.a1 = K.a2 = K.C0 = K.C1 = 0;
    K.D = 0;
    K.alpha2_form = form;
    K.p1 = Polynomial{0, 1};
    K.p2 = Polynomial{0, 0, 1};
    K.r1_poly = K.r1_tilde = Polynomial{0, 1};
    K.r2 = Polynomial{0, 0, 1};
    M0Features out;
    out.base = m0_main_term(p, K);
    Compensated f0, f1, f2, f3;
    for (std::uint64_t u = 1; u <= p.M; ++u)
        for (std::uint64_t v = 1; v <= p.M; ++v) {
            if (std::gcd(u, v) != 1) continue;
            real H = H_sum(p, u, v);
            if (H == 0) continue;
            auto fu = factor(u);
            f0 += von_mangoldt(fu) * H / real(u * v);
            f1 += alpha_1(fu) * H / real(u * v);
        }
    for (std::uint64_t g = 1; g <= p.M; ++g)
        for (std::uint64_t v = 1; g * v <= p.M; ++v) {
            real c = p.y(g) * p.x(g * v) / real(g * v);
            f2 += c * std::log(p.T / (two_pi * v));
            f3 += c;
        }
    out.f = {p.T / two_pi * f0.value(), p.T / two_pi * f1.value(), p.T / (2 * two_pi) * f2.value(),
             p.T / (2 * two_pi) * f3.value()};
    return out;
}

struct M0Design {
    Eigen::MatrixXd A;
    Eigen::VectorXd base;
    Eigen::VectorXd w;
    std::vector<MeanValueParams> points;
};

inline M0Design m0_design(const CalibrationBudget& B, Alpha2Form form) {
    M0Design d;
    for (real T : B.m0_T)
        for (auto M : B.m0_M) {
            if (static_cast<real>(M) > std::sqrt(T)) continue;
            d.points.push_back(MeanValueParams::with_M(T, M));
        }
    const auto n = static_cast<Eigen::Index>(d.points.size());
    d.A.resize(n, 4);
    d.base.resize(n);
    d.w.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        auto f = m0_features(d.points[i], form);
        for (int j = 0; j < 4; ++j) d.A(i, j) = static_cast<double>(f.f[j]);
        d.base(i) = static_cast<double>(f.base);
        d.w(i) = static_cast<double>(1 / (std::sqrt(d.points[i].T) * std::pow(std::log(d.points[i].T), 2)));
    }
    return d;
}

struct CalibrationFit {
    std::array<real, 3> shu{};  // C0, C1, a2
    std::array<real, 4> m0{};   // r1_0, rt1_0 + D, r2_1, r2_0
    double shu_condition = 0, shu_rms = 0, m0_condition = 0, m0_rms = 0;
};

inline CalibrationFit fit_constants(const ShuDesign& sd, const Eigen::VectorXd& shu_sums, const M0Design& md,
                                    const Eigen::VectorXd& m0_values) {
    CalibrationFit out;
    Eigen::VectorXd ys = shu_sums.cwiseQuotient(sd.scale) - sd.known;
    auto f1 = least_squares(sd.A, ys, sd.w);
    for (int j = 0; j < 3; ++j) out.shu[j] = f1.beta(j);
    out.shu_condition = f1.condition;
    out.shu_rms = f1.rms;
    Eigen::VectorXd ym = m0_values - md.base;
    auto f2 = least_squares(md.A, ym, md.w);
    for (int j = 0; j < 4; ++j) out.m0[j] = f2.beta(j);
    out.m0_condition = f2.condition;
    out.m0_rms = f2.rms;
    return out;
}

inline MainTermConstants constants_from_fit(const CalibrationFit& f, const MainTermConstants& reference) {
    MainTermConstants K = reference;
    K.C0 = f.shu[0];
    K.C1 = f.shu[1];
    K.a2 = f.shu[2];
    K.a1 = K.C1;
    K.D = 0;  // D multiplies alpha_1 and is absorbed into the constant of Rtilde_1
    K.r1_poly = Polynomial{f.m0[0], 1};
    K.r1_tilde = Polynomial{f.m0[1], 1};
    K.r2 = Polynomial{f.m0[3], f.m0[2], 1};
    K.source = "calibrate";
    K.diagnostics["shu_condition"] = f.shu_condition;
    K.diagnostics["shu_weighted_rms"] = f.shu_rms;
    K.diagnostics["m0_condition"] = f.m0_condition;
    K.diagnostics["m0_weighted_rms"] = f.m0_rms;
    K.diagnostics["delta_C0_vs_laurent"] = K.C0 - reference.C0;
    K.diagnostics["delta_C1_vs_laurent"] = K.C1 - reference.C1;
    K.diagnostics["delta_a2_vs_laurent"] = K.a2 - reference.a2;
    K.diagnostics["delta_r1_0_vs_laurent"] = K.r1_poly.c[0] - reference.r1_poly.c[0];
    K.diagnostics["delta_rt1_0_vs_laurent"] = K.r1_tilde.c[0] - reference.r1_tilde.c[0];
    K.diagnostics["delta_r2_1_vs_laurent"] = K.r2.c[1] - reference.r2.c[1];
    K.diagnostics["delta_r2_0_vs_laurent"] = K.r2.c[0] - reference.r2.c[0];
    return K;
}

inline MainTermConstants derive_constants(DeriveMode mode, const CalibrationBudget& B = {},
                                          Alpha2Form form = Alpha2Form::residue) {
    MainTermConstants ref = laurent_constants();
    ref.alpha2_form = form;
    if (mode == DeriveMode::laurent) return ref;
    auto sd = shu_design(B);
    Eigen::VectorXd sums(sd.A.rows());
    Eigen::Index r = 0;
    for (auto [h, k] : B.shu_hk) {
        auto b = shu_brute(h, k, B.shu_x);
        for (real v : b) sums(r++) = static_cast<double>(v);
    }
    auto md = m0_design(B, form);
    Eigen::VectorXd m0(md.points.size());
    for (std::size_t i = 0; i < md.points.size(); ++i) m0(i) = static_cast<double>(m0_direct(md.points[i]));
    return constants_from_fit(fit_constants(sd, sums, md, m0), ref);
}

// Builds data from known constants (plus small seeded noise), refits, and
// returns the largest absolute deviation of the recovered constants.
struct RoundTrip {
    CalibrationFit truth, recovered;
    real max_abs_error = 0;
};

inline RoundTrip calibration_round_trip(const CalibrationBudget& B = {}, real noise = 1e-7L) {
    RoundTrip rt;
    rt.truth.shu = {-1.3L, -0.45L, 0.2L};
    rt.truth.m0 = {-0.35L, -1.7L, -2.9L, 3.1L};
    std::mt19937_64 rng(B.seed);
    std::normal_distribution<double> gauss(0, 1);
    auto sd = shu_design(B);
    Eigen::VectorXd sums(sd.A.rows());
    for (Eigen::Index i = 0; i < sd.A.rows(); ++i) {
        double model = sd.known(i) + sd.A(i, 0) * double(rt.truth.shu[0]) + sd.A(i, 1) * double(rt.truth.shu[1]) +
                       double(rt.truth.shu[2]);
        sums(i) = sd.scale(i) * model * (1 + double(noise) * gauss(rng));
    }
    auto md = m0_design(B, Alpha2Form::residue);
    Eigen::VectorXd m0(md.A.rows());
    for (Eigen::Index i = 0; i < md.A.rows(); ++i) {
        double v = md.base(i);
        for (int j = 0; j < 4; ++j) v += md.A(i, j) * double(rt.truth.m0[j]);
        m0(i) = v * (1 + double(noise) * gauss(rng));
    }
    rt.recovered = fit_constants(sd, sums, md, m0);
    for (int j = 0; j < 3; ++j) rt.max_abs_error = std::max(rt.max_abs_error, std::fabs(rt.recovered.shu[j] - rt.truth.shu[j]));
    for (int j = 0; j < 4; ++j) rt.max_abs_error = std::max(rt.max_abs_error, std::fabs(rt.recovered.m0[j] - rt.truth.m0[j]));
    return rt;
}

// ---------------------------------------------------------------------------
// end-to-end comparison

struct EndToEndOptions {
    bool with_contour = false;  // S_R quadrature and the full M object per point
    QuadratureOptions quadrature{};
};

inline ComparisonReport end_to_end_report(const std::vector<MeanValueParams>& sweep, const MainTermConstants& K,
                                          const ZeroData& zd, const PrecisionConfig& cfg = {},
                                          const EndToEndOptions& opt = {}) {
    ComparisonReport rep;
    rep.kind = "end_to_end";
    rep.metadata = {{"constants", K.source},
                    {"alpha2_form", to_string(K.alpha2_form)},
                    {"zero_cache_T", std::to_string(static_cast<double>(zd.zeros.T))},
                    {"zero_count", std::to_string(zd.zeros.size())},
                    {"first_sum_coefficients", "x_u y_nu"}};
    if (!sweep.empty()) K.require();
    for (auto& p : sweep) {
        cplx S = discrete_sum(p, zd);
        real main = theorem1_main_term(p, K);
        std::vector<std::pair<std::string, real>> extra{{"im_direct", S.imag()}, {"abs_direct", std::abs(S)}};
        if (opt.with_contour) {
            cplx SR = sr_quadrature(p, cfg, opt.quadrature);
            cplx Mfull = m_direct(p);
            real M0 = m0_direct(p);
            cplx mid = SR - std::conj(Mfull);
            extra.insert(extra.end(), {{"sr_re", SR.real()},
                                       {"sr_im", SR.imag()},
                                       {"m_re", Mfull.real()},
                                       {"m_im", Mfull.imag()},
                                       {"m0_direct", M0},
                                       {"m0_main", m0_main_term(p, K)},
                                       {"mid_level_re", mid.real()},
                                       {"mid_level_im", mid.imag()},
                                       {"mid_level_rel_error", std::abs(S - mid) / std::max(std::abs(S), real(1e-30L))}});
        }
        rep.add({{"T", p.T}, {"theta", p.theta}, {"M", real(p.M)}}, S, main, std::move(extra));
    }
    return rep;
}

}  // namespace zmoments
