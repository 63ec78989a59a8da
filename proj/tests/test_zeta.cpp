#include <catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include <zmoments/zeta.hpp>

using namespace zmoments;
using Catch::Approx;

namespace {

struct Ref {
    cplx s, z, dz;
};

std::vector<Ref> load_refs() {
    std::ifstream in(std::string(ZM_TEST_DATA) + "/zeta_values.txt");
    std::vector<Ref> r;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        real a, b, c, d, e, f;
        ss >> a >> b >> c >> d >> e >> f;
        r.push_back({{a, b}, {c, d}, {e, f}});
    }
    return r;
}

}  // namespace

TEST_CASE("classical values") {
    CHECK(double(std::abs(zeta(2) - pi * pi / 6)) < 1e-12);
    CHECK(double(std::abs(zeta(4) - std::pow(pi, 4) / 90)) < 1e-12);
    CHECK(double(std::abs(zeta(0) + 0.5L)) < 1e-12);
    CHECK(double(std::abs(zeta(-1) + 1 / 12.0L)) < 1e-12);
    CHECK(double(std::abs(zeta(-2))) < 1e-12);
    CHECK(double(std::abs(zeta(cplx(0.5L, 14.134725L)))) < 1e-5);
    CHECK_THROWS_AS(zeta(1), DomainError);
    CHECK_THROWS_AS(zeta(cplx(1 + 1e-9L, 0)), DomainError);
}

TEST_CASE("oracle values of zeta and zeta'") {
    for (auto& r : load_refs()) {
        INFO("s = " << double(r.s.real()) << " + " << double(r.s.imag()) << "i");
        REQUIRE(double(std::abs(zeta(r.s) - r.z)) < 1e-11);
        REQUIRE(double(std::abs(zeta_prime(r.s) - r.dz)) < 1e-10);
    }
}

TEST_CASE("zeta' special values") {
    real z3 = zeta(3).real();
    CHECK(double(std::abs(zeta_prime(-2) + z3 / (4 * pi * pi))) < 1e-12);
    CHECK(double(zeta_prime(-2).real()) == Approx(-0.030448).margin(1e-6));
    CHECK(double(zeta_prime(2).real()) == Approx(-0.93754).margin(1e-5));
    for (real sigma : {1.1L, 1.5L, 2.0L, 3.0L, 7.5L}) CHECK(zeta_prime(sigma).imag() == 0);
}

TEST_CASE("functional equation on the strip grid") {
    real worst = 0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            cplx s(0.1L + 0.8L * i / 9, 5 + 45.0L * j / 9);
            cplx lhs = zeta_euler_maclaurin(s).value;
            cplx rhs = chi(s) * zeta_euler_maclaurin(real(1) - s).value;
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    CHECK(double(worst) < 1e-10);
    cplx s(0.3L, 5);
    CHECK(double(std::abs(zeta(s) - chi(s) * zeta(real(1) - s))) < 1e-10);
}

TEST_CASE("zeta' against central differences") {
    const real h = 1e-5L;
    real worst = 0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            cplx s(0.1L + 0.8L * i / 9, 5 + 45.0L * j / 9);
            cplx fd = (zeta(s + h) - zeta(s - h)) / (2 * h);
            worst = std::max(worst, std::abs(fd - zeta_prime(s)));
        }
    CHECK(double(worst) < 1e-6);
}

TEST_CASE("chi") {
    for (real t : {10.0L, 20.0L, 50.0L, 100.0L, 3000.0L})
        CHECK(double(std::fabs(std::abs(chi(cplx(0.5L, t))) - 1)) < 1e-10);
    // the two representations agree where both are regular
    for (real sigma : {0.2L, 0.45L, 0.55L, 0.8L}) {
        cplx s(sigma, 37.5L);
        CHECK(double(std::abs(std::exp(detail::log_chi_sin_form(s)) - std::exp(detail::log_chi_cos_form(s)))) <
              1e-12);
    }
    CHECK(double(std::abs(chi_log_deriv(cplx(0.5L, 50)) + std::log(50 / two_pi))) < 0.05);
    // chi'/chi against a finite difference of log chi
    cplx s(0.7L, 123.4L);
    const real h = 1e-6L;
    cplx fd = (std::log(chi(s + h) / chi(s - h))) / (2 * h);
    CHECK(double(std::abs(fd - chi_log_deriv(s))) < 1e-8);
    cplx s2(0.3L, -12.0L);
    cplx fd2 = (std::log(chi(s2 + h) / chi(s2 - h))) / (2 * h);
    CHECK(double(std::abs(fd2 - chi_log_deriv(s2))) < 1e-8);
    CHECK_THROWS_AS(chi(3), DomainError);
    CHECK_THROWS_AS(chi_log_deriv(-2), DomainError);
    CHECK(chi(-2) == cplx(0));
}

TEST_CASE("log gamma and digamma") {
    CHECK(double(std::abs(log_gamma(5) - std::log(24.0L))) < 1e-16);
    CHECK(double(std::abs(std::exp(log_gamma(0.5L)) - std::sqrt(pi))) < 1e-16);
    CHECK(double(std::abs(std::exp(log_gamma(cplx(-2.5L, 0))) - cplx(-0.9453087204829419L, 0))) < 1e-14);
    CHECK(double(std::abs(digamma(1) + euler_gamma)) < 1e-16);
    // |Gamma(1/2 + it)|^2 = pi / cosh(pi t)
    real t = 7.3L;
    CHECK(double(std::fabs(2 * log_gamma(cplx(0.5L, t)).real() - std::log(pi / std::cosh(pi * t)))) < 1e-14);
    // recurrence
    cplx z(-3.7L, 2.2L);
    CHECK(double(std::abs(digamma(z + real(1)) - digamma(z) - real(1) / z)) < 1e-14);
    CHECK_THROWS_AS(log_gamma(-3), DomainError);
}

TEST_CASE("theta and Z") {
    for (real t : {10.0L, 14.0L, 50.0L, 100.0L, 1000.0L, 5000.0L})
        CHECK(double(std::fabs(theta_rs(t) - theta_exact(t))) < 1e-8);
    CHECK_THROWS_AS(theta_rs(9.5L), DomainError);
    CHECK(hardy_z(14.0L) * hardy_z(14.2L) < 0);
    CHECK(hardy_z(20.9L) * hardy_z(21.1L) < 0);
    real t = 30;
    CHECK(double(std::fabs(std::fabs(hardy_z(t)) - std::abs(zeta(cplx(0.5L, t))))) < 1e-12);
    CHECK(std::isfinite(double(hardy_z(5.0L))));
    // Z(t) is real: the rotated value has negligible imaginary part
    cplx rot = std::polar<real>(1, theta(1234.5L)) * zeta(cplx(0.5L, 1234.5L));
    CHECK(double(std::fabs(rot.imag())) < 1e-10);
}

TEST_CASE("precision configuration") {
    PrecisionConfig bad;
    bad.bernoulli_order = 3;
    CHECK_THROWS_AS(zeta(2, bad), DomainError);
    PrecisionConfig tight;
    tight.target_abs_error = 1e-30L;
    CHECK_THROWS_AS(zeta(cplx(0.5L, 1000), tight), PrecisionError);
    PrecisionConfig few;
    few.bernoulli_order = 2;
    CHECK_THROWS_AS(zeta(cplx(0.5L, 1000), few), PrecisionError);
    PrecisionConfig big;
    big.euler_maclaurin_terms = 500;
    CHECK(double(std::abs(zeta(cplx(0.5L, 100), big) - zeta(cplx(0.5L, 100)))) < 1e-13);
}
