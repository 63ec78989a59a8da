#include <catch_amalgamated.hpp>

#include <zmoments/quadrature.hpp>

using namespace zmoments;

TEST_CASE("oscillatory integrals with closed forms") {
    // int_0^100 e^{i w t} dt
    for (real w : {0.5L, 3.0L, 11.0L}) {
        auto r = oscillatory_integrate([w](real t) { return std::polar<real>(1, w * t); }, 0, 100, w, {1e-12L, 12, 0});
        cplx exact = (std::polar<real>(1, 100 * w) - real(1)) / cplx(0, w);
        CHECK(std::abs(r.value - exact) < 1e-11L);
        CHECK(r.panels >= static_cast<std::size_t>(100 / (pi / (2 * w))));
    }
    // int_1^T t^{-1/2 + i log 7} dt
    real T = 500, l = std::log(7.0L);
    auto r = oscillatory_integrate([l](real t) { return std::pow(cplx(t), cplx(-0.5L, l)); }, 1, T,
                                   l + 1, {1e-10L, 12, 0});
    cplx s(0.5L, l);
    cplx exact = (std::pow(cplx(T), s) - real(1)) / s;
    CHECK(std::abs(r.value - exact) < 1e-9L);
}

TEST_CASE("smooth integrals") {
    auto r = oscillatory_integrate([](real t) { return cplx(std::log(t)); }, 1, 1000, 0.01L, {1e-10L, 12, 0});
    real exact = 1000 * std::log(1000.0L) - 1000 + 1;
    CHECK(std::fabs(r.value.real() - exact) < 1e-9L);
    CHECK(std::fabs(r.value.imag()) == 0);
    CHECK(oscillatory_integrate([](real) { return cplx(1); }, 3, 3, 1).value == cplx(0));
}

TEST_CASE("quadrature errors") {
    auto f = [](real t) { return cplx(1 / std::sqrt(t)); };
    CHECK_THROWS_AS(oscillatory_integrate(f, 0, 1, 1, {1e-30L, 0, 0}), QuadratureError);
    CHECK_THROWS_AS(oscillatory_integrate(f, 2, 1, 1), DomainError);
    CHECK_THROWS_AS(oscillatory_integrate(f, 1, 2, 0), DomainError);
}
