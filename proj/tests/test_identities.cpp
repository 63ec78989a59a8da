#include <catch_amalgamated.hpp>

#include <zmoments/identities.hpp>

using namespace zmoments;

TEST_CASE("arithmetic identity suite") {
    auto r = arith_identity_suite(2000);
    REQUIRE(r.size() == 6);
    for (auto& x : r) {
        INFO(x.name << " residual " << static_cast<double>(x.max_residual));
        CHECK(x.pass());
        CHECK(x.cases >= 2000);
    }
    for (auto& x : arith_identity_suite(0)) {
        CHECK(x.pass());
        CHECK(x.cases == 0);
    }
}

TEST_CASE("character identity suite") {
    for (auto& x : character_identity_suite(20, 15, 20, 15)) {
        INFO(x.name << " residual " << static_cast<double>(x.max_residual));
        CHECK(x.pass());
        CHECK(x.cases > 0);
    }
}

TEST_CASE("property checks") {
    auto r = resonator_multiplicativity(2000);
    CHECK(r.pass());
    CHECK(r.cases > 100);
    auto c = convolution_oracle(300);
    CHECK(c.pass());
    CHECK(c.cases == 1200);
}

TEST_CASE("a NaN residual fails") {
    detail::Tracker t;
    t.r.tolerance = 1;
    t(0.5L);
    t(NAN);
    CHECK_FALSE(t.r.pass());
}
