#include <catch_amalgamated.hpp>

#include <fstream>

#include <zmoments/zeros.hpp>

using namespace zmoments;
using Catch::Approx;

namespace {

std::vector<real> oracle_zeros() {
    std::ifstream in(std::string(ZM_TEST_DATA) + "/zeros100.txt");
    std::vector<real> g;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') g.push_back(std::stold(line));
    return g;
}

const ZeroList& zeros_to_300() {
    static ZeroList z = find_zeros(300);
    return z;
}

}  // namespace

TEST_CASE("zero counts at small heights") {
    auto z100 = find_zeros(100);
    CHECK(z100.size() == 29);
    CHECK(z100.certified);
    CHECK(double(z100.gammas.front()) == Approx(14.134725).margin(1e-6));
    CHECK(find_zeros(50).size() == 10);
    auto z15 = find_zeros(15);
    CHECK(z15.size() == 1);
    CHECK(z15.certified);
    CHECK_THROWS_AS(find_zeros(10), DomainError);
}

TEST_CASE("first 100 ordinates against the oracle table") {
    auto ref = oracle_zeros();
    REQUIRE(ref.size() == 100);
    const auto& z = zeros_to_300();
    REQUIRE(z.size() >= 100);
    real worst = 0;
    for (int i = 0; i < 100; ++i) worst = std::max(worst, std::fabs(z.gammas[i] - ref[i]));
    CHECK(double(worst) < 1e-9);
}

TEST_CASE("zero list structure") {
    const auto& z = zeros_to_300();
    CHECK_NOTHROW(z.validate());
    CHECK(z.abs_error <= 1e-8L);
    for (std::size_t i = 0; i < z.size(); ++i) {
        real g = z.gammas[i];
        if (i > 0) REQUIRE(g > z.gammas[i - 1]);
        real h = 10 * z.abs_error + 1e-10L;
        REQUIRE(hardy_z(g - h) * hardy_z(g + h) < 0);
    }
    CHECK(z.count_below(21.0L) == 1);
    CHECK(z.count_below(21.1L) == 2);
}

TEST_CASE("gram points") {
    for (long n : {0L, 1L, 10L, 100L, 1000L}) CHECK(double(std::fabs(theta(gram_point(n)) - n * pi)) < 1e-9);
    CHECK(double(gram_point(0)) == Approx(17.8455995405).margin(1e-8));
    CHECK(gram_point(1) > gram_point(0));
}

TEST_CASE("certificates up to 5000") {
    ZeroCertificate cert;
    auto z = find_zeros(5000, {}, &cert);
    // independent count from mpmath's nzeros
    CHECK(z.size() == 4520);
    CHECK(z.certified);
    CHECK(cert.argument_count == 4520);
    CHECK(cert.turing_applicable);
    CHECK(cert.turing_found == cert.turing_gram_index + 1);
    CHECK(double(argument_count_raw(1000)) == Approx(649).margin(1e-6));
}

TEST_CASE("snap endpoint") {
    const auto& z = zeros_to_300();
    real mid = (z.gammas[0] + z.gammas[1]) / 2;
    CHECK(double(snap_endpoint(14.2L, z)) == Approx(17.578).margin(1e-3));
    CHECK(snap_endpoint(14.2L, z) == mid);
    CHECK(snap_endpoint(21.0L, z) == mid);
    CHECK(snap_endpoint(5, z) == 5);
    CHECK(snap_endpoint(17.5L, z) == 17.5L);
    // the result is clear of zeros by at least the margin used
    for (real t : {50.0L, 100.0L, 200.0L, 236.5L}) {
        real s = snap_endpoint(t, z);
        std::size_t i = z.count_below(s);
        real gap = std::min(s - z.gammas[i - 1], z.gammas[i] - s);
        CHECK(gap > 0.5L / std::log(t));
    }
    ZeroList unc = z;
    unc.certified = false;
    CHECK_THROWS_AS(snap_endpoint(100, unc), DomainError);
    CHECK_THROWS_AS(snap_endpoint(400, z), DomainError);
}
