#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "gtfm/stats.hpp"

using namespace gtfm;

TEST_CASE("mean and variance basics") {
    std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    CHECK(mean(v) == Catch::Approx(2.5));
    CHECK(variance(v) == Catch::Approx(5.0 / 3.0));
    CHECK(variance(v, 0) == Catch::Approx(1.25));
    CHECK(stddev(v) == Catch::Approx(std::sqrt(5.0 / 3.0)));
    CHECK_THROWS_AS(mean(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(variance(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("quantile follows the interpolation rule") {
    std::vector<double> v;
    for (int i = 1; i <= 100; ++i) v.push_back(i);
    CHECK(quantile(v, 0.5) == Catch::Approx(50.5));
    CHECK(quantile(v, 0.0) == Catch::Approx(1.0));
    CHECK(quantile(v, 1.0) == Catch::Approx(100.0));
    CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.25) == Catch::Approx(1.75));
    CHECK(quantile({5.0}, 0.99) == Catch::Approx(5.0));
    CHECK_THROWS_AS(quantile({1.0}, 1.5), std::invalid_argument);
}

TEST_CASE("logsumexp is stable and exact") {
    CHECK(logsumexp({std::log(0.5), std::log(0.25)}) == Catch::Approx(std::log(0.75)));
    CHECK(logsumexp({-1000.0, -1000.0}) == Catch::Approx(-1000.0 + std::log(2.0)));
    CHECK(logsumexp({-std::numeric_limits<double>::infinity(), 0.0}) == Catch::Approx(0.0));
}

TEST_CASE("acf lag zero is one") {
    std::vector<double> v{0.4, -1.2, 0.7, 2.0, -0.3, 0.9};
    const auto r = acf(v, 3);
    REQUIRE(r.size() == 4);
    CHECK(r[0] == Catch::Approx(1.0));
    for (double x : r) CHECK(std::abs(x) <= 1.0 + 1e-12);
}

TEST_CASE("alternating series has acf(1) near -1") {
    std::vector<double> v;
    for (int i = 0; i < 50; ++i) v.push_back(i % 2 == 0 ? 1.0 : -1.0);
    CHECK(acf(v, 1)[1] < -0.9);
}

TEST_CASE("log_normal_pdf at the mode") {
    CHECK(log_normal_pdf(0.0, 0.0, 1.0) == Catch::Approx(-0.5 * std::log(2.0 * M_PI)));
    CHECK(log_normal_pdf(1.0, 1.0, 2.0) ==
          Catch::Approx(-0.5 * std::log(2.0 * M_PI) - std::log(2.0)));
}
