#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "gtfm/multiplier.hpp"

using namespace gtfm;

TEST_CASE("geometric multiplier halves each lag at phi 0.5") {
    const auto spec = MultiplierSpec::geometric(10.0);
    CHECK(multiplier(spec, 0.5, 0) == Catch::Approx(10.0));
    CHECK(multiplier(spec, 0.5, 1) == Catch::Approx(5.0));
    CHECK(multiplier(spec, 0.5, 2) == Catch::Approx(2.5));
    CHECK(multiplier(spec, 0.0, 0) == Catch::Approx(10.0));
    CHECK(multiplier(spec, 0.0, 5) == Catch::Approx(0.0));
    CHECK(multiplier(spec, -0.5, 1) == Catch::Approx(-5.0));
    CHECK(multiplier(spec, -0.5, 2) == Catch::Approx(2.5));
}

TEST_CASE("superposition of two decays") {
    const auto spec = MultiplierSpec::superposition({1.0, 2.0});
    CHECK(spec.s == 1);
    CHECK(multiplier(spec, 0.5, 0) == Catch::Approx(1.0));
    CHECK(multiplier(spec, 0.5, 1) == Catch::Approx(2.5));
    CHECK(multiplier(spec, 0.5, 2) == Catch::Approx(1.25));
    CHECK(multiplier(spec, 0.5, 3) == Catch::Approx(0.625));
}

TEST_CASE("superposition matches a brute force convolution") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ub(-1.0, 1.0);
    std::uniform_real_distribution<double> up(-0.95, 0.95);
    for (int rep = 0; rep < 30; ++rep) {
        const int s = static_cast<int>(rng() % 5);
        std::vector<double> beta(static_cast<std::size_t>(s) + 1);
        for (auto& b : beta) b = ub(rng);
        const double phi = up(rng);
        const auto spec = MultiplierSpec::superposition(beta);
        for (int j = 0; j <= 50; ++j) {
            double expect = 0.0;
            for (int k = 0; k <= s; ++k)
                if (j >= k) expect += beta[static_cast<std::size_t>(k)] * std::pow(phi, j - k);
            CHECK(multiplier(spec, phi, j) == Catch::Approx(expect).margin(1e-12));
        }
    }
}

TEST_CASE("stochastic multiplier multiplies the resilience path") {
    const auto spec = MultiplierSpec::stochastic(2.0);
    const std::vector<double> path{0.5, 0.4, 0.9};
    CHECK(multiplier(spec, path, 0) == Catch::Approx(2.0));
    CHECK(multiplier(spec, path, 1) == Catch::Approx(1.0));
    CHECK(multiplier(spec, path, 2) == Catch::Approx(0.4));
    CHECK(multiplier(spec, path, 3) == Catch::Approx(0.36));
    CHECK_THROWS_AS(multiplier(spec, path, 4), std::invalid_argument);
}

TEST_CASE("constant resilience path reduces to the geometric multiplier") {
    const auto stoch = MultiplierSpec::stochastic(3.0);
    const auto geom = MultiplierSpec::geometric(3.0);
    const std::vector<double> path(12, 0.7);
    for (int j = 0; j <= 12; ++j)
        CHECK(multiplier(stoch, path, j) == Catch::Approx(multiplier(geom, 0.7, j)).margin(1e-14));
}

TEST_CASE("multiplier input validation") {
    const auto geom = MultiplierSpec::geometric(1.0);
    CHECK_THROWS_AS(multiplier(geom, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(multiplier(geom, -1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(multiplier(geom, 0.5, -1), std::invalid_argument);
    CHECK_THROWS_AS(MultiplierSpec::superposition({}), std::invalid_argument);
    CHECK_THROWS_AS(multiplier(MultiplierSpec::stochastic(1.0), 0.5, 0), std::invalid_argument);
    CHECK_THROWS_AS(multiplier(geom, std::vector<double>{0.5}, 0), std::invalid_argument);
    MultiplierSpec bad;
    bad.kind = MultiplierKind::geometric;
    bad.beta = {1.0, 2.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("transfer gain limits") {
    CHECK(transfer_gain_limit(MultiplierSpec::geometric(10.0), 0.5) == Catch::Approx(20.0));
    CHECK(transfer_gain_limit(MultiplierSpec::superposition({1.0, 2.0}), 0.7) ==
          Catch::Approx(10.0));
    CHECK(transfer_gain_limit(MultiplierSpec::geometric(3.0), 0.5) == Catch::Approx(6.0));
    CHECK(transfer_gain_limit(MultiplierSpec::geometric(1.0), -0.5) ==
          Catch::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(transfer_gain_limit(MultiplierSpec::stochastic(1.0), 0.5),
                    std::invalid_argument);
}

TEST_CASE("partial gains converge inside the analytic tail bound") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ub(-2.0, 2.0);
    std::uniform_real_distribution<double> up(-0.9, 0.9);
    for (int rep = 0; rep < 100; ++rep) {
        const double b = ub(rng);
        const double phi = up(rng);
        const auto spec = MultiplierSpec::geometric(b);
        const double limit = transfer_gain_limit(spec, phi);
        for (int J : {5, 10, 20, 40}) {
            const double bound = std::abs(b) * std::pow(std::abs(phi), J + 1) /
                                 (1.0 - std::abs(phi));
            CHECK(std::abs(transfer_gain(spec, phi, J) - limit) <= bound + 1e-12);
        }
    }
}

TEST_CASE("partial gain is a plain prefix sum") {
    const auto spec = MultiplierSpec::superposition({1.0, -0.5, 0.25});
    const double phi = 0.6;
    double acc = 0.0;
    for (int j = 0; j <= 8; ++j) {
        acc += multiplier(spec, phi, j);
        CHECK(transfer_gain(spec, phi, j) == Catch::Approx(acc).margin(1e-13));
    }
    CHECK_THROWS_AS(transfer_gain(spec, phi, -1), std::invalid_argument);
}

TEST_CASE("sign pattern of the geometric decay follows phi") {
    const auto spec = MultiplierSpec::geometric(1.0);
    for (int j = 0; j <= 6; ++j) {
        CHECK(multiplier(spec, 0.8, j) > 0.0);
        const double v = multiplier(spec, -0.8, j);
        CHECK((j % 2 == 0 ? v > 0.0 : v < 0.0));
    }
}
