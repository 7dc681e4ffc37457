#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "gtfm/impact.hpp"
#include "gtfm/stats.hpp"

using namespace gtfm;

namespace {

// Straight transcription of the defining sums, kept independent of the
// library implementation.
double brute_response(const std::vector<double>& y, const std::vector<double>& x, int j) {
    const double ybar = mean(y);
    const double xbar = mean(x);
    double s = 0.0;
    for (std::size_t t = 0; t + j < y.size(); ++t)
        s += (y[t + j] - ybar) * (x[t] - xbar);
    return s / static_cast<double>(y.size());
}

double brute_diffusion(const std::vector<double>& y, const std::vector<double>& x, int j) {
    const double ybar = mean(y);
    const double xbar = mean(x);
    double s = 0.0;
    for (std::size_t t = 0; t + j < y.size(); ++t)
        s += (y[t + j] - ybar) * (y[t + j] - ybar) * (x[t] - xbar);
    return s / static_cast<double>(y.size());
}

}  // namespace

TEST_CASE("response on an alternating pair") {
    const std::vector<double> y{1, -1, 1, -1};
    const auto c = response(y, y, 1);
    REQUIRE(c.values.size() == 2);
    CHECK(c.values[0] == Catch::Approx(1.0));
    CHECK(c.values[1] == Catch::Approx(-0.75));
    CHECK(c.max_lag() == 1);
    CHECK(c.kind == ImpactKind::response);
}

TEST_CASE("constant series give zero curves") {
    const std::vector<double> y{2, 2, 2, 2, 2};
    const std::vector<double> x{1, 3, -1, 0, 2};
    for (double v : response(y, x, 3).values) CHECK(v == 0.0);
    for (double v : response(x, y, 3).values) CHECK(v == 0.0);
    for (double v : diffusion(y, x, 3).values) CHECK(v == 0.0);
}

TEST_CASE("diffusion of a two level series against an alternating driver") {
    // Squared deviations are identically 1, so D(j) collapses to the partial
    // sums of the centered driver: 0, 1, 0, 1 over four, then divided by T.
    const std::vector<double> y{0, 2, 0, 2};
    const std::vector<double> x{1, -1, 1, -1};
    const auto d = diffusion(y, x, 3);
    CHECK(d.values[0] == Catch::Approx(0.0).margin(1e-15));
    CHECK(d.values[1] == Catch::Approx(0.25).margin(1e-15));
    CHECK(d.values[2] == Catch::Approx(0.0).margin(1e-15));
    CHECK(d.values[3] == Catch::Approx(0.25).margin(1e-15));
}

TEST_CASE("impact input validation") {
    const std::vector<double> y{1, 2, 3};
    CHECK_THROWS_AS(response(y, {1, 2}, 1), std::invalid_argument);
    CHECK_THROWS_AS(response({1}, {1}, 0), std::invalid_argument);
    CHECK_THROWS_AS(response(y, y, 3), std::invalid_argument);
    CHECK_THROWS_AS(response(y, y, -1), std::invalid_argument);
    CHECK_NOTHROW(response(y, y, 2));
}

TEST_CASE("curves match the defining sums on random data") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> nd;
    for (int rep = 0; rep < 20; ++rep) {
        const int T = 5 + static_cast<int>(rng() % 8);
        std::vector<double> y(T), x(T);
        for (auto& v : y) v = nd(rng);
        for (auto& v : x) v = nd(rng);
        const int L = T - 1;
        const auto r = response(y, x, L);
        const auto d = diffusion(y, x, L);
        for (int j = 0; j <= L; ++j) {
            CHECK(r.values[j] == Catch::Approx(brute_response(y, x, j)).margin(1e-12));
            CHECK(d.values[j] == Catch::Approx(brute_diffusion(y, x, j)).margin(1e-12));
        }
    }
}

TEST_CASE("response is invariant to shifts and linear in scale") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    std::vector<double> y(20), x(20);
    for (auto& v : y) v = nd(rng);
    for (auto& v : x) v = nd(rng);
    const auto base = response(y, x, 5);

    std::vector<double> ys = y, xs = x;
    for (auto& v : ys) v += 100.0;
    for (auto& v : xs) v -= 42.0;
    const auto shifted = response(ys, xs, 5);
    for (int j = 0; j <= 5; ++j)
        CHECK(shifted.values[j] == Catch::Approx(base.values[j]).margin(1e-12));

    std::vector<double> y2 = y;
    for (auto& v : y2) v *= 3.0;
    const auto scaled = response(y2, x, 5);
    for (int j = 0; j <= 5; ++j)
        CHECK(scaled.values[j] == Catch::Approx(3.0 * base.values[j]).margin(1e-12));
}

TEST_CASE("mean_decay under both conventions") {
    ImpactCurve c;
    c.values = {4, 2, 1};
    CHECK(mean_decay(c, DecayConvention::zero_anchor) == Catch::Approx(2.0));
    CHECK(mean_decay(c, DecayConvention::lag_zero_diff) == Catch::Approx(-2.0));
    CHECK(mean_decay(c) == Catch::Approx(-2.0));

    ImpactCurve flat;
    flat.values = {3, 3, 3, 3};
    CHECK(mean_decay(flat, DecayConvention::zero_anchor) == Catch::Approx(1.5));
    CHECK(mean_decay(flat, DecayConvention::lag_zero_diff) == Catch::Approx(0.0));

    ImpactCurve zero;
    zero.values = {0, 0, 0};
    CHECK(mean_decay(zero, DecayConvention::zero_anchor) == 0.0);

    ImpactCurve tiny;
    tiny.values = {1, 2};
    CHECK_THROWS_AS(mean_decay(tiny), std::invalid_argument);
}

TEST_CASE("hit_indicator fires when decay opposes the coefficient sign") {
    ImpactCurve down;
    down.values = {4, 2, 1};  // lag_zero_diff decay -2
    CHECK(hit_indicator(down, 1) == 1);
    CHECK(hit_indicator(down, -1) == 0);
    CHECK(hit_indicator(down, 1, DecayConvention::zero_anchor) == 0);

    ImpactCurve up;
    up.values = {-4, -2, -1};
    CHECK(hit_indicator(up, -1) == 1);
    CHECK(hit_indicator(up, 1) == 0);

    ImpactCurve zero;
    zero.values = {0, 0, 0};
    CHECK(hit_indicator(zero, 1) == 0);
    CHECK(hit_indicator(zero, -1) == 0);

    CHECK_THROWS_AS(hit_indicator(down, 0), std::invalid_argument);
    CHECK_THROWS_AS(hit_indicator(down, 2), std::invalid_argument);
}

TEST_CASE("classify_decay covers every shape") {
    ImpactCurve c;
    c.values = {4, 2, 1, 0.5};
    CHECK(classify_decay(c) == DecayKind::monotone);

    c.values = {4, -2, 1, -0.5};
    CHECK(classify_decay(c) == DecayKind::wave);

    c.values = {4, 3.8, 3.5, 3.2};
    CHECK(classify_decay(c) == DecayKind::persistent);

    c.values = {0, 0, 0, 0};
    CHECK(classify_decay(c) == DecayKind::flat);

    c.values = {-4, -2, -1, -0.5};
    CHECK(classify_decay(c) == DecayKind::monotone);

    c.values = {1, 2, 3, 0.4};  // rising then collapsing, no sign change
    CHECK(classify_decay(c) == DecayKind::persistent);

    c.values = {1, 2};
    CHECK_THROWS_AS(classify_decay(c), std::invalid_argument);
}

TEST_CASE("decay kind names") {
    CHECK(std::string(to_string(DecayKind::monotone)) == "monotone");
    CHECK(std::string(to_string(DecayKind::wave)) == "wave");
    CHECK(std::string(to_string(DecayKind::persistent)) == "persistent");
    CHECK(std::string(to_string(DecayKind::flat)) == "flat");
}

TEST_CASE("flat tolerance is configurable") {
    ImpactCurve c;
    c.values = {1e-6, 5e-7, 2e-7, 1e-7};
    CHECK(classify_decay(c) == DecayKind::monotone);
    DecayRules rules;
    rules.tol_flat = 1e-3;
    CHECK(classify_decay(c, rules) == DecayKind::flat);
}
