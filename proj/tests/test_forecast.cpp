#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "gtfm/forecast.hpp"
#include "gtfm/model.hpp"

using namespace gtfm;

namespace {

TimeSeriesFrame frame4() {
    return TimeSeriesFrame(Period{2010, 1}, {"y", "g"},
                           {{1.0, 2.0, 1.5, 2.5}, {0.5, 0.3, 0.2, 0.1}}, "y");
}

ModelSpec one_macro(int lags, ResilienceMode res, NoiseMode noise) {
    ModelSpec m;
    m.name = "tiny";
    m.terms = {{"g", lags, Prior{PriorKind::half_normal_pos, 0.0, 1.0}}};
    m.resilience = res;
    m.noise = noise;
    return m;
}

ScenarioSet one_scenario(const std::vector<double>& g_path) {
    ScenarioSet s;
    s.scenario_names = {"base"};
    s.macro_names = {"g"};
    s.start = Period{2011, 1};
    s.horizon = g_path.size();
    s.paths.resize(1);
    for (double v : g_path) s.paths[0].push_back({v});
    return s;
}

PosteriorDraws make_draws(const ParamLayout& L, std::size_t M,
                          const std::function<void(std::size_t, std::vector<double>&)>& fill) {
    PosteriorDraws p;
    for (int i = 0; i < L.dim(); ++i) p.names.push_back("s" + std::to_string(i));
    p.n_chains = 1;
    p.n_keep = static_cast<int>(M);
    for (std::size_t m = 0; m < M; ++m) {
        std::vector<double> row(static_cast<std::size_t>(L.dim()), 0.0);
        fill(m, row);
        p.draws.push_back(std::move(row));
        p.chain_ids.push_back(0);
    }
    return p;
}

}  // namespace

TEST_CASE("project iterates the noiseless recursion exactly") {
    const auto frame = frame4();
    const auto spec = one_macro(0, ResilienceMode::fixed, NoiseMode::eta_zero);
    const auto L = build_layout(spec, build_design(spec, frame).T());
    const auto post = make_draws(L, 1, [&](std::size_t, std::vector<double>& r) {
        r[L.alpha] = 1.0;
        r[L.beta0] = 0.5;
        r[L.phi] = 0.5;
        r[L.sigma_e] = 0.0;
    });
    const auto res = project(spec, frame, post, one_scenario({1.0, 2.0, 0.0}), 3, 9);
    CHECK(res.start == Period{2011, 1});
    CHECK(res.horizon == 3);
    const auto& s = res.scenario("base");
    // E_0 = 2.5; each step: 1 + 0.5 E + 0.5 g.
    const std::vector<double> want{2.75, 3.375, 2.6875};
    for (int h = 0; h < 3; ++h) {
        CHECK(s.draws[h][0] == Catch::Approx(want[h]).margin(1e-12));
        CHECK(s.mean[h] == Catch::Approx(want[h]).margin(1e-12));
        CHECK(s.lo[h] == Catch::Approx(want[h]).margin(1e-12));
        CHECK(s.hi[h] == Catch::Approx(want[h]).margin(1e-12));
    }
}

TEST_CASE("project reaches back into the observed frame for lagged macros") {
    const auto frame = frame4();
    const auto spec = one_macro(1, ResilienceMode::fixed, NoiseMode::eta_zero);
    const auto L = build_layout(spec, build_design(spec, frame).T());
    const auto post = make_draws(L, 1, [&](std::size_t, std::vector<double>& r) {
        r[L.beta0] = 1.0;      // g_L0
        r[L.beta0 + 1] = 2.0;  // g_L1
    });
    const auto res = project(spec, frame, post, one_scenario({1.0, 2.0}), 2, 9);
    const auto& s = res.scenario("base");
    CHECK(s.draws[0][0] == Catch::Approx(1.0 * 1.0 + 2.0 * 0.1).margin(1e-12));
    CHECK(s.draws[1][0] == Catch::Approx(1.0 * 2.0 + 2.0 * 1.0).margin(1e-12));
}

TEST_CASE("project starts a time-varying path from the final resilience draw") {
    const auto frame = frame4();
    const auto spec = one_macro(0, ResilienceMode::time_varying, NoiseMode::eta_zero);
    const auto L = build_layout(spec, build_design(spec, frame).T());
    const auto post = make_draws(L, 1, [&](std::size_t, std::vector<double>& r) {
        r[L.phi0] = 0.3;
        for (int t = 0; t < L.T; ++t) r[L.phi_path0 + t] = 0.9;
        r[L.phi_path0 + L.T - 1] = 0.5;  // the entry the projection must pick up
    });
    const auto res = project(spec, frame, post, one_scenario({0.0, 0.0}), 2, 9);
    const auto& s = res.scenario("base");
    CHECK(s.draws[0][0] == Catch::Approx(0.5 * 2.5).margin(1e-12));
    CHECK(s.draws[1][0] == Catch::Approx(0.25 * 2.5).margin(1e-12));
}

TEST_CASE("project seeds the recursion from the final latent state when present") {
    const auto frame = frame4();
    const auto spec = one_macro(0, ResilienceMode::fixed, NoiseMode::eta_free);
    const auto L = build_layout(spec, build_design(spec, frame).T());
    const auto post = make_draws(L, 1, [&](std::size_t, std::vector<double>& r) {
        r[L.alpha] = 1.0;
        r[L.phi] = 0.5;
        r[L.eta] = 2.0;
        for (int t = 0; t < L.T; ++t) r[L.state0 + t] = 7.0;
    });
    const auto res = project(spec, frame, post, one_scenario({0.0}), 1, 9);
    CHECK(res.scenario("base").draws[0][0] == Catch::Approx(1.0 + 0.5 * 7.0).margin(1e-12));
}

TEST_CASE("project matches a straight-loop reimplementation draw for draw") {
    const auto frame = frame4();
    const auto spec = one_macro(1, ResilienceMode::time_varying, NoiseMode::eta_free);
    const DesignMatrix d = build_design(spec, frame);
    const auto L = build_layout(spec, d.T());

    std::mt19937_64 gen(404);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.1, 0.9);
    const std::size_t M = 40;
    const auto post = make_draws(L, M, [&](std::size_t, std::vector<double>& r) {
        r[L.alpha] = 1.0 + 0.1 * nd(gen);
        r[L.beta0] = std::abs(nd(gen)) * 0.3;
        r[L.beta0 + 1] = std::abs(nd(gen)) * 0.3;
        r[L.phi0] = ud(gen);
        for (int t = 0; t < L.T; ++t) r[L.phi_path0 + t] = ud(gen);
        r[L.sigma_e] = 0.05 + std::abs(nd(gen)) * 0.2;
        r[L.sigma_phi] = 0.01 + std::abs(nd(gen)) * 0.05;
        r[L.eta] = 0.5 + std::abs(nd(gen));
        for (int t = 0; t < L.T; ++t) r[L.state0 + t] = 2.0 + nd(gen);
    });

    ScenarioSet scen;
    scen.scenario_names = {"up", "down"};
    scen.macro_names = {"g"};
    scen.start = Period{2011, 1};
    scen.horizon = 3;
    scen.paths = {{{1.0}, {2.0}, {3.0}}, {{-1.0}, {-2.0}, {-3.0}}};

    const int H = 3;
    const std::uint64_t seed = 77;
    const auto res = project(spec, frame, post, scen, H, seed);

    const std::vector<double> g_obs = frame.col("g");
    for (std::size_t s = 0; s < 2; ++s) {
        for (std::size_t m = 0; m < M; ++m) {
            std::mt19937_64 rng(seed + 1000003ULL * s + m);
            std::normal_distribution<double> eps;
            const auto& r = post.draws[m];
            double phi = r[L.phi_path0 + L.T - 1];
            double E = r[L.state0 + L.T - 1];
            auto g_at = [&](int tau) {
                return tau <= 4 ? g_obs[tau - 1] : scen.paths[s][tau - 5][0];
            };
            for (int h = 1; h <= H; ++h) {
                double mu = r[L.alpha] + phi * E + r[L.beta0] * g_at(4 + h) +
                            r[L.beta0 + 1] * g_at(4 + h - 1);
                E = mu + r[L.sigma_e] * eps(rng);
                phi = phi + r[L.sigma_phi] * eps(rng);
                const double y = E + r[L.eta] * r[L.sigma_e] * eps(rng);
                CHECK(res.scenarios[s].draws[h - 1][m] == y);
            }
        }
    }
}

TEST_CASE("project is deterministic in the seed") {
    const auto frame = frame4();
    const auto spec = one_macro(0, ResilienceMode::fixed, NoiseMode::eta_zero);
    const auto L = build_layout(spec, build_design(spec, frame).T());
    const auto post = make_draws(L, 20, [&](std::size_t m, std::vector<double>& r) {
        r[L.alpha] = 0.5 + 0.01 * static_cast<double>(m);
        r[L.phi] = 0.4;
        r[L.sigma_e] = 0.3;
    });
    const auto scen = one_scenario({1.0, 0.5});
    const auto a = project(spec, frame, post, scen, 2, 55);
    const auto b = project(spec, frame, post, scen, 2, 55);
    const auto c = project(spec, frame, post, scen, 2, 56);
    bool same = true, all_same_c = true;
    for (int h = 0; h < 2; ++h)
        for (std::size_t m = 0; m < 20; ++m) {
            same = same && a.scenarios[0].draws[h][m] == b.scenarios[0].draws[h][m];
            all_same_c = all_same_c && a.scenarios[0].draws[h][m] == c.scenarios[0].draws[h][m];
        }
    CHECK(same);
    CHECK_FALSE(all_same_c);
}

TEST_CASE("project averages the per-draw recursions") {
    const auto frame = frame4();
    const auto spec = one_macro(0, ResilienceMode::fixed, NoiseMode::eta_zero);
    const auto L = build_layout(spec, build_design(spec, frame).T());
    const std::vector<double> alphas{1.0, 2.0, 3.0};
    const auto post = make_draws(L, 3, [&](std::size_t m, std::vector<double>& r) {
        r[L.alpha] = alphas[m];
        r[L.beta0] = 0.5;
        r[L.phi] = 0.5;
    });
    const auto res = project(spec, frame, post, one_scenario({1.0, 2.0}), 2, 9);
    const auto& s = res.scenario("base");
    for (int h = 0; h < 2; ++h) {
        double acc = 0.0;
        for (std::size_t m = 0; m < 3; ++m) {
            double E = 2.5;
            for (int step = 0; step <= h; ++step)
                E = alphas[m] + 0.5 * E + 0.5 * (step == 0 ? 1.0 : 2.0);
            acc += E;
        }
        CHECK(s.mean[h] == Catch::Approx(acc / 3.0).margin(1e-12));
    }
}

TEST_CASE("projection intervals widen with the horizon") {
    const auto frame = frame4();
    const auto spec = one_macro(0, ResilienceMode::fixed, NoiseMode::eta_zero);
    const auto L = build_layout(spec, build_design(spec, frame).T());
    const auto post = make_draws(L, 2000, [&](std::size_t, std::vector<double>& r) {
        r[L.phi] = 0.5;
        r[L.sigma_e] = 1.0;
    });
    const auto res = project(spec, frame, post, one_scenario({0.0, 0.0, 0.0}), 3, 123);
    const auto& s = res.scenario("base");
    CHECK(s.mean[0] == Catch::Approx(1.25).margin(0.1));
    const double w0 = s.hi[0] - s.lo[0];
    const double w2 = s.hi[2] - s.lo[2];
    CHECK(w0 > 3.0);
    CHECK(w2 > w0);
}

TEST_CASE("project validates its inputs") {
    const auto frame = frame4();
    const auto spec = one_macro(0, ResilienceMode::fixed, NoiseMode::eta_zero);
    const auto L = build_layout(spec, build_design(spec, frame).T());
    const auto post = make_draws(L, 2, [&](std::size_t, std::vector<double>& r) {
        r[L.phi] = 0.5;
        r[L.sigma_e] = 0.1;
    });
    const auto scen = one_scenario({1.0, 2.0});

    CHECK_THROWS_AS(project(spec, frame, post, scen, 0, 9), std::invalid_argument);
    CHECK_THROWS_AS(project(spec, frame, post, scen, 3, 9), std::invalid_argument);

    PosteriorDraws bad = post;
    bad.names.pop_back();
    CHECK_THROWS_AS(project(spec, frame, bad, scen, 2, 9), std::invalid_argument);

    ScenarioSet wrong = scen;
    wrong.macro_names = {"u"};
    CHECK_THROWS_AS(project(spec, frame, post, wrong, 2, 9), std::invalid_argument);

    ScenarioSet extra = scen;
    extra.macro_names = {"g", "u"};
    for (auto& row : extra.paths[0]) row.push_back(0.0);
    CHECK_THROWS_AS(project(spec, frame, post, extra, 2, 9), std::invalid_argument);

    ScenarioSet late = scen;
    late.start = Period{2011, 2};
    CHECK_THROWS_AS(project(spec, frame, post, late, 2, 9), std::invalid_argument);

    const auto ok = project(spec, frame, post, scen, 2, 9);
    CHECK_THROWS_AS(ok.scenario("nope"), std::invalid_argument);
}

namespace {

ProjectionResult hand_result(const std::vector<std::pair<std::string, std::vector<double>>>& means) {
    ProjectionResult r;
    r.start = Period{2011, 1};
    r.horizon = static_cast<int>(means.front().second.size());
    for (const auto& [name, m] : means) {
        ScenarioProjection p;
        p.name = name;
        p.mean = m;
        r.scenarios.push_back(std::move(p));
    }
    return r;
}

}  // namespace

TEST_CASE("coherence_check accepts a strictly ordered fan") {
    const auto res = hand_result({{"severe", {3.0, 3.1, 3.2}},
                                  {"base", {2.0, 2.0, 2.0}},
                                  {"mild", {1.0, 0.9, 0.8}}});
    const auto rep = coherence_check(res, {"severe", "base", "mild"});
    REQUIRE(rep.pairs.size() == 2);
    CHECK(rep.coherent);
    for (const auto& p : rep.pairs) {
        CHECK(p.coherence == 1.0);
        CHECK_FALSE(p.overlap);
    }
    CHECK(rep.pairs[0].more_severe == "severe");
    CHECK(rep.pairs[0].less_severe == "base");
}

TEST_CASE("coherence_check flags identical and partially inverted paths") {
    const auto same = hand_result({{"a", {2.0, 2.0}}, {"b", {2.0, 2.0}}});
    const auto rep = coherence_check(same, {"a", "b"});
    CHECK(rep.pairs[0].coherence == 0.0);
    CHECK(rep.pairs[0].overlap);
    CHECK_FALSE(rep.coherent);

    const auto partial = hand_result({{"a", {3.0, 2.0, 3.0}}, {"b", {2.0, 2.0, 1.0}}});
    const auto rep2 = coherence_check(partial, {"a", "b"});
    CHECK(rep2.pairs[0].coherence == Catch::Approx(2.0 / 3.0));
    CHECK(rep2.pairs[0].overlap);
}

TEST_CASE("coherence_check validates the ordering list") {
    const auto res = hand_result({{"a", {2.0}}, {"b", {1.0}}});
    CHECK_THROWS_AS(coherence_check(res, {"a"}), std::invalid_argument);
    CHECK_THROWS_AS(coherence_check(res, {"a", "missing"}), std::invalid_argument);
}
