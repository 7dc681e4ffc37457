#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtfm/hmc.hpp"
#include "gtfm/model.hpp"
#include "gtfm/scenario.hpp"
#include "gtfm/stats.hpp"

namespace gtfm {

struct ScenarioProjection {
    std::string name;
    std::vector<std::vector<double>> draws;  // H rows, one predictive draw per posterior draw
    std::vector<double> mean;
    std::vector<double> lo;  // 2.5%
    std::vector<double> hi;  // 97.5%
};

struct ProjectionResult {
    Period start;  // first projected quarter
    int horizon = 0;
    std::vector<ScenarioProjection> scenarios;

    const ScenarioProjection& scenario(const std::string& name) const {
        for (const auto& s : scenarios)
            if (s.name == name) return s;
        throw std::invalid_argument("no projected scenario named '" + name + "'");
    }
};

/// Posterior-predictive projection along each scenario. For every retained
/// draw the recursion is iterated h = 1..H:
///   E_{T+h} ~ N(phi_{T+h-1} E_{T+h-1} + x_{T+h}' beta, sigma_E^2)
///   phi_{T+h} ~ N(phi_{T+h-1}, sigma_phi^2)      (time-varying only)
///   Y_{T+h} ~ N(E_{T+h}, sigma_v^2)              (eta_free; else Y = E)
/// Note the mean of E uses the previous step's resilience; the fresh phi
/// enters one step later. Lagged regressors reach back into the observed
/// frame for the first steps. Deterministic given seed: each (scenario,
/// draw) task uses its own generator.
inline ProjectionResult project(const ModelSpec& spec, const TimeSeriesFrame& frame,
                                const PosteriorDraws& post, const ScenarioSet& scenarios,
                                int H, std::uint64_t seed) {
    spec.validate();
    const DesignMatrix d = build_design(spec, frame);
    const ParamLayout L = build_layout(spec, d.T());
    if (post.dim() != static_cast<std::size_t>(L.dim()))
        throw std::invalid_argument("project: draws do not match the model layout");
    if (H < 1 || static_cast<std::size_t>(H) > scenarios.horizon)
        throw std::invalid_argument("project: horizon exceeds scenario data");

    std::set<std::string> have(scenarios.macro_names.begin(), scenarios.macro_names.end());
    std::set<std::string> need;
    for (const auto& t : spec.terms) need.insert(t.name);
    if (have != need) {
        std::string msg = "project: scenario macro columns do not match the model; model uses";
        for (const auto& n : need) msg += " " + n;
        throw std::invalid_argument(msg);
    }

    const Period last_obs = frame.period_at(frame.rows() - 1);
    if (scenarios.start != last_obs.plus(1))
        throw std::invalid_argument("project: scenarios start at " + scenarios.start.str() +
                                    " but the frame ends at " + last_obs.str());

    const int T_raw = static_cast<int>(frame.rows());
    const bool tv = spec.resilience == ResilienceMode::time_varying;
    const bool eta_free = spec.noise == NoiseMode::eta_free;
    const std::size_t M = post.size();

    // Scenario macro column lookup in file order.
    std::vector<std::size_t> macro_col(spec.terms.size());
    for (std::size_t k = 0; k < spec.terms.size(); ++k)
        for (std::size_t c = 0; c < scenarios.macro_names.size(); ++c)
            if (scenarios.macro_names[c] == spec.terms[k].name) macro_col[k] = c;

    // Value of macro k at absolute 1-based time tau (observed or scenario).
    auto macro_at = [&](std::size_t s, std::size_t k, int tau) {
        if (tau <= T_raw) {
            const auto& col = frame.col(spec.terms[k].name);
            return col[static_cast<std::size_t>(tau - 1)];
        }
        return scenarios.paths[s][static_cast<std::size_t>(tau - T_raw - 1)][macro_col[k]];
    };

    ProjectionResult out;
    out.start = scenarios.start;
    out.horizon = H;

    for (std::size_t s = 0; s < scenarios.scenario_names.size(); ++s) {
        ScenarioProjection proj;
        proj.name = scenarios.scenario_names[s];
        proj.draws.assign(static_cast<std::size_t>(H), std::vector<double>(M));

        for (std::size_t m = 0; m < M; ++m) {
            std::mt19937_64 rng(seed + 1000003ULL * s + m);
            std::normal_distribution<double> nd(0.0, 1.0);
            const auto& row = post.draws[m];

            const double alpha = row[static_cast<std::size_t>(L.alpha)];
            const double sigma_e = row[static_cast<std::size_t>(L.sigma_e)];
            const double sigma_v =
                eta_free ? row[static_cast<std::size_t>(L.eta)] * sigma_e : 0.0;
            const double sigma_phi = tv ? row[static_cast<std::size_t>(L.sigma_phi)] : 0.0;
            double phi = tv ? row[static_cast<std::size_t>(L.phi_path0 + L.T - 1)]
                            : row[static_cast<std::size_t>(L.phi)];
            double E = eta_free ? row[static_cast<std::size_t>(L.state0 + L.T - 1)]
                                : d.y.back();

            for (int h = 1; h <= H; ++h) {
                double mu = alpha + phi * E;
                int k = 0;
                for (std::size_t term = 0; term < spec.terms.size(); ++term)
                    for (int j = 0; j <= spec.terms[term].lags; ++j, ++k)
                        mu += row[static_cast<std::size_t>(L.beta0 + k)] *
                              macro_at(s, term, T_raw + h - j);
                E = mu + sigma_e * nd(rng);
                if (tv) phi = phi + sigma_phi * nd(rng);
                const double y = eta_free ? E + sigma_v * nd(rng) : E;
                proj.draws[static_cast<std::size_t>(h - 1)][m] = y;
            }
        }
        for (int h = 0; h < H; ++h) {
            const auto& dr = proj.draws[static_cast<std::size_t>(h)];
            proj.mean.push_back(mean(dr));
            proj.lo.push_back(quantile(dr, 0.025));
            proj.hi.push_back(quantile(dr, 0.975));
        }
        out.scenarios.push_back(std::move(proj));
    }
    return out;
}

struct CoherencePair {
    std::string more_severe;
    std::string less_severe;
    double coherence = 0.0;  // fraction of steps with the declared strict ordering
    bool overlap = false;
};

struct CoherenceReport {
    std::vector<CoherencePair> pairs;
    bool coherent = true;
};

/// Checks that mean projected paths respect a declared severity ordering
/// (most severe first, meaning the highest projected risk). Any step where
/// an adjacent pair ties or inverts counts against coherence.
inline CoherenceReport coherence_check(const ProjectionResult& result,
                                       const std::vector<std::string>& severity_order) {
    if (severity_order.size() < 2)
        throw std::invalid_argument("coherence_check: need at least two scenarios");
    CoherenceReport rep;
    for (std::size_t i = 0; i + 1 < severity_order.size(); ++i) {
        const auto& a = result.scenario(severity_order[i]);
        const auto& b = result.scenario(severity_order[i + 1]);
        CoherencePair pair;
        pair.more_severe = a.name;
        pair.less_severe = b.name;
        int ok = 0;
        for (int h = 0; h < result.horizon; ++h)
            if (a.mean[static_cast<std::size_t>(h)] > b.mean[static_cast<std::size_t>(h)]) ++ok;
        pair.coherence = static_cast<double>(ok) / static_cast<double>(result.horizon);
        pair.overlap = pair.coherence < 1.0;
        rep.coherent = rep.coherent && !pair.overlap;
        rep.pairs.push_back(std::move(pair));
    }
    return rep;
}

}  // namespace gtfm
