#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "gtfm/stats.hpp"

namespace gtfm {

struct GpdFit {
    double k = 0.0;
    double sigma = 1.0;
};

namespace psis_detail {

/// Zhang & Stephens (2009) profile-posterior fit of the generalized Pareto
/// shape/scale to positive exceedances, with the usual weakly-informative
/// prior pull of k toward 0.5.
inline GpdFit gpd_fit(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    const std::size_t N = x.size();
    if (N < 5 || x.front() <= 0.0)
        throw std::invalid_argument("gpd_fit: need >= 5 positive exceedances");
    const double nd = static_cast<double>(N);
    const int M = 30 + static_cast<int>(std::floor(std::sqrt(nd)));
    const double xstar = x[static_cast<std::size_t>(std::floor(nd / 4.0 + 0.5)) - 1];

    auto k_of = [&](double theta) {
        double s = 0.0;
        for (double xi : x) s += std::log1p(-theta * xi);
        return s / nd;
    };

    std::vector<double> theta(static_cast<std::size_t>(M)), logl(static_cast<std::size_t>(M));
    for (int j = 1; j <= M; ++j) {
        const double t = 1.0 / x.back() +
                         (1.0 - std::sqrt(static_cast<double>(M) / (j - 0.5))) / (3.0 * xstar);
        theta[static_cast<std::size_t>(j - 1)] = t;
        const double k = k_of(t);
        logl[static_cast<std::size_t>(j - 1)] = nd * (std::log(-t / k) - k - 1.0);
    }
    const double lmax = *std::max_element(logl.begin(), logl.end());
    double wsum = 0.0, that = 0.0;
    for (std::size_t j = 0; j < theta.size(); ++j) {
        const double w = std::exp(logl[j] - lmax);
        wsum += w;
        that += theta[j] * w;
    }
    that /= wsum;

    GpdFit fit;
    const double k = k_of(that);
    fit.sigma = -k / that;
    fit.k = (nd * k + 5.0) / (nd + 10.0);
    return fit;
}

inline double gpd_quantile(double p, const GpdFit& f) {
    if (std::abs(f.k) < 1e-12) return -f.sigma * std::log1p(-p);
    return f.sigma / f.k * (std::pow(1.0 - p, -f.k) - 1.0);
}

}  // namespace psis_detail

struct PsisResult {
    std::vector<double> log_weights;  // normalized: logsumexp == 0
    double khat = nan_value();        // NaN when the tail was too degenerate to fit
};

/// Pareto-smoothed importance sampling on raw log-ratios: the top
/// ceil(min(0.2 M, 3 sqrt(M))) weights are replaced by generalized-Pareto
/// quantiles fitted to their exceedances, truncated at the raw maximum, then
/// normalized. Smoothing never reorders weights.
inline PsisResult psis_smooth(const std::vector<double>& log_ratios) {
    const std::size_t M = log_ratios.size();
    if (M < 25) throw std::invalid_argument("psis: need at least 25 draws");
    PsisResult out;
    out.log_weights = log_ratios;

    const auto S = static_cast<std::size_t>(
        std::ceil(std::min(0.2 * static_cast<double>(M), 3.0 * std::sqrt(static_cast<double>(M)))));
    const double raw_max = *std::max_element(log_ratios.begin(), log_ratios.end());

    if (S >= 5) {
        std::vector<std::size_t> order(M);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return log_ratios[a] < log_ratios[b]; });
        const double cutoff = log_ratios[order[M - S - 1]];
        const double ecut = std::exp(cutoff);

        std::vector<double> exc;
        exc.reserve(S);
        bool all_pos = true;
        for (std::size_t i = M - S; i < M; ++i) {
            const double e = std::exp(log_ratios[order[i]]) - ecut;
            exc.push_back(e);
            all_pos = all_pos && e > 0.0;
        }
        if (all_pos) {
            const GpdFit fit = psis_detail::gpd_fit(exc);
            out.khat = fit.k;
            for (std::size_t z = 1; z <= S; ++z) {
                const double p = (static_cast<double>(z) - 0.5) / static_cast<double>(S);
                out.log_weights[order[M - S + z - 1]] =
                    std::log(psis_detail::gpd_quantile(p, fit) + ecut);
            }
        }
    }

    for (double& lw : out.log_weights) lw = std::min(lw, raw_max);
    const double lse = logsumexp(out.log_weights);
    for (double& lw : out.log_weights) lw -= lse;
    return out;
}

}  // namespace gtfm
