#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtfm/stats.hpp"

namespace gtfm {

enum class ImpactKind { response, diffusion };

/// Empirical impact of shocks in a macro series x on a risk series y,
/// evaluated at lags 0..L. `response` tracks the mean level of y, `diffusion`
/// its fluctuation.
struct ImpactCurve {
    std::vector<double> values;  // index j = lag
    ImpactKind kind = ImpactKind::response;
    std::string y_name;
    std::string x_name;

    int max_lag() const { return static_cast<int>(values.size()) - 1; }
};

namespace detail {

inline ImpactCurve impact_curve(const std::vector<double>& y, const std::vector<double>& x,
                                int L, ImpactKind kind) {
    const auto T = y.size();
    if (x.size() != T) throw std::invalid_argument("impact: series lengths differ");
    if (T < 2) throw std::invalid_argument("impact: need T >= 2");
    if (L < 0 || static_cast<std::size_t>(L) >= T)
        throw std::invalid_argument("impact: max lag outside [0, T)");
    const double ybar = mean(y);
    const double xbar = mean(x);
    ImpactCurve c;
    c.kind = kind;
    c.values.resize(static_cast<std::size_t>(L) + 1);
    for (int j = 0; j <= L; ++j) {
        double s = 0.0;
        for (std::size_t t = 0; t + static_cast<std::size_t>(j) < T; ++t) {
            const double yc = y[t + static_cast<std::size_t>(j)] - ybar;
            const double xc = x[t] - xbar;
            s += (kind == ImpactKind::response ? yc : yc * yc) * xc;
        }
        c.values[static_cast<std::size_t>(j)] = s / static_cast<double>(T);
    }
    return c;
}

}  // namespace detail

/// Cross-covariance estimate R(j) = (1/T) sum_{t=1}^{T-j} (y_{t+j}-ybar)(x_t-xbar).
/// The divisor is T at every lag, not T-j.
inline ImpactCurve response(const std::vector<double>& y, const std::vector<double>& x, int L) {
    return detail::impact_curve(y, x, L, ImpactKind::response);
}

/// D(j) = (1/T) sum_{t=1}^{T-j} (y_{t+j}-ybar)^2 (x_t-xbar).
inline ImpactCurve diffusion(const std::vector<double>& y, const std::vector<double>& x, int L) {
    return detail::impact_curve(y, x, L, ImpactKind::diffusion);
}

/// How the j=0 increment of the telescoping decay sum is anchored.
/// zero_anchor treats the value before lag 0 as 0, so the mean decay reduces
/// to values[L-1]/(L-1); lag_zero_diff starts the differences at lag 1, giving
/// (values[L-1] - values[0])/(L-1). The latter is the default: it measures
/// decay away from the lag-0 level instead of from an artificial zero.
enum class DecayConvention { zero_anchor, lag_zero_diff };

inline double mean_decay(const ImpactCurve& c,
                         DecayConvention conv = DecayConvention::lag_zero_diff) {
    const int L = c.max_lag();
    if (L < 2) throw std::invalid_argument("mean_decay: need max lag >= 2");
    const double last = c.values[static_cast<std::size_t>(L - 1)];
    const double head = conv == DecayConvention::zero_anchor ? 0.0 : c.values[0];
    return (last - head) / static_cast<double>(L - 1);
}

/// 1 when the response decays against the sign of the true coefficient,
/// i.e. mean_decay * beta_sign < 0.
inline int hit_indicator(const ImpactCurve& c, int beta_sign,
                         DecayConvention conv = DecayConvention::lag_zero_diff) {
    if (beta_sign != 1 && beta_sign != -1)
        throw std::invalid_argument("hit_indicator: beta_sign must be +1 or -1");
    return mean_decay(c, conv) * static_cast<double>(beta_sign) < 0.0 ? 1 : 0;
}

enum class DecayKind { monotone, wave, persistent, flat };

inline const char* to_string(DecayKind k) {
    switch (k) {
        case DecayKind::monotone: return "monotone";
        case DecayKind::wave: return "wave";
        case DecayKind::persistent: return "persistent";
        case DecayKind::flat: return "flat";
    }
    return "?";
}

struct DecayRules {
    double tol_flat = 1e-12;        // curve counts as flat below this magnitude
    double persistent_ratio = 0.5;  // |values[3]| above ratio*|values[0]| is slow decay
    double monotone_slack = 1e-12;  // allowed increase when testing nonincreasing
};

/// Qualitative decay shape used to pick a transfer-function family. Checked
/// in order: flat (everything negligible), wave (a sign change), persistent
/// (magnitude at lag 3 still above half the lag-0 magnitude), monotone
/// (magnitudes nonincreasing). A rising curve with no sign change falls back
/// to persistent.
inline DecayKind classify_decay(const ImpactCurve& c, const DecayRules& rules = {}) {
    const int L = c.max_lag();
    if (L < 3) throw std::invalid_argument("classify_decay: need max lag >= 3");

    double peak = 0.0;
    for (double v : c.values) peak = std::max(peak, std::abs(v));
    if (peak < rules.tol_flat) return DecayKind::flat;

    int last_sign = 0;
    for (double v : c.values) {
        if (std::abs(v) < rules.tol_flat) continue;
        const int s = v > 0.0 ? 1 : -1;
        if (last_sign != 0 && s != last_sign) return DecayKind::wave;
        last_sign = s;
    }

    if (std::abs(c.values[3]) > rules.persistent_ratio * std::abs(c.values[0]))
        return DecayKind::persistent;

    bool nonincreasing = true;
    for (std::size_t j = 1; j < c.values.size(); ++j)
        if (std::abs(c.values[j]) > std::abs(c.values[j - 1]) + rules.monotone_slack) {
            nonincreasing = false;
            break;
        }
    return nonincreasing ? DecayKind::monotone : DecayKind::persistent;
}

}  // namespace gtfm
