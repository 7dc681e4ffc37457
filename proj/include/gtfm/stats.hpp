#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace gtfm {

inline double mean(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean: empty vector");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample variance with ddof degrees of freedom removed (ddof=1 -> unbiased).
inline double variance(const std::vector<double>& v, int ddof = 1) {
    const auto n = static_cast<double>(v.size());
    if (n <= ddof) throw std::invalid_argument("variance: need more than ddof points");
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / (n - ddof);
}

inline double stddev(const std::vector<double>& v, int ddof = 1) {
    return std::sqrt(variance(v, ddof));
}

// R type-7 quantile: h = (n-1)p, linear interpolation between order statistics.
inline double quantile(std::vector<double> v, double p) {
    if (v.empty()) throw std::invalid_argument("quantile: empty vector");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile: p outside [0,1]");
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = static_cast<std::size_t>(std::ceil(h));
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline double logsumexp(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("logsumexp: empty vector");
    const double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

// Autocorrelation at lags 0..max_lag of the centered series.
inline std::vector<double> acf(const std::vector<double>& v, int max_lag) {
    const auto n = v.size();
    if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= n)
        throw std::invalid_argument("acf: max_lag outside [0, n)");
    const double m = mean(v);
    double denom = 0.0;
    for (double x : v) denom += (x - m) * (x - m);
    std::vector<double> out(static_cast<std::size_t>(max_lag) + 1);
    for (int k = 0; k <= max_lag; ++k) {
        double num = 0.0;
        for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t)
            num += (v[t] - m) * (v[t - static_cast<std::size_t>(k)] - m);
        out[static_cast<std::size_t>(k)] = num / denom;
    }
    return out;
}

inline double log_normal_pdf(double x, double mu, double sigma) {
    static constexpr double half_log_2pi = 0.91893853320467274178;
    const double z = (x - mu) / sigma;
    return -half_log_2pi - std::log(sigma) - 0.5 * z * z;
}

inline constexpr double nan_value() {
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace gtfm
