#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "gtfm/stats.hpp"
#include "gtfm/transform.hpp"

namespace gtfm {

enum class PriorKind {
    normal,           // Normal(mu, sigma)
    half_normal_pos,  // Normal(mu, sigma) restricted to (0, inf), renormalized
    half_normal_neg,  // Normal(mu, sigma) restricted to (-inf, 0), renormalized
    beta,             // Beta(a, b) on (0, 1)
    inv_gamma,        // density proportional to x^(-p-1) exp(-q/x), shape p scale q
    gamma,            // shape tau, rate w; mean tau/w
};

namespace detail {
inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Acklam's rational approximation, refined by one Halley step; good to ~1e-15.
inline double std_normal_quantile(double p) {
    if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("normal quantile: p outside (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double q, x;
    if (p < plow) {
        q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = std_normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}
}  // namespace detail

/// One prior entry: a distribution with two hyperparameters. The meaning of
/// (a, b) depends on kind: (mu, sigma), (alpha, beta), (shape, scale) or
/// (shape, rate) as listed above.
struct Prior {
    PriorKind kind = PriorKind::normal;
    double a = 0.0;
    double b = 1.0;

    void validate() const {
        if (b <= 0.0) throw std::invalid_argument("prior: second hyperparameter must be > 0");
        if ((kind == PriorKind::beta || kind == PriorKind::inv_gamma ||
             kind == PriorKind::gamma) &&
            a <= 0.0)
            throw std::invalid_argument("prior: first hyperparameter must be > 0");
    }

    bool in_support(double v) const {
        switch (kind) {
            case PriorKind::normal: return true;
            case PriorKind::half_normal_pos: return v > 0.0;
            case PriorKind::half_normal_neg: return v < 0.0;
            case PriorKind::beta: return v > 0.0 && v < 1.0;
            case PriorKind::inv_gamma:
            case PriorKind::gamma: return v > 0.0;
        }
        return false;
    }

    double log_density(double v) const {
        if (!in_support(v)) throw std::domain_error("prior log_density: value outside support");
        switch (kind) {
            case PriorKind::normal:
                return log_normal_pdf(v, a, b);
            case PriorKind::half_normal_pos:
                return log_normal_pdf(v, a, b) - std::log(1.0 - detail::std_normal_cdf(-a / b));
            case PriorKind::half_normal_neg:
                return log_normal_pdf(v, a, b) - std::log(detail::std_normal_cdf(-a / b));
            case PriorKind::beta:
                return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       (a - 1.0) * std::log(v) + (b - 1.0) * std::log1p(-v);
            case PriorKind::inv_gamma:
                return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(v) - b / v;
            case PriorKind::gamma:
                return a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(v) - b * v;
        }
        throw std::logic_error("prior: bad kind");
    }

    /// d/dv of log_density at an in-support v.
    double score(double v) const {
        switch (kind) {
            case PriorKind::normal:
            case PriorKind::half_normal_pos:
            case PriorKind::half_normal_neg:
                return -(v - a) / (b * b);
            case PriorKind::beta:
                return (a - 1.0) / v - (b - 1.0) / (1.0 - v);
            case PriorKind::inv_gamma:
                return -(a + 1.0) / v + b / (v * v);
            case PriorKind::gamma:
                return (a - 1.0) / v - b;
        }
        throw std::logic_error("prior: bad kind");
    }

    template <class Rng>
    double sample(Rng& rng) const {
        switch (kind) {
            case PriorKind::normal:
                return std::normal_distribution<double>(a, b)(rng);
            case PriorKind::half_normal_pos: {
                const double c = detail::std_normal_cdf(-a / b);  // mass below 0
                const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
                return a + b * detail::std_normal_quantile(c + u * (1.0 - c));
            }
            case PriorKind::half_normal_neg: {
                const double c = detail::std_normal_cdf(-a / b);
                const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
                return a + b * detail::std_normal_quantile(u * c);
            }
            case PriorKind::beta: {
                std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
                const double x = ga(rng);
                const double y = gb(rng);
                return x / (x + y);
            }
            case PriorKind::inv_gamma:
                return 1.0 / std::gamma_distribution<double>(a, 1.0 / b)(rng);
            case PriorKind::gamma:
                return std::gamma_distribution<double>(a, 1.0 / b)(rng);
        }
        throw std::logic_error("prior: bad kind");
    }

    /// The unconstrained transform whose image is this prior's support.
    Transform transform() const {
        switch (kind) {
            case PriorKind::normal: return Transform::identity;
            case PriorKind::half_normal_pos: return Transform::log_pos;
            case PriorKind::half_normal_neg: return Transform::log_neg;
            case PriorKind::beta: return Transform::logit01;
            case PriorKind::inv_gamma:
            case PriorKind::gamma: return Transform::log_pos;
        }
        throw std::logic_error("prior: bad kind");
    }
};

inline const char* to_string(PriorKind k) {
    switch (k) {
        case PriorKind::normal: return "normal";
        case PriorKind::half_normal_pos: return "half_normal_pos";
        case PriorKind::half_normal_neg: return "half_normal_neg";
        case PriorKind::beta: return "beta";
        case PriorKind::inv_gamma: return "inv_gamma";
        case PriorKind::gamma: return "gamma";
    }
    return "?";
}

inline PriorKind prior_kind_from(const std::string& s) {
    if (s == "normal") return PriorKind::normal;
    if (s == "half_normal_pos") return PriorKind::half_normal_pos;
    if (s == "half_normal_neg") return PriorKind::half_normal_neg;
    if (s == "beta") return PriorKind::beta;
    if (s == "inv_gamma") return PriorKind::inv_gamma;
    if (s == "gamma") return PriorKind::gamma;
    throw std::invalid_argument("unknown prior distribution '" + s + "'");
}

}  // namespace gtfm
