#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gtfm/model.hpp"
#include "gtfm/stats.hpp"

namespace gtfm {

/// Number of likelihood factors: one per observation for eta_free, one per
/// transition (T-1) for eta_zero where the first observation is conditioned on.
inline int n_likelihood_terms(const ModelSpec& spec, int T) {
    return spec.noise == NoiseMode::eta_free ? T : T - 1;
}

namespace detail {

inline double neg_inf() { return -std::numeric_limits<double>::infinity(); }

struct ConstrainedView {
    std::vector<double> v;
    bool ok = false;
};

inline ConstrainedView constrain_checked(const ModelSpec& spec, const ParamLayout& L,
                                         const std::vector<double>& z) {
    ConstrainedView out;
    out.v.resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        out.v[i] = tf::constrain(L.slots[i].transform, z[i]);
        if (!std::isfinite(out.v[i])) return out;
    }
    if (out.v[static_cast<std::size_t>(L.sigma_e)] <= 0.0) return out;
    if (L.sigma_phi >= 0 && out.v[static_cast<std::size_t>(L.sigma_phi)] <= 0.0) return out;
    if (L.eta >= 0 && out.v[static_cast<std::size_t>(L.eta)] <= 0.0) return out;
    out.ok = true;
    return out;
}

}  // namespace detail

/// Joint log-density of data, latents and parameters in the unconstrained
/// parameterization, including transform Jacobians. When `grad` is non-null
/// it is filled with the exact analytic gradient with respect to z. A point
/// outside the support (e.g. an underflowed scale) returns -inf with a zero
/// gradient; the sampler treats it as divergent.
inline double log_joint_grad(const ModelSpec& spec, const DesignMatrix& d,
                             const ParamLayout& L, const std::vector<double>& z,
                             std::vector<double>* grad = nullptr) {
    const int dim = L.dim();
    if (static_cast<int>(z.size()) != dim)
        throw std::invalid_argument("log_joint: point has wrong dimension");
    if (static_cast<int>(d.T()) != L.T || static_cast<int>(d.p()) != L.p)
        throw std::invalid_argument("log_joint: layout does not match design");
    if (grad) grad->assign(static_cast<std::size_t>(dim), 0.0);

    const auto cv = detail::constrain_checked(spec, L, z);
    if (!cv.ok) return detail::neg_inf();
    const std::vector<double>& v = cv.v;

    const int T = L.T;
    const int p = L.p;
    const bool eta_free = spec.noise == NoiseMode::eta_free;
    const bool tv = spec.resilience == ResilienceMode::time_varying;

    const double alpha = v[static_cast<std::size_t>(L.alpha)];
    const double sigma_e = v[static_cast<std::size_t>(L.sigma_e)];
    const double se2 = sigma_e * sigma_e;
    const double eta = eta_free ? v[static_cast<std::size_t>(L.eta)] : 0.0;
    const double sigma_v = eta * sigma_e;
    const double* beta = &v[static_cast<std::size_t>(L.beta0)];
    const double* E = eta_free ? &v[static_cast<std::size_t>(L.state0)] : d.y.data();

    std::vector<double> gc(static_cast<std::size_t>(dim), 0.0);
    double lp = 0.0;

    std::vector<double> m(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
        double mt = alpha;
        for (int k = 0; k < p; ++k)
            mt += beta[k] * d.X[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)];
        m[static_cast<std::size_t>(t)] = mt;
    }

    if (eta_free) {
        if (sigma_v <= 0.0 || !std::isfinite(sigma_v)) return detail::neg_inf();
        const double sv2 = sigma_v * sigma_v;
        double d_sigma_v = 0.0;
        for (int t = 0; t < T; ++t) {
            const double r = d.y[static_cast<std::size_t>(t)] - E[t];
            lp += log_normal_pdf(d.y[static_cast<std::size_t>(t)], E[t], sigma_v);
            if (grad) {
                gc[static_cast<std::size_t>(L.state0 + t)] += r / sv2;
                d_sigma_v += -1.0 / sigma_v + r * r / (sv2 * sigma_v);
            }
        }
        const double r0 = E[0] - d.y[0];
        lp += log_normal_pdf(E[0], d.y[0], sigma_e);
        if (grad) {
            gc[static_cast<std::size_t>(L.state0)] += -r0 / se2;
            gc[static_cast<std::size_t>(L.sigma_e)] += -1.0 / sigma_e + r0 * r0 / (se2 * sigma_e);
            gc[static_cast<std::size_t>(L.sigma_e)] += eta * d_sigma_v;
            gc[static_cast<std::size_t>(L.eta)] += sigma_e * d_sigma_v;
        }
    }

    for (int i = 1; i < T; ++i) {
        const int phi_slot = tv ? L.phi_path0 + i : L.phi;
        const double phi_i = v[static_cast<std::size_t>(phi_slot)];
        const double mu = phi_i * E[i - 1] + m[static_cast<std::size_t>(i)];
        const double u = E[i] - mu;
        lp += log_normal_pdf(E[i], mu, sigma_e);
        if (grad) {
            gc[static_cast<std::size_t>(L.alpha)] += u / se2;
            for (int k = 0; k < p; ++k)
                gc[static_cast<std::size_t>(L.beta0 + k)] +=
                    u * d.X[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] / se2;
            gc[static_cast<std::size_t>(phi_slot)] += u * E[i - 1] / se2;
            if (eta_free) {
                gc[static_cast<std::size_t>(L.state0 + i)] += -u / se2;
                gc[static_cast<std::size_t>(L.state0 + i - 1)] += u * phi_i / se2;
            }
            gc[static_cast<std::size_t>(L.sigma_e)] += -1.0 / sigma_e + u * u / (se2 * sigma_e);
        }
    }

    if (tv) {
        const double sigma_phi = v[static_cast<std::size_t>(L.sigma_phi)];
        const double sp2 = sigma_phi * sigma_phi;
        int prev = L.phi0;
        for (int t = 1; t <= T; ++t) {
            const int cur = L.phi_path0 + t - 1;
            const double w = v[static_cast<std::size_t>(cur)] - v[static_cast<std::size_t>(prev)];
            lp += log_normal_pdf(v[static_cast<std::size_t>(cur)],
                                 v[static_cast<std::size_t>(prev)], sigma_phi);
            if (grad) {
                gc[static_cast<std::size_t>(cur)] += -w / sp2;
                gc[static_cast<std::size_t>(prev)] += w / sp2;
                gc[static_cast<std::size_t>(L.sigma_phi)] +=
                    -1.0 / sigma_phi + w * w / (sp2 * sigma_phi);
            }
            prev = cur;
        }
    }

    for (int i = 0; i < dim; ++i) {
        const Slot& s = L.slots[static_cast<std::size_t>(i)];
        const double vi = v[static_cast<std::size_t>(i)];
        if (s.has_prior) {
            const double val = s.negated ? -vi : vi;
            if (!s.prior.in_support(val)) return detail::neg_inf();
            lp += s.prior.log_density(val);
            if (grad)
                gc[static_cast<std::size_t>(i)] +=
                    s.negated ? -s.prior.score(val) : s.prior.score(val);
        }
        lp += tf::log_jacobian(s.transform, vi);
    }

    if (!std::isfinite(lp)) {
        if (grad) grad->assign(static_cast<std::size_t>(dim), 0.0);
        return detail::neg_inf();
    }
    if (grad)
        for (int i = 0; i < dim; ++i) {
            const Slot& s = L.slots[static_cast<std::size_t>(i)];
            const double vi = v[static_cast<std::size_t>(i)];
            (*grad)[static_cast<std::size_t>(i)] =
                gc[static_cast<std::size_t>(i)] * tf::dv_dz(s.transform, vi) +
                tf::dlog_jacobian_dz(s.transform, vi);
        }
    return lp;
}

inline double log_joint(const ModelSpec& spec, const DesignMatrix& d, const ParamLayout& L,
                        const std::vector<double>& z) {
    return log_joint_grad(spec, d, L, z, nullptr);
}

/// Per-factor data log-likelihood at one constrained draw. eta_free: T
/// observation terms log N(Y_t; E_t, sigma_v^2). eta_zero: T-1 transition
/// terms log N(Y_t; phi_t Y_{t-1} + x_t' beta, sigma_E^2).
inline std::vector<double> pointwise_loglik(const ModelSpec& spec, const DesignMatrix& d,
                                            const ParamLayout& L,
                                            const std::vector<double>& v) {
    if (static_cast<int>(v.size()) != L.dim())
        throw std::invalid_argument("pointwise_loglik: dimension mismatch");
    const int T = L.T;
    const int p = L.p;
    const double alpha = v[static_cast<std::size_t>(L.alpha)];
    const double* beta = &v[static_cast<std::size_t>(L.beta0)];
    const double sigma_e = v[static_cast<std::size_t>(L.sigma_e)];
    const bool tv = spec.resilience == ResilienceMode::time_varying;

    std::vector<double> out;
    if (spec.noise == NoiseMode::eta_free) {
        const double sigma_v = v[static_cast<std::size_t>(L.eta)] * sigma_e;
        const double* E = &v[static_cast<std::size_t>(L.state0)];
        out.reserve(static_cast<std::size_t>(T));
        for (int t = 0; t < T; ++t)
            out.push_back(log_normal_pdf(d.y[static_cast<std::size_t>(t)], E[t], sigma_v));
        return out;
    }
    out.reserve(static_cast<std::size_t>(T - 1));
    for (int i = 1; i < T; ++i) {
        const double phi_i =
            tv ? v[static_cast<std::size_t>(L.phi_path0 + i)] : v[static_cast<std::size_t>(L.phi)];
        double mu = phi_i * d.y[static_cast<std::size_t>(i - 1)] + alpha;
        for (int k = 0; k < p; ++k)
            mu += beta[k] * d.X[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        out.push_back(log_normal_pdf(d.y[static_cast<std::size_t>(i)], mu, sigma_e));
    }
    return out;
}

/// Total data log-likelihood at a constrained point (the DIC plug-in).
inline double loglik_at(const ModelSpec& spec, const DesignMatrix& d, const ParamLayout& L,
                        const std::vector<double>& v) {
    const auto pw = pointwise_loglik(spec, d, L, v);
    double s = 0.0;
    for (double x : pw) s += x;
    return s;
}

/// Adapter exposing the joint density as a differentiable target functor.
struct GtfmTarget {
    const ModelSpec* spec;
    const DesignMatrix* design;
    const ParamLayout* layout;

    int dim() const { return layout->dim(); }
    double logp_grad(const std::vector<double>& z, std::vector<double>& grad) const {
        return log_joint_grad(*spec, *design, *layout, z, &grad);
    }
};

}  // namespace gtfm
