#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gtfm/log_joint.hpp"
#include "gtfm/model.hpp"
#include "gtfm/stats.hpp"

namespace gtfm {

/// Linear-Gaussian form of a fixed-resilience model with observation noise.
/// The state stacks the latent level on top of the constant regression block
/// psi = (alpha, beta): evolution G(x) = [[phi, x^T],[0, I]], design
/// F = (1, 0, ..., 0), innovation W = diag(sigma_e^2, 0, ..., 0).
struct StateSpaceForm {
    double phi = 0.0;
    std::vector<double> psi;  // alpha first, then the beta coefficients
    double sigma_e = 1.0;
    double sigma_v = 1.0;

    std::size_t dim() const { return 1 + psi.size(); }

    Eigen::MatrixXd evolution(const Eigen::VectorXd& xrow) const {
        const auto k = static_cast<Eigen::Index>(dim());
        if (xrow.size() + 1 != k)
            throw std::invalid_argument("state space: regressor row has wrong length");
        Eigen::MatrixXd G = Eigen::MatrixXd::Identity(k, k);
        G(0, 0) = phi;
        for (Eigen::Index j = 1; j < k; ++j) G(0, j) = xrow(j - 1);
        return G;
    }
};

/// Casts a fixed-resilience eta_free model at a constrained point into its
/// linear-Gaussian form. Time-varying resilience has no such form.
inline StateSpaceForm to_dlm(const ModelSpec& spec, const ParamLayout& L,
                             const std::vector<double>& v) {
    if (spec.resilience != ResilienceMode::fixed)
        throw std::invalid_argument("to_dlm: time-varying resilience has no linear form");
    if (spec.noise != NoiseMode::eta_free)
        throw std::invalid_argument("to_dlm: needs eta_free (positive observation noise)");
    if (static_cast<int>(v.size()) != L.dim())
        throw std::invalid_argument("to_dlm: point has wrong dimension");
    StateSpaceForm f;
    f.phi = v[static_cast<std::size_t>(L.phi)];
    f.psi.push_back(v[static_cast<std::size_t>(L.alpha)]);
    for (int k = 0; k < L.p; ++k) f.psi.push_back(v[static_cast<std::size_t>(L.beta0 + k)]);
    f.sigma_e = v[static_cast<std::size_t>(L.sigma_e)];
    f.sigma_v = v[static_cast<std::size_t>(L.eta)] * f.sigma_e;
    return f;
}

/// Exact marginal log-likelihood log p(y | parameters) by forward filtering,
/// latent levels integrated out. X holds the regression columns (no
/// intercept; psi[0] couples to an implicit column of ones). The level is
/// initialized at N(y_1, sigma_e^2), so the t=1 factor is
/// N(y_1; y_1, sigma_e^2 + sigma_v^2).
inline double kalman_loglik(const StateSpaceForm& f, const std::vector<double>& y,
                            const std::vector<std::vector<double>>& X) {
    if (f.sigma_e <= 0.0 || f.sigma_v <= 0.0)
        throw std::invalid_argument("kalman_loglik: variances must be positive");
    if (y.empty()) throw std::invalid_argument("kalman_loglik: empty series");
    if (X.size() + 2 != f.dim())
        throw std::invalid_argument("kalman_loglik: regressor count does not match psi");
    for (const auto& c : X)
        if (c.size() != y.size())
            throw std::invalid_argument("kalman_loglik: ragged regressors");

    const auto k = static_cast<Eigen::Index>(f.dim());
    Eigen::VectorXd F = Eigen::VectorXd::Zero(k);
    F(0) = 1.0;
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(k, k);
    W(0, 0) = f.sigma_e * f.sigma_e;
    const double V = f.sigma_v * f.sigma_v;

    Eigen::VectorXd m = Eigen::VectorXd::Zero(k);
    m(0) = y[0];
    for (Eigen::Index j = 1; j < k; ++j) m(j) = f.psi[static_cast<std::size_t>(j - 1)];
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(k, k);
    P(0, 0) = f.sigma_e * f.sigma_e;

    auto xrow = [&](std::size_t t) {
        Eigen::VectorXd x(k - 1);
        x(0) = 1.0;
        for (std::size_t c = 0; c < X.size(); ++c)
            x(static_cast<Eigen::Index>(c + 1)) = X[c][t];
        return x;
    };

    double loglik = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        if (t > 0) {
            const Eigen::MatrixXd G = f.evolution(xrow(t));
            m = G * m;
            P = G * P * G.transpose() + W;
        }
        const double q = (F.transpose() * P * F)(0, 0) + V;
        const double innov = y[t] - F.dot(m);
        loglik += log_normal_pdf(innov, 0.0, std::sqrt(q));
        const Eigen::VectorXd K = P * F / q;
        m += K * innov;
        P -= K * (F.transpose() * P);
    }
    return loglik;
}

inline double kalman_loglik(const StateSpaceForm& f, const DesignMatrix& d) {
    return kalman_loglik(f, d.y, d.X);
}

}  // namespace gtfm
