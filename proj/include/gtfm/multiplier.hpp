#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace gtfm {

enum class MultiplierKind { geometric, superposition, stochastic };

/// Dynamic multiplier of a transfer function: the marginal effect on Y at lag
/// j of a unit shock in X. geometric: beta*phi^j. superposition: s+1 shifted
/// geometric decays beta_k phi^(j-k). stochastic: beta damped by a product of
/// time-varying resiliences.
struct MultiplierSpec {
    MultiplierKind kind = MultiplierKind::geometric;
    std::vector<double> beta;  // s+1 entries for superposition, else 1
    int s = 0;                 // superposition order

    static MultiplierSpec geometric(double b) {
        return {MultiplierKind::geometric, {b}, 0};
    }
    static MultiplierSpec superposition(std::vector<double> b) {
        if (b.empty()) throw std::invalid_argument("superposition: need at least one beta");
        const int order = static_cast<int>(b.size()) - 1;
        return {MultiplierKind::superposition, std::move(b), order};
    }
    static MultiplierSpec stochastic(double b) {
        return {MultiplierKind::stochastic, {b}, 0};
    }

    void validate() const {
        if (beta.size() != static_cast<std::size_t>(s) + 1)
            throw std::invalid_argument("multiplier: beta count must be s+1");
        if (kind != MultiplierKind::superposition && s != 0)
            throw std::invalid_argument("multiplier: s > 0 only for superposition");
    }
};

namespace detail {
inline void check_phi(double phi) {
    if (std::abs(phi) >= 1.0)
        throw std::invalid_argument("multiplier: need |phi| < 1 for a stable decay");
}
}  // namespace detail

/// beta(j) for fixed resilience phi.
inline double multiplier(const MultiplierSpec& spec, double phi, int j) {
    spec.validate();
    if (spec.kind == MultiplierKind::stochastic)
        throw std::invalid_argument("multiplier: stochastic kind needs a phi path");
    detail::check_phi(phi);
    if (j < 0) throw std::invalid_argument("multiplier: negative lag");
    if (spec.kind == MultiplierKind::geometric) return spec.beta[0] * std::pow(phi, j);
    double out = 0.0;
    for (int k = 0; k <= spec.s && k <= j; ++k)
        out += spec.beta[static_cast<std::size_t>(k)] * std::pow(phi, j - k);
    return out;
}

/// Stochastic multiplier at lag j: beta * prod_{i=0}^{j-1} phi_path[i], where
/// phi_path[i] holds the resilience i steps back from the shock's arrival.
/// Empty product (j=0) is 1.
inline double multiplier(const MultiplierSpec& spec, const std::vector<double>& phi_path, int j) {
    spec.validate();
    if (spec.kind != MultiplierKind::stochastic)
        throw std::invalid_argument("multiplier: phi path only applies to the stochastic kind");
    if (j < 0) throw std::invalid_argument("multiplier: negative lag");
    if (phi_path.size() < static_cast<std::size_t>(j))
        throw std::invalid_argument("multiplier: phi path shorter than lag");
    double out = spec.beta[0];
    for (int i = 0; i < j; ++i) out *= phi_path[static_cast<std::size_t>(i)];
    return out;
}

/// Partial cumulative impact sum_{j=0}^{J} beta(j).
inline double transfer_gain(const MultiplierSpec& spec, double phi, int J) {
    if (J < 0) throw std::invalid_argument("transfer_gain: negative truncation");
    double out = 0.0;
    for (int j = 0; j <= J; ++j) out += multiplier(spec, phi, j);
    return out;
}

/// Limit of the cumulative impact: beta/(1-phi), or sum(beta_k)/(1-phi).
inline double transfer_gain_limit(const MultiplierSpec& spec, double phi) {
    spec.validate();
    if (spec.kind == MultiplierKind::stochastic)
        throw std::invalid_argument("transfer_gain_limit: undefined for stochastic kind");
    detail::check_phi(phi);
    double bsum = 0.0;
    for (double b : spec.beta) bsum += b;
    return bsum / (1.0 - phi);
}

}  // namespace gtfm
