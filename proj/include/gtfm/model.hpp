#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gtfm/frame.hpp"
#include "gtfm/prior.hpp"
#include "gtfm/transform.hpp"

namespace gtfm {

/// One macro driver and how many lags of it enter the state equation.
/// lags = s gives columns name_L0..name_Ls, a superposition of order s;
/// lags = 0 is plain geometric transmission. The beta prior must be a
/// half-normal; its side declares the coefficient's sign restriction.
struct MacroTerm {
    std::string name;
    int lags = 0;
    Prior beta_prior{PriorKind::half_normal_pos, 0.0, 1.0};
};

enum class ResilienceMode { fixed, time_varying };
enum class NoiseMode { eta_zero, eta_free };

/// Sign of the resilience parameter: positive gives monotone decay on (0,1),
/// negative gives wave decay, phi = -phi* with phi* in (0,1).
enum class PhiSupport { positive, negative };

/// Full description of one transfer-function model: which macro series drive
/// the conditional mean, whether resilience is constant or a random walk,
/// whether observation noise exists (eta_free) or the state is observed
/// directly (eta_zero), and every prior.
struct ModelSpec {
    std::string name = "custom";
    std::vector<MacroTerm> terms;
    ResilienceMode resilience = ResilienceMode::fixed;
    NoiseMode noise = NoiseMode::eta_zero;
    PhiSupport phi_support = PhiSupport::positive;

    Prior alpha_prior{PriorKind::normal, 1.5, 0.5};
    Prior phi_prior{PriorKind::beta, 2.0, 2.0};  // on phi (fixed) or phi_0 (time varying)
    Prior sigma_e_prior{PriorKind::inv_gamma, 2.0, 0.1};
    Prior sigma_phi_prior{PriorKind::inv_gamma, 2.0, 0.1};  // time varying only
    Prior eta_prior{PriorKind::gamma, 10.0, 1.0};           // eta_free only

    void validate() const {
        if (terms.empty()) throw std::invalid_argument("model: needs at least one macro term");
        for (const auto& t : terms) {
            if (t.name.empty()) throw std::invalid_argument("model: empty macro name");
            if (t.lags < 0) throw std::invalid_argument("model: negative lag count");
            if (t.beta_prior.kind != PriorKind::half_normal_pos &&
                t.beta_prior.kind != PriorKind::half_normal_neg)
                throw std::invalid_argument(
                    "model: beta priors must be half-normal (the side fixes the sign)");
            t.beta_prior.validate();
        }
        for (std::size_t i = 0; i < terms.size(); ++i)
            for (std::size_t j = i + 1; j < terms.size(); ++j)
                if (terms[i].name == terms[j].name)
                    throw std::invalid_argument("model: duplicate macro term '" + terms[i].name +
                                                "'");
        if (phi_prior.kind != PriorKind::beta)
            throw std::invalid_argument("model: phi prior must be a Beta on (0,1)");
        alpha_prior.validate();
        phi_prior.validate();
        sigma_e_prior.validate();
        sigma_phi_prior.validate();
        eta_prior.validate();
    }
};

/// The four models of the application study share the same mean structure
/// (GDP and IDR geometric, unemployment superposition of order 3) and priors;
/// they differ in resilience mode and noise mode.
inline ModelSpec catalog_model(const std::string& name) {
    ModelSpec m;
    m.name = name;
    m.terms = {
        {"GDP", 0, Prior{PriorKind::half_normal_neg, 0.0, 1.0}},
        {"IDR", 0, Prior{PriorKind::half_normal_pos, 0.0, 1.0}},
        {"Unemp", 3, Prior{PriorKind::half_normal_pos, 0.0, 1.0}},
    };
    if (name == "I") {
        m.resilience = ResilienceMode::fixed;
        m.noise = NoiseMode::eta_zero;
    } else if (name == "II") {
        m.resilience = ResilienceMode::fixed;
        m.noise = NoiseMode::eta_free;
    } else if (name == "III") {
        m.resilience = ResilienceMode::time_varying;
        m.noise = NoiseMode::eta_zero;
    } else if (name == "IV") {
        m.resilience = ResilienceMode::time_varying;
        m.noise = NoiseMode::eta_free;
    } else {
        throw std::invalid_argument("catalog_model: no model named '" + name +
                                    "' (expected I, II, III or IV)");
    }
    return m;
}

/// Regression view of a frame for one model: the target y and the beta
/// columns in term order, lags expanded, intercept handled via alpha.
struct DesignMatrix {
    Period start;
    std::vector<double> y;
    std::vector<std::string> x_names;
    std::vector<std::vector<double>> X;  // column major, X[k][t]

    std::size_t T() const { return y.size(); }
    std::size_t p() const { return X.size(); }
};

inline DesignMatrix build_design(const ModelSpec& spec, const TimeSeriesFrame& raw) {
    spec.validate();
    std::vector<LagExpansion> expansions;
    for (const auto& t : spec.terms) expansions.push_back({t.name, t.lags});
    const TimeSeriesFrame f = expand_lags(raw, expansions);

    DesignMatrix d;
    d.start = f.start();
    d.y = f.target();
    for (const auto& t : spec.terms)
        for (int j = 0; j <= t.lags; ++j) {
            const std::string col = t.name + "_L" + std::to_string(j);
            d.x_names.push_back(col);
            d.X.push_back(f.col(col));
        }
    if (d.T() < 3) throw std::invalid_argument("build_design: too few rows after lag expansion");
    return d;
}

enum class SlotRole { alpha, beta, phi_fixed, phi0, phi_path, sigma_e, sigma_phi, eta, state };

/// One coordinate of the sampling vector: its report name, its transform to
/// the unconstrained space, its role in the joint density, and (for plain
/// parameters) its prior. `negated` marks priors read at -v (wave support).
struct Slot {
    std::string name;
    SlotRole role = SlotRole::alpha;
    Transform transform = Transform::identity;
    int index = 0;  // beta number, path time or state time (1-based for paths/states)
    bool has_prior = false;
    bool negated = false;
    Prior prior;
};

/// Total mapping between the unconstrained vector z and the model's symbols.
/// Column order: alpha, beta_1..beta_p, resilience block, sigma_e,
/// [sigma_phi], [eta], [E_1..E_T].
struct ParamLayout {
    std::vector<Slot> slots;
    int p = 0;
    int T = 0;
    int alpha = -1;
    int beta0 = -1;
    int phi = -1;        // fixed mode
    int phi0 = -1;       // time varying
    int phi_path0 = -1;  // time varying: phi_1..phi_T
    int sigma_e = -1;
    int sigma_phi = -1;
    int eta = -1;
    int state0 = -1;  // eta_free: E_1..E_T

    int dim() const { return static_cast<int>(slots.size()); }
};

inline ParamLayout build_layout(const ModelSpec& spec, std::size_t T) {
    spec.validate();
    if (T < 3) throw std::invalid_argument("build_layout: need T >= 3");
    const bool wave = spec.phi_support == PhiSupport::negative;
    const Transform phi_tf = wave ? Transform::logit_neg : Transform::logit01;

    ParamLayout L;
    L.T = static_cast<int>(T);
    auto push = [&L](Slot s) {
        L.slots.push_back(std::move(s));
        return static_cast<int>(L.slots.size()) - 1;
    };

    L.alpha = push({"alpha", SlotRole::alpha, Transform::identity, 0, true, false,
                    spec.alpha_prior});
    int j = 0;
    for (const auto& t : spec.terms)
        for (int k = 0; k <= t.lags; ++k) {
            ++j;
            const int idx = push({"beta_" + std::to_string(j), SlotRole::beta,
                                  t.beta_prior.transform(), j, true, false, t.beta_prior});
            if (L.beta0 < 0) L.beta0 = idx;
        }
    L.p = j;

    if (spec.resilience == ResilienceMode::fixed) {
        L.phi = push({"phi", SlotRole::phi_fixed, phi_tf, 0, true, wave, spec.phi_prior});
    } else {
        L.phi0 = push({"phi_0", SlotRole::phi0, phi_tf, 0, true, wave, spec.phi_prior});
        for (int t = 1; t <= L.T; ++t) {
            const int idx = push({"phi_" + std::to_string(t), SlotRole::phi_path,
                                  Transform::identity, t, false, false, Prior{}});
            if (L.phi_path0 < 0) L.phi_path0 = idx;
        }
    }

    L.sigma_e = push({"sigma_e", SlotRole::sigma_e, Transform::log_pos, 0, true, false,
                      spec.sigma_e_prior});
    if (spec.resilience == ResilienceMode::time_varying)
        L.sigma_phi = push({"sigma_phi", SlotRole::sigma_phi, Transform::log_pos, 0, true,
                            false, spec.sigma_phi_prior});
    if (spec.noise == NoiseMode::eta_free) {
        L.eta = push({"eta", SlotRole::eta, Transform::log_pos, 0, true, false,
                      spec.eta_prior});
        for (int t = 1; t <= L.T; ++t) {
            const int idx = push({"E_" + std::to_string(t), SlotRole::state,
                                  Transform::identity, t, false, false, Prior{}});
            if (L.state0 < 0) L.state0 = idx;
        }
    }
    return L;
}

inline std::vector<double> constrain_point(const ParamLayout& L, const std::vector<double>& z) {
    if (z.size() != L.slots.size())
        throw std::invalid_argument("constrain_point: dimension mismatch");
    std::vector<double> v(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) v[i] = tf::constrain(L.slots[i].transform, z[i]);
    return v;
}

inline std::vector<double> unconstrain_point(const ParamLayout& L, const std::vector<double>& v) {
    if (v.size() != L.slots.size())
        throw std::invalid_argument("unconstrain_point: dimension mismatch");
    std::vector<double> z(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) z[i] = tf::unconstrain(L.slots[i].transform, v[i]);
    return z;
}

}  // namespace gtfm
