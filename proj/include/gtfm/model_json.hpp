#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "gtfm/model.hpp"

namespace gtfm {

namespace detail {

inline std::pair<const char*, const char*> prior_param_names(PriorKind k) {
    switch (k) {
        case PriorKind::normal:
        case PriorKind::half_normal_pos:
        case PriorKind::half_normal_neg: return {"mu", "sigma"};
        case PriorKind::beta: return {"a", "b"};
        case PriorKind::inv_gamma: return {"shape", "scale"};
        case PriorKind::gamma: return {"shape", "rate"};
    }
    throw std::logic_error("prior_param_names: bad kind");
}

inline nlohmann::json prior_to_json(const Prior& p) {
    const auto [an, bn] = prior_param_names(p.kind);
    return {{"dist", to_string(p.kind)}, {an, p.a}, {bn, p.b}};
}

inline Prior prior_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("dist"))
        throw std::invalid_argument("model json: " + where + " needs a 'dist' field");
    Prior p;
    p.kind = prior_kind_from(j.at("dist").get<std::string>());
    const auto [an, bn] = prior_param_names(p.kind);
    if (!j.contains(an) || !j.contains(bn))
        throw std::invalid_argument("model json: " + where + " needs fields '" +
                                    std::string(an) + "' and '" + std::string(bn) + "'");
    p.a = j.at(an).get<double>();
    p.b = j.at(bn).get<double>();
    p.validate();
    return p;
}

}  // namespace detail

inline nlohmann::json model_to_json(const ModelSpec& m) {
    m.validate();
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : m.terms)
        terms.push_back({{"name", t.name},
                         {"lags", t.lags},
                         {"beta_prior", detail::prior_to_json(t.beta_prior)}});
    return {
        {"name", m.name},
        {"resilience", m.resilience == ResilienceMode::fixed ? "fixed" : "time_varying"},
        {"noise", m.noise == NoiseMode::eta_zero ? "eta_zero" : "eta_free"},
        {"phi_support", m.phi_support == PhiSupport::positive ? "positive" : "negative"},
        {"terms", terms},
        {"priors",
         {{"alpha", detail::prior_to_json(m.alpha_prior)},
          {"phi", detail::prior_to_json(m.phi_prior)},
          {"sigma_e", detail::prior_to_json(m.sigma_e_prior)},
          {"sigma_phi", detail::prior_to_json(m.sigma_phi_prior)},
          {"eta", detail::prior_to_json(m.eta_prior)}}},
    };
}

inline ModelSpec model_from_json(const nlohmann::json& j) {
    ModelSpec m;
    m.name = j.value("name", std::string("custom"));

    const auto res = j.value("resilience", std::string("fixed"));
    if (res == "fixed") m.resilience = ResilienceMode::fixed;
    else if (res == "time_varying") m.resilience = ResilienceMode::time_varying;
    else throw std::invalid_argument("model json: resilience must be fixed or time_varying");

    const auto noise = j.value("noise", std::string("eta_zero"));
    if (noise == "eta_zero") m.noise = NoiseMode::eta_zero;
    else if (noise == "eta_free") m.noise = NoiseMode::eta_free;
    else throw std::invalid_argument("model json: noise must be eta_zero or eta_free");

    const auto sup = j.value("phi_support", std::string("positive"));
    if (sup == "positive") m.phi_support = PhiSupport::positive;
    else if (sup == "negative") m.phi_support = PhiSupport::negative;
    else throw std::invalid_argument("model json: phi_support must be positive or negative");

    if (!j.contains("terms") || !j.at("terms").is_array() || j.at("terms").empty())
        throw std::invalid_argument("model json: needs a non-empty 'terms' array");
    for (const auto& tj : j.at("terms")) {
        MacroTerm t;
        t.name = tj.at("name").get<std::string>();
        t.lags = tj.value("lags", 0);
        t.beta_prior = detail::prior_from_json(tj.at("beta_prior"), "term '" + t.name + "'");
        m.terms.push_back(std::move(t));
    }

    if (j.contains("priors")) {
        const auto& pj = j.at("priors");
        if (pj.contains("alpha")) m.alpha_prior = detail::prior_from_json(pj.at("alpha"), "alpha");
        if (pj.contains("phi")) m.phi_prior = detail::prior_from_json(pj.at("phi"), "phi");
        if (pj.contains("sigma_e"))
            m.sigma_e_prior = detail::prior_from_json(pj.at("sigma_e"), "sigma_e");
        if (pj.contains("sigma_phi"))
            m.sigma_phi_prior = detail::prior_from_json(pj.at("sigma_phi"), "sigma_phi");
        if (pj.contains("eta")) m.eta_prior = detail::prior_from_json(pj.at("eta"), "eta");
    }
    m.validate();
    return m;
}

inline ModelSpec load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return model_from_json(j);
}

inline void save_model(const ModelSpec& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << model_to_json(m).dump(2) << "\n";
}

}  // namespace gtfm
