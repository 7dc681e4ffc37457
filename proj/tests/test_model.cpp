#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "gtfm/model.hpp"
#include "gtfm/model_json.hpp"

using namespace gtfm;

namespace {

std::vector<std::string> slot_names(const ParamLayout& L) {
    std::vector<std::string> out;
    for (const auto& s : L.slots) out.push_back(s.name);
    return out;
}

}  // namespace

TEST_CASE("catalog models share the mean structure and differ in modes") {
    for (const std::string name : {"I", "II", "III", "IV"}) {
        const ModelSpec m = catalog_model(name);
        REQUIRE(m.terms.size() == 3);
        CHECK(m.terms[0].name == "GDP");
        CHECK(m.terms[0].lags == 0);
        CHECK(m.terms[0].beta_prior.kind == PriorKind::half_normal_neg);
        CHECK(m.terms[1].name == "IDR");
        CHECK(m.terms[1].lags == 0);
        CHECK(m.terms[1].beta_prior.kind == PriorKind::half_normal_pos);
        CHECK(m.terms[2].name == "Unemp");
        CHECK(m.terms[2].lags == 3);
        CHECK(m.alpha_prior.kind == PriorKind::normal);
        CHECK(m.alpha_prior.a == 1.5);
        CHECK(m.alpha_prior.b == 0.5);
        CHECK(m.phi_prior.kind == PriorKind::beta);
        CHECK(m.sigma_e_prior.kind == PriorKind::inv_gamma);
        CHECK(m.phi_support == PhiSupport::positive);
        CHECK_NOTHROW(m.validate());
    }
    CHECK(catalog_model("I").resilience == ResilienceMode::fixed);
    CHECK(catalog_model("I").noise == NoiseMode::eta_zero);
    CHECK(catalog_model("II").resilience == ResilienceMode::fixed);
    CHECK(catalog_model("II").noise == NoiseMode::eta_free);
    CHECK(catalog_model("III").resilience == ResilienceMode::time_varying);
    CHECK(catalog_model("III").noise == NoiseMode::eta_zero);
    CHECK(catalog_model("IV").resilience == ResilienceMode::time_varying);
    CHECK(catalog_model("IV").noise == NoiseMode::eta_free);
    CHECK_THROWS_AS(catalog_model("V"), std::invalid_argument);
}

TEST_CASE("model validation rejects malformed specs") {
    ModelSpec m = catalog_model("I");
    m.terms.clear();
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);

    m = catalog_model("I");
    m.terms[0].beta_prior = Prior{PriorKind::normal, 0.0, 1.0};
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);

    m = catalog_model("I");
    m.terms[1].name = "GDP";
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);

    m = catalog_model("I");
    m.terms[0].lags = -1;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);

    m = catalog_model("I");
    m.phi_prior = Prior{PriorKind::normal, 0.0, 1.0};
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("layout for the fixed eta_zero model") {
    const ParamLayout L = build_layout(catalog_model("I"), 25);
    CHECK(L.p == 6);
    CHECK(L.T == 25);
    CHECK(L.dim() == 9);
    CHECK(slot_names(L) == std::vector<std::string>{"alpha", "beta_1", "beta_2", "beta_3",
                                                    "beta_4", "beta_5", "beta_6", "phi",
                                                    "sigma_e"});
    CHECK(L.alpha == 0);
    CHECK(L.beta0 == 1);
    CHECK(L.phi == 7);
    CHECK(L.sigma_e == 8);
    CHECK(L.phi0 == -1);
    CHECK(L.eta == -1);
    CHECK(L.state0 == -1);
    CHECK(L.slots[L.phi].transform == Transform::logit01);
    CHECK(L.slots[1].transform == Transform::log_neg);
    CHECK(L.slots[2].transform == Transform::log_pos);
}

TEST_CASE("layout for the fixed eta_free model appends eta and states") {
    const ParamLayout L = build_layout(catalog_model("II"), 25);
    CHECK(L.dim() == 9 + 1 + 25);
    CHECK(L.eta == 9);
    CHECK(L.state0 == 10);
    CHECK(L.slots[L.eta].name == "eta");
    CHECK(L.slots[L.state0].name == "E_1");
    CHECK(L.slots[L.state0 + 24].name == "E_25");
    CHECK(L.slots[L.state0].transform == Transform::identity);
    CHECK_FALSE(L.slots[L.state0].has_prior);
}

TEST_CASE("layout for the time varying models carries a phi path") {
    const ParamLayout L3 = build_layout(catalog_model("III"), 25);
    CHECK(L3.dim() == 7 + 1 + 25 + 1 + 1);
    CHECK(L3.phi0 == 7);
    CHECK(L3.phi_path0 == 8);
    CHECK(L3.slots[L3.phi0].name == "phi_0");
    CHECK(L3.slots[L3.phi_path0].name == "phi_1");
    CHECK(L3.slots[L3.phi_path0 + 24].name == "phi_25");
    CHECK(L3.sigma_e == 33);
    CHECK(L3.sigma_phi == 34);
    CHECK(L3.phi == -1);
    CHECK(L3.slots[L3.phi_path0].transform == Transform::identity);

    const ParamLayout L4 = build_layout(catalog_model("IV"), 25);
    CHECK(L4.dim() == L3.dim() + 1 + 25);
    CHECK(L4.eta == 35);
    CHECK(L4.state0 == 36);
}

TEST_CASE("wave resilience flips the phi transform and marks negation") {
    ModelSpec m = catalog_model("I");
    m.phi_support = PhiSupport::negative;
    const ParamLayout L = build_layout(m, 10);
    CHECK(L.slots[L.phi].transform == Transform::logit_neg);
    CHECK(L.slots[L.phi].negated);
    const ParamLayout Lp = build_layout(catalog_model("I"), 10);
    CHECK_FALSE(Lp.slots[Lp.phi].negated);
}

TEST_CASE("constrain and unconstrain vectors round trip") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    for (const std::string name : {"I", "II", "III", "IV"}) {
        const ParamLayout L = build_layout(catalog_model(name), 8);
        std::vector<double> z(static_cast<std::size_t>(L.dim()));
        for (auto& v : z) v = nd(rng);
        const auto v = constrain_point(L, z);
        const auto back = unconstrain_point(L, v);
        for (std::size_t i = 0; i < z.size(); ++i)
            CHECK(back[i] == Catch::Approx(z[i]).margin(1e-10));
    }
    const ParamLayout L = build_layout(catalog_model("I"), 8);
    CHECK_THROWS_AS(constrain_point(L, std::vector<double>(3)), std::invalid_argument);
    CHECK_THROWS_AS(unconstrain_point(L, std::vector<double>(3)), std::invalid_argument);
}

TEST_CASE("layout needs enough rows") {
    CHECK_THROWS_AS(build_layout(catalog_model("I"), 2), std::invalid_argument);
}

TEST_CASE("build_design expands lags in term order") {
    std::vector<double> y{1, 2, 3, 4, 5, 6};
    std::vector<double> g{10, 20, 30, 40, 50, 60};
    std::vector<double> u{7, 8, 9, 10, 11, 12};
    TimeSeriesFrame f(Period{2008, 1}, {"LGD", "GDP", "Unemp"}, {y, g, u}, "LGD");

    ModelSpec m;
    m.terms = {{"GDP", 0, Prior{PriorKind::half_normal_neg, 0.0, 1.0}},
               {"Unemp", 2, Prior{PriorKind::half_normal_pos, 0.0, 1.0}}};
    const DesignMatrix d = build_design(m, f);
    CHECK(d.T() == 4);
    CHECK(d.p() == 4);
    CHECK(d.start == Period{2008, 3});
    CHECK(d.x_names == std::vector<std::string>{"GDP_L0", "Unemp_L0", "Unemp_L1", "Unemp_L2"});
    CHECK(d.y == std::vector<double>{3, 4, 5, 6});
    CHECK(d.X[0] == std::vector<double>{30, 40, 50, 60});
    CHECK(d.X[1] == std::vector<double>{9, 10, 11, 12});
    CHECK(d.X[2] == std::vector<double>{8, 9, 10, 11});
    CHECK(d.X[3] == std::vector<double>{7, 8, 9, 10});
}

TEST_CASE("build_design rejects frames that get too short") {
    TimeSeriesFrame f(Period{2008, 1}, {"y", "x"}, {{1, 2, 3, 4}, {1, 2, 3, 4}}, "y");
    ModelSpec m;
    m.terms = {{"x", 2, Prior{PriorKind::half_normal_pos, 0.0, 1.0}}};
    CHECK_THROWS_AS(build_design(m, f), std::invalid_argument);
}

TEST_CASE("model json round trips every field") {
    for (const std::string name : {"I", "II", "III", "IV"}) {
        const ModelSpec m = catalog_model(name);
        const ModelSpec back = model_from_json(model_to_json(m));
        CHECK(back.name == m.name);
        CHECK(back.resilience == m.resilience);
        CHECK(back.noise == m.noise);
        CHECK(back.phi_support == m.phi_support);
        REQUIRE(back.terms.size() == m.terms.size());
        for (std::size_t i = 0; i < m.terms.size(); ++i) {
            CHECK(back.terms[i].name == m.terms[i].name);
            CHECK(back.terms[i].lags == m.terms[i].lags);
            CHECK(back.terms[i].beta_prior.kind == m.terms[i].beta_prior.kind);
            CHECK(back.terms[i].beta_prior.a == m.terms[i].beta_prior.a);
            CHECK(back.terms[i].beta_prior.b == m.terms[i].beta_prior.b);
        }
        CHECK(back.alpha_prior.a == m.alpha_prior.a);
        CHECK(back.eta_prior.b == m.eta_prior.b);
    }

    ModelSpec wave = catalog_model("III");
    wave.phi_support = PhiSupport::negative;
    CHECK(model_from_json(model_to_json(wave)).phi_support == PhiSupport::negative);
}

TEST_CASE("model json applies defaults and rejects junk") {
    nlohmann::json minimal = {
        {"terms",
         {{{"name", "GDP"},
           {"beta_prior", {{"dist", "half_normal_neg"}, {"mu", 0.0}, {"sigma", 1.0}}}}}}};
    const ModelSpec m = model_from_json(minimal);
    CHECK(m.resilience == ResilienceMode::fixed);
    CHECK(m.noise == NoiseMode::eta_zero);
    CHECK(m.phi_support == PhiSupport::positive);
    CHECK(m.terms[0].lags == 0);
    CHECK(m.alpha_prior.a == 1.5);

    nlohmann::json bad = minimal;
    bad["resilience"] = "sometimes";
    CHECK_THROWS_AS(model_from_json(bad), std::invalid_argument);
    bad = minimal;
    bad["noise"] = "loud";
    CHECK_THROWS_AS(model_from_json(bad), std::invalid_argument);
    bad = minimal;
    bad["terms"] = nlohmann::json::array();
    CHECK_THROWS_AS(model_from_json(bad), std::invalid_argument);
    bad = minimal;
    bad["terms"][0]["beta_prior"] = {{"dist", "normal"}, {"mu", 0.0}, {"sigma", 1.0}};
    CHECK_THROWS_AS(model_from_json(bad), std::invalid_argument);
    bad = minimal;
    bad["terms"][0]["beta_prior"] = {{"dist", "half_normal_pos"}, {"mu", 0.0}};
    CHECK_THROWS_AS(model_from_json(bad), std::invalid_argument);
}

TEST_CASE("save_model and load_model work through files") {
    const std::string path =
        (std::filesystem::temp_directory_path() / "gtfm_model_rt.json").string();
    const ModelSpec m = catalog_model("IV");
    save_model(m, path);
    const ModelSpec back = load_model(path);
    CHECK(back.name == "IV");
    CHECK(back.resilience == ResilienceMode::time_varying);
    CHECK(back.noise == NoiseMode::eta_free);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_model(path), std::runtime_error);
}
