#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gtfm/evaluation.hpp"
#include "gtfm/fit_io.hpp"
#include "gtfm/forecast.hpp"
#include "gtfm/frame.hpp"
#include "gtfm/hmc.hpp"
#include "gtfm/impact.hpp"
#include "gtfm/model_json.hpp"
#include "gtfm/scenario.hpp"
#include "gtfm/simstudy.hpp"

namespace {

using nlohmann::json;

struct UnknownModelError : std::runtime_error {
    std::string model;
    explicit UnknownModelError(std::string name)
        : std::runtime_error("unknown model '" + name + "'"), model(std::move(name)) {}
};

// Merged view of flags and the optional JSON config file; a flag given on the
// command line wins over the file value.
struct Options {
    json cfg = json::object();
    std::string out = "out";
    std::string model;
    std::string data;
    std::string scenarios;
    std::uint64_t seed = 1;
    int threads = 0;
    int lags = 10;
    bool out_set = false, model_set = false, data_set = false, scenarios_set = false;
    bool seed_set = false, threads_set = false, lags_set = false;

    void merge() {
        if (!out_set && cfg.contains("out")) out = cfg["out"].get<std::string>();
        if (!model_set && cfg.contains("model")) model = cfg["model"].get<std::string>();
        if (!data_set && cfg.contains("data")) data = cfg["data"].get<std::string>();
        if (!scenarios_set && cfg.contains("scenarios"))
            scenarios = cfg["scenarios"].get<std::string>();
        if (!seed_set && cfg.contains("seed")) seed = cfg["seed"].get<std::uint64_t>();
        if (!threads_set && cfg.contains("threads")) threads = cfg["threads"].get<int>();
        if (!lags_set && cfg.contains("lags")) lags = cfg["lags"].get<int>();
    }

    std::string target(const gtfm::TimeSeriesFrame* = nullptr) const {
        if (cfg.contains("target")) return cfg["target"].get<std::string>();
        return "";
    }
};

json load_config(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read config file " + path);
    json j;
    is >> j;
    if (!j.is_object()) throw std::runtime_error(path + ": config must be a JSON object");
    return j;
}

// The risk-target column defaults to the first data column when neither the
// config nor the model bundle names one.
gtfm::TimeSeriesFrame load_data(const std::string& path, std::string target) {
    if (path.empty()) throw std::runtime_error("no data file given (use --data)");
    if (target.empty()) {
        const auto t = gtfm::csv::read(path);
        if (t.header.size() < 2) throw std::runtime_error(path + ": no data columns");
        target = t.header[1];
    }
    return gtfm::load_frame(path, target);
}

gtfm::ModelSpec resolve_model(const std::string& ref) {
    if (ref.empty()) throw std::runtime_error("no model given (use --model)");
    static const std::set<std::string> catalog = {"I", "II", "III", "IV"};
    if (catalog.count(ref)) return gtfm::catalog_model(ref);
    if (std::filesystem::exists(ref)) return gtfm::load_model(ref);
    throw UnknownModelError(ref);
}

gtfm::SamplerConfig sampler_config(const Options& opt) {
    gtfm::SamplerConfig sc;
    if (opt.cfg.contains("sampler")) {
        const json& s = opt.cfg["sampler"];
        if (s.contains("n_chains")) sc.n_chains = s["n_chains"].get<int>();
        if (s.contains("n_warmup")) sc.n_warmup = s["n_warmup"].get<int>();
        if (s.contains("n_keep")) sc.n_keep = s["n_keep"].get<int>();
        if (s.contains("step_size")) sc.step_size = s["step_size"].get<double>();
        if (s.contains("n_leapfrog")) sc.n_leapfrog = s["n_leapfrog"].get<int>();
        if (s.contains("target_accept")) sc.target_accept = s["target_accept"].get<double>();
        if (s.contains("adapt_step")) sc.adapt_step = s["adapt_step"].get<bool>();
        if (s.contains("adapt_mass")) sc.adapt_mass = s["adapt_mass"].get<bool>();
    }
    sc.seed = opt.seed;
    return sc;
}

std::string sanitize(const std::string& name) {
    std::string out;
    for (char c : name)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    return out;
}

void write_json(const std::string& path, const json& j) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << j.dump(2) << "\n";
}

void write_manifest(const std::string& dir, const std::string& command, const Options& opt,
                    const json& inputs, std::vector<std::string> outputs) {
    json man;
    man["command"] = command;
    man["version"] = "0.1.0";
    man["seed"] = opt.seed;
    man["inputs"] = inputs;
    outputs.push_back("manifest.json");
    man["outputs"] = outputs;
    write_json(dir + "/manifest.json", man);
}

json gof_to_json(const gtfm::GofResult& g) {
    json j;
    j["mase"] = g.mase;
    j["mse"] = g.mse;
    if (g.r2_defined)
        j["r2"] = g.r2;
    else
        j["r2"] = nullptr;
    return j;
}

json tests_to_json(const gtfm::ResidualTests& t) {
    json lb = json::array();
    for (const auto& row : t.ljung_box)
        lb.push_back({{"lag", row.lag}, {"statistic", row.statistic}, {"p", row.p}});
    json j;
    j["ljung_box"] = lb;
    j["durbin_watson"] = t.durbin_watson;
    j["adf"] = {{"statistic", t.adf.statistic},
                {"reject_at_5", t.adf.reject_at_5},
                {"reject_at_1", t.adf.reject_at_1},
                {"lags", t.adf.lags}};
    j["ks"] = {{"statistic", t.ks.statistic},
               {"p", t.ks.p},
               {"moments_estimated", t.ks.moments_estimated}};
    return j;
}

json report_to_json(const gtfm::FitReport& rep, const gtfm::Diagnostics& diag) {
    json j;
    j["dic"] = {{"dic", rep.dic.dic},
                {"p_dic", rep.dic.p_dic},
                {"loglik_at_mean", rep.dic.loglik_at_mean}};
    j["waic"] = {{"waic", rep.waic.waic},
                 {"se", rep.waic.se},
                 {"p_waic", rep.waic.p_waic},
                 {"unstable", rep.waic.unstable}};
    double max_khat = gtfm::nan_value();
    for (double k : rep.loo.khat)
        if (std::isfinite(k) && !(k <= max_khat)) max_khat = k;
    j["looic"] = {{"looic", rep.loo.looic},
                  {"se", rep.loo.se},
                  {"max_khat", std::isfinite(max_khat) ? json(max_khat) : json(nullptr)},
                  {"khat_warn", rep.loo.khat_warn}};
    j["gof"] = gof_to_json(rep.gof);
    j["tests"] = tests_to_json(rep.tests);
    j["divergences"] = diag.divergences;
    double max_rhat = gtfm::nan_value();
    for (double r : diag.rhat)
        if (std::isfinite(r) && !(r <= max_rhat)) max_rhat = r;
    j["max_rhat"] = std::isfinite(max_rhat) ? json(max_rhat) : json(nullptr);
    return j;
}

void write_summary_csv(const std::string& path, const gtfm::PosteriorDraws& post,
                       const gtfm::Diagnostics& diag) {
    gtfm::csv::Table t;
    t.header = {"param", "mean", "sd", "q2.5", "q25", "q50", "q75", "q97.5", "rhat", "ess"};
    const auto rows = gtfm::summarize(post);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        t.rows.push_back({r.name, gtfm::csv::format_double(r.mean),
                          gtfm::csv::format_double(r.sd), gtfm::csv::format_double(r.q2_5),
                          gtfm::csv::format_double(r.q25), gtfm::csv::format_double(r.q50),
                          gtfm::csv::format_double(r.q75), gtfm::csv::format_double(r.q97_5),
                          gtfm::csv::format_double(diag.rhat[i]),
                          gtfm::csv::format_double(diag.ess[i])});
    }
    gtfm::csv::write(path, t);
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_impact(const Options& opt) {
    const auto frame = load_data(opt.data, opt.target());
    if (opt.lags < 1) throw std::runtime_error("impact: --lags must be >= 1");
    std::filesystem::create_directories(opt.out);

    std::vector<std::string> outputs;
    json summary;
    summary["target"] = frame.risk_target();
    summary["max_lag"] = opt.lags;
    json vars = json::object();
    for (const auto& name : frame.names()) {
        if (name == frame.risk_target()) continue;
        const auto resp = gtfm::response(frame.target(), frame.col(name), opt.lags);
        const auto diff = gtfm::diffusion(frame.target(), frame.col(name), opt.lags);
        for (const auto* curve : {&resp, &diff}) {
            gtfm::csv::Table t;
            t.header = {"lag", "value"};
            for (std::size_t j = 0; j < curve->values.size(); ++j)
                t.rows.push_back({std::to_string(j), gtfm::csv::format_double(curve->values[j])});
            const std::string file =
                "impact_" + sanitize(name) + "_" +
                (curve->kind == gtfm::ImpactKind::response ? "response" : "diffusion") + ".csv";
            gtfm::csv::write(opt.out + "/" + file, t);
            outputs.push_back(file);
        }
        json v;
        v["classification"] = gtfm::to_string(gtfm::classify_decay(resp));
        v["mean_decay"] = gtfm::mean_decay(resp);
        vars[name] = v;
    }
    summary["variables"] = vars;
    write_json(opt.out + "/impact_summary.json", summary);
    outputs.push_back("impact_summary.json");

    write_manifest(opt.out, "impact", opt,
                   {{"data", opt.data}, {"target", frame.risk_target()}, {"lags", opt.lags}},
                   outputs);
    std::cout << "wrote " << outputs.size() + 1 << " files to " << opt.out << "\n";
    return 0;
}

int cmd_fit(const Options& opt) {
    const gtfm::ModelSpec spec = resolve_model(opt.model);
    const auto frame = load_data(opt.data, opt.target());
    const gtfm::SamplerConfig sc = sampler_config(opt);

    const auto post = gtfm::sample(spec, frame, sc);
    const auto diag = gtfm::diagnostics(post);
    const auto rep = gtfm::model_report(spec, frame, post);

    std::filesystem::create_directories(opt.out);
    write_summary_csv(opt.out + "/summary.csv", post, diag);
    write_json(opt.out + "/report.json", report_to_json(rep, diag));
    gtfm::save_fit(opt.out, spec, opt.data, frame.risk_target(), sc, post,
                   {"summary.csv", "report.json"});
    std::cout << "fit " << spec.name << ": " << post.size() << " draws, "
              << diag.divergences << " divergences; wrote " << opt.out << "\n";
    return 0;
}

int cmd_forecast(const Options& opt) {
    if (opt.scenarios.empty()) throw std::runtime_error("no scenario file given (use --scenarios)");
    const auto scen = gtfm::load_scenarios(opt.scenarios);

    gtfm::ModelSpec spec;
    gtfm::PosteriorDraws post;
    gtfm::TimeSeriesFrame frame;
    std::vector<std::string> fit_outputs;
    if (opt.cfg.contains("fit")) {
        const auto bundle = gtfm::load_fit(opt.cfg["fit"].get<std::string>());
        spec = bundle.spec;
        post = bundle.draws;
        frame = load_data(opt.data.empty() ? bundle.data_path : opt.data,
                          opt.target().empty() ? bundle.target : opt.target());
    } else {
        spec = resolve_model(opt.model);
        frame = load_data(opt.data, opt.target());
        const gtfm::SamplerConfig sc = sampler_config(opt);
        post = gtfm::sample(spec, frame, sc);
        std::filesystem::create_directories(opt.out + "/fit");
        gtfm::save_fit(opt.out + "/fit", spec, opt.data, frame.risk_target(), sc, post);
        fit_outputs = {"fit/draws.csv", "fit/loglik.csv", "fit/manifest.json"};
    }

    const int H = opt.cfg.contains("horizon") ? opt.cfg["horizon"].get<int>()
                                              : static_cast<int>(scen.horizon);
    const auto result = gtfm::project(spec, frame, post, scen, H, opt.seed);

    std::vector<std::string> severity = scen.scenario_names;
    if (opt.cfg.contains("severity"))
        severity = opt.cfg["severity"].get<std::vector<std::string>>();
    const auto coh = gtfm::coherence_check(result, severity);

    std::filesystem::create_directories(opt.out);
    std::vector<std::string> outputs = fit_outputs;
    for (const auto& s : result.scenarios) {
        gtfm::csv::Table t;
        t.header = {"period", "mean", "p2.5", "p97.5"};
        for (int h = 0; h < result.horizon; ++h)
            t.rows.push_back({result.start.plus(h).str(),
                              gtfm::csv::format_double(s.mean[static_cast<std::size_t>(h)]),
                              gtfm::csv::format_double(s.lo[static_cast<std::size_t>(h)]),
                              gtfm::csv::format_double(s.hi[static_cast<std::size_t>(h)])});
        const std::string file = "forecast_" + sanitize(s.name) + ".csv";
        gtfm::csv::write(opt.out + "/" + file, t);
        outputs.push_back(file);
    }

    json fj;
    fj["start"] = result.start.str();
    fj["horizon"] = result.horizon;
    fj["scenarios"] = scen.scenario_names;
    fj["severity_order"] = severity;
    json pairs = json::array();
    for (const auto& p : coh.pairs)
        pairs.push_back({{"more_severe", p.more_severe},
                         {"less_severe", p.less_severe},
                         {"coherence", p.coherence},
                         {"overlap", p.overlap}});
    fj["coherence"] = {{"coherent", coh.coherent}, {"pairs", pairs}};
    write_json(opt.out + "/forecast.json", fj);
    outputs.push_back("forecast.json");

    write_manifest(opt.out, "forecast", opt,
                   {{"data", opt.data}, {"scenarios", opt.scenarios}, {"model", opt.model},
                    {"horizon", H}},
                   outputs);
    std::cout << "projected " << result.scenarios.size() << " scenarios over " << H
              << " quarters; coherent=" << (coh.coherent ? "yes" : "no") << "\n";
    return 0;
}

int cmd_compare(const Options& opt) {
    struct Entry {
        std::string label;
        gtfm::ModelSpec spec;
        gtfm::TimeSeriesFrame frame;
        gtfm::PosteriorDraws post;
    };
    std::vector<Entry> entries;
    std::vector<std::string> outputs;
    std::filesystem::create_directories(opt.out);

    if (opt.cfg.contains("fits")) {
        for (const auto& dir : opt.cfg["fits"].get<std::vector<std::string>>()) {
            const auto bundle = gtfm::load_fit(dir);
            Entry e;
            e.label = bundle.spec.name;
            e.spec = bundle.spec;
            e.frame = load_data(bundle.data_path, bundle.target);
            e.post = bundle.draws;
            entries.push_back(std::move(e));
        }
    } else {
        std::vector<std::string> models = {"I", "II", "III", "IV"};
        if (opt.cfg.contains("models"))
            models = opt.cfg["models"].get<std::vector<std::string>>();
        else if (!opt.model.empty())
            models = {opt.model};
        const auto frame = load_data(opt.data, opt.target());
        const gtfm::SamplerConfig sc = sampler_config(opt);
        for (const auto& name : models) {
            Entry e;
            e.label = name;
            e.spec = resolve_model(name);
            e.frame = frame;
            e.post = gtfm::sample(e.spec, frame, sc);
            const std::string sub = "fit_" + sanitize(name);
            gtfm::save_fit(opt.out + "/" + sub, e.spec, opt.data, frame.risk_target(), sc,
                           e.post);
            for (const char* f : {"draws.csv", "loglik.csv", "manifest.json"})
                outputs.push_back(sub + "/" + f);
            entries.push_back(std::move(e));
        }
    }

    gtfm::csv::Table t;
    t.header = {"model", "mase", "mse", "r2", "dic", "waic", "waic_se", "looic", "looic_se"};
    json details = json::object();
    for (const auto& e : entries) {
        const auto rep = gtfm::model_report(e.spec, e.frame, e.post);
        const auto diag = gtfm::diagnostics(e.post);
        t.rows.push_back({e.label, gtfm::csv::format_double(rep.gof.mase),
                          gtfm::csv::format_double(rep.gof.mse),
                          rep.gof.r2_defined ? gtfm::csv::format_double(rep.gof.r2) : "",
                          gtfm::csv::format_double(rep.dic.dic),
                          gtfm::csv::format_double(rep.waic.waic),
                          gtfm::csv::format_double(rep.waic.se),
                          gtfm::csv::format_double(rep.loo.looic),
                          gtfm::csv::format_double(rep.loo.se)});
        details[e.label] = report_to_json(rep, diag);
    }
    gtfm::csv::write(opt.out + "/comparison.csv", t);
    outputs.push_back("comparison.csv");
    write_json(opt.out + "/comparison.json", details);
    outputs.push_back("comparison.json");

    write_manifest(opt.out, "compare", opt, {{"data", opt.data}}, outputs);
    std::cout << "compared " << entries.size() << " models; wrote " << opt.out
              << "/comparison.csv\n";
    return 0;
}

gtfm::SimConfig sim_config_from(const json& j, std::uint64_t seed) {
    gtfm::SimConfig c;
    c.seed = seed;
    if (j.contains("T")) c.T = j["T"].get<int>();
    if (j.contains("replicates")) c.replicates = j["replicates"].get<int>();
    if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
    if (j.contains("phi")) c.phi = j["phi"].get<double>();
    if (j.contains("beta1")) c.beta1 = j["beta1"].get<double>();
    if (j.contains("beta2")) c.beta2 = j["beta2"].get<double>();
    if (j.contains("sigma_v")) c.sigma_v = j["sigma_v"].get<double>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    return c;
}

// Default hit-rate grid: phi in {0.7, 0.4} x sigma_v in {1, 0.1, 0.01}
// x (beta1, beta2) in {(0.4,-0.4), (0.4,-0.8), (0.8,-0.4)}.
std::vector<gtfm::SimConfig> default_grid(std::uint64_t seed) {
    std::vector<gtfm::SimConfig> grid;
    for (double phi : {0.7, 0.4})
        for (double sv : {1.0, 0.1, 0.01})
            for (auto [b1, b2] : {std::pair{0.4, -0.4}, {0.4, -0.8}, {0.8, -0.4}}) {
                gtfm::SimConfig c;
                c.T = 40;
                c.replicates = 500;
                c.alpha = 3.0;
                c.phi = phi;
                c.beta1 = b1;
                c.beta2 = b2;
                c.sigma_v = sv;
                c.seed = seed;
                grid.push_back(c);
            }
    return grid;
}

int cmd_simulate(const Options& opt) {
    std::filesystem::create_directories(opt.out);
    const std::string experiment =
        opt.cfg.contains("experiment") ? opt.cfg["experiment"].get<std::string>() : "hit_rate";

    if (experiment == "hit_rate") {
        std::vector<gtfm::SimConfig> configs;
        if (opt.cfg.contains("configs"))
            for (const auto& j : opt.cfg["configs"]) configs.push_back(sim_config_from(j, opt.seed));
        else
            configs = default_grid(opt.seed);
        const int L = opt.lags;
        const auto rows = gtfm::hit_rate_experiment(configs, L);

        gtfm::csv::Table t;
        t.header = {"phi", "sigma_v", "beta1", "beta2", "hit_rate_x1", "hit_rate_x2"};
        for (const auto& r : rows)
            t.rows.push_back({gtfm::csv::format_double(r.config.phi),
                              gtfm::csv::format_double(r.config.sigma_v),
                              gtfm::csv::format_double(r.config.beta1),
                              gtfm::csv::format_double(r.config.beta2),
                              gtfm::csv::format_double(r.hit_rate_x1),
                              gtfm::csv::format_double(r.hit_rate_x2)});
        gtfm::csv::write(opt.out + "/hit_rates.csv", t);
        write_manifest(opt.out, "simulate", opt,
                       {{"experiment", "hit_rate"}, {"configs", configs.size()}, {"L", L}},
                       {"hit_rates.csv"});
        std::cout << "hit-rate experiment over " << configs.size() << " configurations; wrote "
                  << opt.out << "/hit_rates.csv\n";
        return 0;
    }

    if (experiment == "recovery") {
        gtfm::SimConfig c = sim_config_from(
            opt.cfg.contains("truth") ? opt.cfg["truth"] : json::object(), opt.seed);
        if (!opt.cfg.contains("truth")) c.replicates = 100;
        gtfm::SamplerConfig sc = sampler_config(opt);
        if (!opt.cfg.contains("sampler")) {
            sc.n_chains = 2;
            sc.n_warmup = 400;
            sc.n_keep = 400;
        }
        const auto res = gtfm::recovery_experiment(c, sc, opt.threads);

        gtfm::csv::Table t;
        t.header = {"param", "truth", "mean", "sd", "mse", "mae"};
        for (const auto& r : res.rows)
            t.rows.push_back({r.param, gtfm::csv::format_double(r.truth),
                              gtfm::csv::format_double(r.mean), gtfm::csv::format_double(r.sd),
                              gtfm::csv::format_double(r.mse), gtfm::csv::format_double(r.mae)});
        gtfm::csv::write(opt.out + "/recovery.csv", t);
        write_json(opt.out + "/recovery.json",
                   {{"replicates", c.replicates}, {"used", res.used}, {"failed", res.failed}});
        write_manifest(opt.out, "simulate", opt, {{"experiment", "recovery"}},
                       {"recovery.csv", "recovery.json"});
        std::cout << "recovery experiment: " << res.used << "/" << c.replicates
                  << " replicates; wrote " << opt.out << "/recovery.csv\n";
        return 0;
    }
    throw std::runtime_error("unknown experiment '" + experiment +
                             "' (expected hit_rate or recovery)");
}

int cmd_baseline(const Options& opt) {
    const auto frame = load_data(opt.data, opt.target());
    const auto fit = gtfm::ols_baseline(frame);

    std::filesystem::create_directories(opt.out);
    gtfm::csv::Table t;
    t.header = {"param", "coef", "se", "t", "p"};
    for (std::size_t j = 0; j < fit.names.size(); ++j)
        t.rows.push_back({fit.names[j], gtfm::csv::format_double(fit.coef[j]),
                          gtfm::csv::format_double(fit.se[j]),
                          gtfm::csv::format_double(fit.t[j]),
                          gtfm::csv::format_double(fit.p[j])});
    gtfm::csv::write(opt.out + "/baseline.csv", t);

    json bj;
    bj["r2"] = fit.r2;
    bj["sigma2"] = fit.sigma2;
    bj["df"] = fit.df;
    bj["durbin_watson"] = gtfm::durbin_watson(fit.residuals);
    write_json(opt.out + "/baseline.json", bj);

    write_manifest(opt.out, "baseline", opt,
                   {{"data", opt.data}, {"target", frame.risk_target()}},
                   {"baseline.csv", "baseline.json"});
    std::cout << "baseline OLS R2=" << fit.r2 << "; wrote " << opt.out << "/baseline.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stress-testing pipeline: impact measures, transfer-function models, "
                 "Bayesian fitting, scenario projection"};
    app.require_subcommand(1);

    Options opt;
    std::string config_path;
    std::string command;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file; flags override its values");
        sub->add_option("--seed", opt.seed, "random seed")->each([&](std::string) {
            opt.seed_set = true;
        });
        sub->add_option("--out", opt.out, "output directory")->each([&](std::string) {
            opt.out_set = true;
        });
        sub->add_option("--threads", opt.threads, "worker threads (0 = hardware)")
            ->each([&](std::string) { opt.threads_set = true; });
        sub->add_option("--model", opt.model, "catalog model name (I..IV) or model JSON path")
            ->each([&](std::string) { opt.model_set = true; });
        sub->add_option("--data", opt.data, "data CSV (period column + series)")
            ->each([&](std::string) { opt.data_set = true; });
        sub->add_option("--scenarios", opt.scenarios, "scenario CSV")
            ->each([&](std::string) { opt.scenarios_set = true; });
        sub->add_option("--lags", opt.lags, "maximum lag / curve length")
            ->each([&](std::string) { opt.lags_set = true; });
        sub->callback([&, sub] { command = sub->get_name(); });
    };

    const std::pair<const char*, const char*> subs[] = {
        {"impact", "empirical response and diffusion curves per macro column"},
        {"fit", "posterior sampling for one model on a data CSV"},
        {"forecast", "posterior predictive projection along scenario paths"},
        {"compare", "fit several models and tabulate fit and information criteria"},
        {"simulate", "hit-rate and parameter-recovery simulation studies"},
        {"baseline", "OLS regression of the target on the macro columns"},
    };
    for (const auto& [name, blurb] : subs) add_common(app.add_subcommand(name, blurb));

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) opt.cfg = load_config(config_path);
        opt.merge();
        if (command == "impact") return cmd_impact(opt);
        if (command == "fit") return cmd_fit(opt);
        if (command == "forecast") return cmd_forecast(opt);
        if (command == "compare") return cmd_compare(opt);
        if (command == "simulate") return cmd_simulate(opt);
        if (command == "baseline") return cmd_baseline(opt);
        throw std::runtime_error("no command selected");
    } catch (const UnknownModelError& e) {
        nlohmann::json err{{"error", e.what()}, {"model", e.model}, {"command", command}};
        std::cout << err.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        nlohmann::json err{{"error", e.what()}, {"command", command}};
        std::cout << err.dump() << "\n";
        return 1;
    }
}
