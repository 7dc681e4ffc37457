#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gtfm/csv.hpp"
#include "gtfm/hmc.hpp"
#include "gtfm/model_json.hpp"

namespace gtfm {

/// Everything needed to resume post-fit analysis: the model, where the data
/// came from, and the retained draws.
struct FitBundle {
    ModelSpec spec;
    std::string data_path;
    std::string target;
    SamplerConfig sampler;
    PosteriorDraws draws;
};

namespace fit_io_detail {

inline nlohmann::json sampler_to_json(const SamplerConfig& c) {
    return nlohmann::json{{"n_chains", c.n_chains},
                          {"n_warmup", c.n_warmup},
                          {"n_keep", c.n_keep},
                          {"step_size", c.step_size},
                          {"n_leapfrog", c.n_leapfrog},
                          {"target_accept", c.target_accept},
                          {"seed", c.seed},
                          {"adapt_step", c.adapt_step},
                          {"adapt_mass", c.adapt_mass}};
}

inline SamplerConfig sampler_from_json(const nlohmann::json& j) {
    SamplerConfig c;
    c.n_chains = j.at("n_chains").get<int>();
    c.n_warmup = j.at("n_warmup").get<int>();
    c.n_keep = j.at("n_keep").get<int>();
    c.step_size = j.at("step_size").get<double>();
    c.n_leapfrog = j.at("n_leapfrog").get<int>();
    c.target_accept = j.at("target_accept").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.adapt_step = j.at("adapt_step").get<bool>();
    c.adapt_mass = j.at("adapt_mass").get<bool>();
    return c;
}

}  // namespace fit_io_detail

/// Writes draws.csv (one column per parameter, chain-major rows), loglik.csv
/// (one column per likelihood factor) and manifest.json into `dir`. Numbers are
/// written round-trip exact, and the manifest carries no timestamps, so a
/// rerun with the same seed byte-reproduces every file.
inline void save_fit(const std::string& dir, const ModelSpec& spec,
                     const std::string& data_path, const std::string& target,
                     const SamplerConfig& scfg, const PosteriorDraws& post,
                     const std::vector<std::string>& extra_outputs = {}) {
    std::filesystem::create_directories(dir);

    csv::Table dt;
    dt.header = post.names;
    for (std::size_t m = 0; m < post.size(); ++m) {
        std::vector<std::string> row;
        for (double v : post.draws[m]) row.push_back(csv::format_double(v));
        dt.rows.push_back(std::move(row));
    }
    csv::write(dir + "/draws.csv", dt);

    csv::Table lt;
    const std::size_t n_fac = post.pointwise.empty() ? 0 : post.pointwise[0].size();
    for (std::size_t i = 0; i < n_fac; ++i) lt.header.push_back("ll_" + std::to_string(i + 1));
    for (const auto& pw : post.pointwise) {
        std::vector<std::string> row;
        for (double v : pw) row.push_back(csv::format_double(v));
        lt.rows.push_back(std::move(row));
    }
    csv::write(dir + "/loglik.csv", lt);

    nlohmann::json man;
    man["command"] = "fit";
    man["version"] = "0.1.0";
    man["model"] = model_to_json(spec);
    man["data"] = data_path;
    man["target"] = target;
    man["sampler"] = fit_io_detail::sampler_to_json(scfg);
    man["draws"] = {{"n_chains", post.n_chains},
                    {"n_keep", post.n_keep},
                    {"n_warmup", post.n_warmup},
                    {"warmup_divergences", post.warmup_divergences}};
    std::vector<std::string> outputs = {"draws.csv", "loglik.csv", "manifest.json"};
    outputs.insert(outputs.end(), extra_outputs.begin(), extra_outputs.end());
    man["outputs"] = outputs;

    std::ofstream os(dir + "/manifest.json", std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + dir + "/manifest.json");
    os << man.dump(2) << "\n";
}

inline FitBundle load_fit(const std::string& dir) {
    std::ifstream is(dir + "/manifest.json", std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + dir + "/manifest.json");
    nlohmann::json man;
    is >> man;

    FitBundle b;
    b.spec = model_from_json(man.at("model"));
    b.data_path = man.at("data").get<std::string>();
    b.target = man.at("target").get<std::string>();
    b.sampler = fit_io_detail::sampler_from_json(man.at("sampler"));

    const auto dt = csv::read(dir + "/draws.csv");
    b.draws.names = dt.header;
    for (std::size_t r = 0; r < dt.rows.size(); ++r) {
        std::vector<double> row(b.draws.names.size());
        for (std::size_t c = 0; c < row.size(); ++c)
            row[c] = csv::parse_double(dt.rows[r][c],
                                       dir + "/draws.csv row " + std::to_string(r + 1));
        b.draws.draws.push_back(std::move(row));
    }

    const auto lt = csv::read(dir + "/loglik.csv");
    for (std::size_t r = 0; r < lt.rows.size(); ++r) {
        std::vector<double> row(lt.header.size());
        for (std::size_t c = 0; c < row.size(); ++c)
            row[c] = csv::parse_double(lt.rows[r][c],
                                       dir + "/loglik.csv row " + std::to_string(r + 1));
        b.draws.pointwise.push_back(std::move(row));
    }
    if (b.draws.pointwise.size() != b.draws.size())
        throw std::runtime_error(dir + ": draws.csv and loglik.csv row counts differ");

    const auto& dj = man.at("draws");
    b.draws.n_chains = dj.at("n_chains").get<int>();
    b.draws.n_keep = dj.at("n_keep").get<int>();
    b.draws.n_warmup = dj.at("n_warmup").get<int>();
    b.draws.warmup_divergences = dj.at("warmup_divergences").get<int>();
    if (b.draws.n_keep > 0 &&
        b.draws.size() != static_cast<std::size_t>(b.draws.n_chains) *
                              static_cast<std::size_t>(b.draws.n_keep))
        throw std::runtime_error(dir + ": draw count does not match chains * kept");
    for (std::size_t m = 0; m < b.draws.size(); ++m)
        b.draws.chain_ids.push_back(static_cast<int>(m) / b.draws.n_keep);
    return b;
}

}  // namespace gtfm
