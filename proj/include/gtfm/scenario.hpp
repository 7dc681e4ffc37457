#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtfm/csv.hpp"
#include "gtfm/period.hpp"

namespace gtfm {

/// A set of named macro paths over one shared future period axis.
struct ScenarioSet {
    std::vector<std::string> scenario_names;        // in file order
    std::vector<std::string> macro_names;           // column order from file
    Period start;                                   // first projected quarter
    std::size_t horizon = 0;                        // quarters per scenario
    // paths[s][h][m]: scenario s, step h, macro m.
    std::vector<std::vector<std::vector<double>>> paths;

    std::size_t scenario_index(const std::string& name) const {
        for (std::size_t i = 0; i < scenario_names.size(); ++i)
            if (scenario_names[i] == name) return i;
        throw std::invalid_argument("no scenario named '" + name + "'");
    }
};

/// Reads scenarios from CSV with columns scenario,period,<macro...>.
/// Every scenario must cover the same consecutive quarter axis exactly once.
inline ScenarioSet load_scenarios(const std::string& path) {
    const auto t = csv::read(path);
    if (t.header.size() < 3 || t.header[0] != "scenario" || t.header[1] != "period")
        throw std::runtime_error(path + ": header must start scenario,period");
    ScenarioSet out;
    out.macro_names.assign(t.header.begin() + 2, t.header.end());

    std::map<std::string, std::size_t> index;
    std::vector<std::vector<Period>> periods;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& name = t.rows[r][0];
        const Period p = Period::parse(t.rows[r][1]);
        auto [it, inserted] = index.try_emplace(name, out.scenario_names.size());
        if (inserted) {
            out.scenario_names.push_back(name);
            out.paths.emplace_back();
            periods.emplace_back();
        }
        const auto s = it->second;
        for (const auto& q : periods[s])
            if (q == p)
                throw std::runtime_error(path + ": duplicate row for scenario '" + name +
                                         "' period " + p.str());
        if (!periods[s].empty() && p != periods[s].back().plus(1))
            throw std::runtime_error(path + ": periods not consecutive in scenario '" + name +
                                     "' at " + p.str());
        periods[s].push_back(p);
        std::vector<double> row(out.macro_names.size());
        for (std::size_t m = 0; m < row.size(); ++m)
            row[m] = csv::parse_double(t.rows[r][m + 2],
                                       path + " scenario " + name + " " + p.str());
        out.paths[s].push_back(std::move(row));
    }
    if (out.scenario_names.empty()) throw std::runtime_error(path + ": no scenarios");

    out.horizon = out.paths[0].size();
    out.start = periods[0][0];
    for (std::size_t s = 0; s < out.paths.size(); ++s) {
        if (out.paths[s].size() != out.horizon)
            throw std::runtime_error(path + ": scenario '" + out.scenario_names[s] +
                                     "' has " + std::to_string(out.paths[s].size()) +
                                     " rows, expected " + std::to_string(out.horizon));
        if (periods[s][0] != out.start)
            throw std::runtime_error(path + ": scenario '" + out.scenario_names[s] +
                                     "' starts at " + periods[s][0].str() + ", expected " +
                                     out.start.str());
    }
    return out;
}

}  // namespace gtfm
