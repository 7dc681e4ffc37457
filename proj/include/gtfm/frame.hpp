#pragma once

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtfm/csv.hpp"
#include "gtfm/period.hpp"

namespace gtfm {

/// Aligned quarterly multivariate series. Columns share one consecutive
/// period axis starting at `start`; `risk_target` names the column holding
/// the stressed risk parameter, every other column is a macro driver.
class TimeSeriesFrame {
public:
    TimeSeriesFrame() = default;

    TimeSeriesFrame(Period start, std::vector<std::string> names,
                    std::vector<std::vector<double>> columns, std::string risk_target)
        : start_(start),
          names_(std::move(names)),
          columns_(std::move(columns)),
          risk_target_(std::move(risk_target)) {
        validate();
    }

    std::size_t rows() const { return columns_.empty() ? 0 : columns_[0].size(); }
    std::size_t cols() const { return names_.size(); }
    Period start() const { return start_; }
    Period period_at(std::size_t t) const { return start_.plus(static_cast<int>(t)); }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& risk_target() const { return risk_target_; }

    bool has(const std::string& name) const {
        return std::find(names_.begin(), names_.end(), name) != names_.end();
    }

    std::size_t index(const std::string& name) const {
        const auto it = std::find(names_.begin(), names_.end(), name);
        if (it == names_.end()) throw std::invalid_argument("no column named '" + name + "'");
        return static_cast<std::size_t>(it - names_.begin());
    }

    const std::vector<double>& col(const std::string& name) const {
        return columns_[index(name)];
    }
    const std::vector<double>& col(std::size_t i) const { return columns_.at(i); }
    const std::vector<double>& target() const { return col(risk_target_); }

    /// Rows with from <= period <= to, inclusive. Both bounds must lie inside
    /// the frame's axis.
    TimeSeriesFrame slice(Period from, Period to) const {
        const int lo = from.minus(start_);
        const int hi = to.minus(start_);
        if (lo < 0 || hi >= static_cast<int>(rows()) || lo > hi)
            throw std::invalid_argument("slice window " + from.str() + ":" + to.str() +
                                        " outside frame axis");
        std::vector<std::vector<double>> cut(columns_.size());
        for (std::size_t c = 0; c < columns_.size(); ++c)
            cut[c].assign(columns_[c].begin() + lo, columns_[c].begin() + hi + 1);
        return {from, names_, std::move(cut), risk_target_};
    }

private:
    void validate() const {
        if (names_.size() != columns_.size())
            throw std::invalid_argument("frame: names/columns size mismatch");
        if (names_.empty()) throw std::invalid_argument("frame: no columns");
        std::set<std::string> seen;
        for (const auto& n : names_)
            if (!seen.insert(n).second)
                throw std::invalid_argument("frame: duplicate column name '" + n + "'");
        const auto T = columns_[0].size();
        if (T == 0) throw std::invalid_argument("frame: zero rows");
        for (const auto& c : columns_)
            if (c.size() != T) throw std::invalid_argument("frame: ragged columns");
        if (!seen.count(risk_target_))
            throw std::invalid_argument("frame: risk target '" + risk_target_ +
                                        "' is not a column");
    }

    Period start_;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
    std::string risk_target_;
};

/// Reads a frame from CSV. First column must be `period` with consecutive
/// quarters; remaining columns are numeric series. `target` selects the risk
/// parameter column.
inline TimeSeriesFrame load_frame(const std::string& path, const std::string& target) {
    const auto t = csv::read(path);
    if (t.header.empty() || t.header[0] != "period")
        throw std::runtime_error(path + ": first column must be 'period'");
    if (t.rows.empty()) throw std::runtime_error(path + ": no data rows");

    const Period start = Period::parse(t.rows[0][0]);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const Period p = Period::parse(t.rows[r][0]);
        if (p != start.plus(static_cast<int>(r)))
            throw std::runtime_error(path + ": periods not consecutive at row " +
                                     std::to_string(r + 1) + " (" + p.str() + ")");
    }

    std::vector<std::string> names(t.header.begin() + 1, t.header.end());
    std::vector<std::vector<double>> columns(names.size(),
                                             std::vector<double>(t.rows.size()));
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        for (std::size_t c = 0; c < names.size(); ++c)
            columns[c][r] = csv::parse_double(
                t.rows[r][c + 1], path + " row " + std::to_string(r + 1) + " col " + names[c]);
    return {start, std::move(names), std::move(columns), target};
}

inline void write_frame(const TimeSeriesFrame& f, const std::string& path) {
    csv::Table t;
    t.header.push_back("period");
    for (const auto& n : f.names()) t.header.push_back(n);
    for (std::size_t r = 0; r < f.rows(); ++r) {
        std::vector<std::string> row;
        row.push_back(f.period_at(r).str());
        for (std::size_t c = 0; c < f.cols(); ++c)
            row.push_back(csv::format_double(f.col(c)[r]));
        t.rows.push_back(std::move(row));
    }
    csv::write(path, t);
}

/// Request to replace one macro column by its lags 0..max_lag.
struct LagExpansion {
    std::string base_name;
    int max_lag = 0;
};

/// Builds the regression view of a frame: an intercept column of ones, then
/// the original columns in order, with each expanded base replaced in place
/// by base_L0..base_L<max_lag>. Rows shrink by the largest requested lag so
/// every lagged value exists; unexpanded columns (including the risk target)
/// are truncated to the same tail.
inline TimeSeriesFrame expand_lags(const TimeSeriesFrame& f,
                                   const std::vector<LagExpansion>& expansions) {
    int max_s = 0;
    for (const auto& e : expansions) {
        if (!f.has(e.base_name))
            throw std::invalid_argument("expand_lags: unknown base column '" + e.base_name + "'");
        if (e.base_name == f.risk_target())
            throw std::invalid_argument("expand_lags: cannot expand the risk target '" +
                                        e.base_name + "'");
        if (e.max_lag < 0) throw std::invalid_argument("expand_lags: negative lag");
        max_s = std::max(max_s, e.max_lag);
    }
    if (static_cast<std::size_t>(max_s) >= f.rows())
        throw std::invalid_argument("expand_lags: lag " + std::to_string(max_s) +
                                    " leaves no rows");

    const std::size_t T_out = f.rows() - static_cast<std::size_t>(max_s);
    std::vector<std::string> names{"intercept"};
    std::vector<std::vector<double>> columns{std::vector<double>(T_out, 1.0)};

    const auto lag_of = [&](const std::string& name) -> const LagExpansion* {
        for (const auto& e : expansions)
            if (e.base_name == name) return &e;
        return nullptr;
    };

    for (std::size_t c = 0; c < f.cols(); ++c) {
        const auto& name = f.names()[c];
        const auto& src = f.col(c);
        if (const LagExpansion* e = lag_of(name)) {
            for (int j = 0; j <= e->max_lag; ++j) {
                std::vector<double> lagged(T_out);
                for (std::size_t r = 0; r < T_out; ++r)
                    lagged[r] = src[r + static_cast<std::size_t>(max_s - j)];
                names.push_back(name + "_L" + std::to_string(j));
                columns.push_back(std::move(lagged));
            }
        } else {
            names.push_back(name);
            columns.emplace_back(src.begin() + max_s, src.end());
        }
    }
    return {f.start().plus(max_s), std::move(names), std::move(columns), f.risk_target()};
}

}  // namespace gtfm
