#pragma once

#include <compare>
#include <stdexcept>
#include <string>

namespace gtfm {

/// A calendar quarter, e.g. 2008Q3. Ordered, hashable by (year, quarter).
struct Period {
    int year = 0;
    int quarter = 1;  // 1..4

    auto operator<=>(const Period&) const = default;

    static Period parse(const std::string& s) {
        const auto q = s.find('Q');
        if (q == std::string::npos || q == 0 || q + 2 != s.size())
            throw std::invalid_argument("malformed period '" + s + "', expected e.g. 2008Q1");
        Period p;
        try {
            std::size_t pos = 0;
            p.year = std::stoi(s.substr(0, q), &pos);
            if (pos != q) throw std::invalid_argument(s);
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed period '" + s + "', expected e.g. 2008Q1");
        }
        const char qc = s[q + 1];
        if (qc < '1' || qc > '4')
            throw std::invalid_argument("period '" + s + "' has quarter outside 1..4");
        p.quarter = qc - '0';
        return p;
    }

    std::string str() const {
        return std::to_string(year) + "Q" + std::to_string(quarter);
    }

    Period plus(int n) const {
        const int idx = year * 4 + (quarter - 1) + n;
        Period p;
        p.year = idx >= 0 ? idx / 4 : (idx - 3) / 4;
        p.quarter = idx - p.year * 4 + 1;
        return p;
    }

    /// Number of quarters from other to this (this - other).
    int minus(const Period& other) const {
        return (year - other.year) * 4 + (quarter - other.quarter);
    }
};

}  // namespace gtfm
