#pragma once
/// CSV ingestion for curve data.
///
/// Schema (`curves.csv`): header `date,kind,tenor,rate`; one row per pillar.
///   kind  : `zero` (discount pillar) or `fwd` (forward Libor pillar)
///   tenor : empty for zero rows, tenor label (`3M`, `6M`, ...) for fwd rows
///   date  : ISO-8601; rows must be sorted and unique within each curve
///   rate  : decimal (0.006357, not 0.6357)

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mchjm/curves.hpp"

namespace mchjm {

struct CurveParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_rate(const std::string& s, int row) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw CurveParseError("row " + std::to_string(row) + ": bad rate '" + s + "'");
    }
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

/// Parses the curves CSV into a CurveSet anchored at `anchor`.
inline CurveSet load_curves(std::istream& in, MarketDate anchor, const std::string& name = "curves") {
    std::string line;
    if (!std::getline(in, line)) throw CurveParseError(name + ": empty file");
    if (detail::split_csv_row(line) != std::vector<std::string>{"date", "kind", "tenor", "rate"})
        throw CurveParseError(name + ": expected header 'date,kind,tenor,rate'");

    std::vector<MarketDate> zero_dates;
    std::vector<double> zero_rates;
    std::map<int, std::pair<std::vector<MarketDate>, std::vector<double>>> fwd;

    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto f = detail::split_csv_row(line);
        if (f.size() != 4)
            throw CurveParseError("row " + std::to_string(row) + ": expected 4 fields, got " + std::to_string(f.size()));
        MarketDate d;
        try {
            d = MarketDate::parse(f[0]);
        } catch (const std::exception& e) {
            throw CurveParseError("row " + std::to_string(row) + ": " + e.what());
        }
        const double r = detail::parse_rate(f[3], row);
        if (f[1] == "zero") {
            if (!f[2].empty())
                throw CurveParseError("row " + std::to_string(row) + ": zero rows must have empty tenor");
            if (!zero_dates.empty() && d <= zero_dates.back())
                throw CurveParseError("row " + std::to_string(row) + ": unsorted or duplicate zero pillar " + f[0]);
            zero_dates.push_back(d);
            zero_rates.push_back(r);
        } else if (f[1] == "fwd") {
            Tenor x;
            try {
                x = tenor_from_label(f[2]);
            } catch (const std::exception& e) {
                throw CurveParseError("row " + std::to_string(row) + ": " + e.what());
            }
            auto& [ds, rs] = fwd[x.months];
            if (!ds.empty() && d <= ds.back())
                throw CurveParseError("row " + std::to_string(row) + ": unsorted or duplicate " + f[2] + " pillar " + f[0]);
            ds.push_back(d);
            rs.push_back(r);
        } else {
            throw CurveParseError("row " + std::to_string(row) + ": unknown kind '" + f[1] + "'");
        }
    }
    if (zero_dates.empty()) throw CurveParseError(name + ": no zero-rate pillars");

    CurveSet cs{DiscountCurve(anchor, zero_dates, std::move(zero_rates))};
    for (auto& [months, data] : fwd)
        cs.add(TenorCurve(anchor, Tenor{months}, data.first, std::move(data.second)));
    return cs;
}

inline CurveSet load_curves(const std::string& path, MarketDate anchor) {
    std::ifstream in(path);
    if (!in) throw CurveParseError("cannot open curves file '" + path + "'");
    return load_curves(in, anchor, path);
}

/// Writes the same schema back; rates round-trip bit-exactly through parse.
inline void save_curves(const CurveSet& cs, std::ostream& out) {
    out << "date,kind,tenor,rate\n";
    const auto& dc = cs.discount();
    for (std::size_t i = 0; i < dc.pillar_times().size(); ++i) {
        const MarketDate d{cs.anchor().serial + static_cast<int>(std::lround(dc.pillar_times()[i] * 360.0))};
        out << d.to_string() << ",zero,," << detail::format_double(dc.zero_rates()[i]) << "\n";
    }
    for (const auto& [months, tc] : cs.tenor_curves()) {
        for (std::size_t i = 0; i < tc.pillar_times().size(); ++i) {
            const MarketDate d{cs.anchor().serial + static_cast<int>(std::lround(tc.pillar_times()[i] * 360.0))};
            out << d.to_string() << ",fwd," << tenor_label(Tenor{months}) << ","
                << detail::format_double(tc.rates()[i]) << "\n";
        }
    }
}

inline void save_curves(const CurveSet& cs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write curves file '" + path + "'");
    save_curves(cs, out);
}

} // namespace mchjm
