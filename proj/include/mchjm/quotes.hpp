#pragma once
/// Swaption quote grid I/O.
///
/// Schema (`swaptions.csv`): header `expiry_years,tenor_years,float_tenor,premium`;
/// premium is a spot premium as a decimal fraction of notional (0.0027 for 0.27%).

#include <fstream>
#include <string>
#include <vector>

#include "mchjm/curves.hpp"
#include "mchjm/curves_io.hpp"

namespace mchjm {

struct SwaptionQuote {
    int expiry_years = 0;
    int tenor_years = 0;
    Tenor float_tenor;
    double premium = 0.0;  // fraction of notional

    bool operator==(const SwaptionQuote&) const = default;
};

inline std::vector<SwaptionQuote> load_swaption_quotes(std::istream& in, const std::string& name = "swaptions") {
    std::string line;
    if (!std::getline(in, line)) throw CurveParseError(name + ": empty file");
    if (detail::split_csv_row(line) !=
        std::vector<std::string>{"expiry_years", "tenor_years", "float_tenor", "premium"})
        throw CurveParseError(name + ": expected header 'expiry_years,tenor_years,float_tenor,premium'");
    std::vector<SwaptionQuote> out;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto f = detail::split_csv_row(line);
        if (f.size() != 4)
            throw CurveParseError("row " + std::to_string(row) + ": expected 4 fields");
        SwaptionQuote q;
        try {
            q.expiry_years = std::stoi(f[0]);
            q.tenor_years = std::stoi(f[1]);
            q.float_tenor = tenor_from_label(f[2]);
        } catch (const std::exception& e) {
            throw CurveParseError("row " + std::to_string(row) + ": " + e.what());
        }
        q.premium = detail::parse_rate(f[3], row);
        if (q.expiry_years <= 0 || q.tenor_years <= 0 || q.premium < 0.0)
            throw CurveParseError("row " + std::to_string(row) + ": expiry/tenor must be positive, premium non-negative");
        out.push_back(q);
    }
    if (out.empty()) throw CurveParseError(name + ": no quotes");
    return out;
}

inline std::vector<SwaptionQuote> load_swaption_quotes(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CurveParseError("cannot open swaptions file '" + path + "'");
    return load_swaption_quotes(in, path);
}

inline void save_swaption_quotes(const std::vector<SwaptionQuote>& quotes, std::ostream& out) {
    out << "expiry_years,tenor_years,float_tenor,premium\n";
    for (const auto& q : quotes)
        out << q.expiry_years << "," << q.tenor_years << "," << tenor_label(q.float_tenor) << ","
            << detail::format_double(q.premium) << "\n";
}

inline void save_swaption_quotes(const std::vector<SwaptionQuote>& quotes, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write swaptions file '" + path + "'");
    save_swaption_quotes(quotes, out);
}

} // namespace mchjm
