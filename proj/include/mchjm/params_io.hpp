#pragma once
/// Flat key-value parameter files.
///
/// Grammar: one `key = value` pair per line; `#` starts a comment; arrays
/// are comma-separated. Keys:
///   n          factor count (integer)
///   lambda     n mean reversions
///   h          n volatility scales
///   eta        n tenor dampings
///   rho        lower triangle of the correlation matrix, row-major,
///              diagonal included (n(n+1)/2 values, diagonal must be 1)
///   beta0 beta1 beta2   hump parameters
///   shift_rule only supported file value: inverse_tenor (default)

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mchjm/params.hpp"

namespace mchjm {

struct ParamParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<double> parse_array(const std::string& s, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ParamParseError("bad number '" + item + "' in key '" + key + "'");
        }
    }
    return out;
}

} // namespace detail

inline std::map<std::string, std::string> read_keyvalue(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParamParseError("line " + std::to_string(row) + ": expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        if (kv.count(key)) throw ParamParseError("duplicate key '" + key + "'");
        kv[key] = detail::trim(line.substr(eq + 1));
    }
    return kv;
}

inline WgParams load_params(std::istream& in) {
    auto kv = read_keyvalue(in);
    auto need = [&](const std::string& key) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end()) throw ParamParseError("missing key '" + key + "'");
        return it->second;
    };
    const int n = static_cast<int>(std::stol(need("n")));
    if (n < 1) throw ParamParseError("n must be >= 1");
    auto arr = [&](const std::string& key, std::size_t len) {
        auto v = detail::parse_array(need(key), key);
        if (v.size() != len)
            throw ParamParseError("key '" + key + "': expected " + std::to_string(len) + " values, got " +
                                  std::to_string(v.size()));
        return v;
    };
    const auto lambda = arr("lambda", n);
    const auto h = arr("h", n);
    const auto eta = arr("eta", n);
    const auto tri = arr("rho", static_cast<std::size_t>(n) * (n + 1) / 2);
    Eigen::MatrixXd rho(n, n);
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            rho(i, j) = rho(j, i) = tri[idx++];
        }
    const double b0 = std::stod(need("beta0"));
    const double b1 = std::stod(need("beta1"));
    const double b2 = std::stod(need("beta2"));
    if (kv.count("shift_rule") && kv["shift_rule"] != "inverse_tenor")
        throw ParamParseError("unsupported shift_rule '" + kv["shift_rule"] + "'");
    try {
        return WgParams(lambda, h, eta, rho, b0, b1, b2);
    } catch (const std::invalid_argument& e) {
        throw ParamParseError(e.what());
    }
}

inline WgParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParamParseError("cannot open params file '" + path + "'");
    return load_params(in);
}

inline void save_params(const WgParams& p, std::ostream& out) {
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    auto join = [&](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
        return s;
    };
    out << "n = " << p.n << "\n";
    out << "lambda = " << join(p.lambda) << "\n";
    out << "h = " << join(p.h) << "\n";
    out << "eta = " << join(p.eta) << "\n";
    std::string tri;
    for (int i = 0; i < p.n; ++i)
        for (int j = 0; j <= i; ++j) tri += (tri.empty() ? "" : ", ") + fmt(p.rho(i, j));
    out << "rho = " << tri << "\n";
    out << "beta0 = " << fmt(p.beta0) << "\n";
    out << "beta1 = " << fmt(p.beta1) << "\n";
    out << "beta2 = " << fmt(p.beta2) << "\n";
    out << "shift_rule = inverse_tenor\n";
}

inline void save_params(const WgParams& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write params file '" + path + "'");
    save_params(p, out);
}

} // namespace mchjm
