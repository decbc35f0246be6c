#pragma once
/// Multistart box-constrained least-squares calibration and its result
/// artifacts (parameter CSV, residual grid CSV).

#include <fstream>
#include <sstream>
#include <thread>

#include "mchjm/black.hpp"
#include "mchjm/levmar.hpp"
#include "mchjm/objective.hpp"

namespace mchjm {

struct StartDiagnostics {
    int start_index = 0;
    double objective = 0.0;
    int iterations = 0;
    std::string stop_reason;
};

struct ResidualCell {
    SwaptionQuote quote;
    double market_premium = 0.0;
    double model_premium = 0.0;
    double price_rel_error = 0.0;
    double market_vol = 0.0;  // unshifted lognormal implied vol
    double model_vol = 0.0;
    double vol_error_bp = 0.0;  // (market - model) * 1e4
    bool vol_ok = true;
};

struct CalibrationResult {
    ModelVariant variant = ModelVariant::WG2PP;
    WgParams params;
    Eigen::VectorXd theta;
    double chi2 = 0.0;
    std::optional<double> chi2_normalized;  // vs a baseline run
    std::vector<ResidualCell> residuals;
    std::vector<StartDiagnostics> starts;
    std::vector<std::pair<int, double>> trace;  // best run's (iter, objective)
};

/// The documented multistart seed grid: log-spaced (lambda, h) combinations
/// with fixed mid-range correlation and hump parameters.
inline std::vector<Eigen::VectorXd> multistart_grid(const CalibrationProblem& prob) {
    const bool he = variant_has_eta(prob.variant());
    std::vector<Eigen::VectorXd> starts;
    for (double l1 : {0.005, 0.05})
        for (double gap : {0.5, 5.0})
            for (double hs : {1.0, 3.5}) {
                std::vector<double> v{l1, std::log(gap), 0.005 * hs, 0.02 * hs};
                if (he) v.insert(v.end(), {0.2, 0.8});
                v.insert(v.end(), {-0.7, 1.2, 1.0, 0.6});
                starts.emplace_back(Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
            }
    return starts;
}

/// Residual grid at given parameters; vols are unshifted lognormal so the
/// numbers are comparable across variants and tenors.
inline std::vector<ResidualCell> residual_grid(const CalibrationProblem& prob, const WgParams& p) {
    std::vector<ResidualCell> out;
    out.reserve(prob.cells().size());
    for (std::size_t i = 0; i < prob.cells().size(); ++i) {
        const auto& c = prob.cells()[i];
        ResidualCell rc;
        rc.quote = prob.quotes()[i];
        rc.market_premium = c.market_premium;
        rc.model_premium = prob.cell_price(p, c);
        rc.price_rel_error = (rc.model_premium - rc.market_premium) / rc.market_premium;
        try {
            rc.market_vol = implied_black_vol(rc.market_premium, c.par_rate, c.strike, 0.0, c.annuity,
                                              c.schedule.expiry);
            rc.model_vol = implied_black_vol(rc.model_premium, c.par_rate, c.strike, 0.0, c.annuity,
                                             c.schedule.expiry);
            rc.vol_error_bp = (rc.market_vol - rc.model_vol) * 1e4;
        } catch (const std::exception&) {
            rc.vol_ok = false;  // cell marked unavailable, run continues
        }
        out.push_back(rc);
    }
    return out;
}

struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Runs LM from the seed grid (plus any extra starts) and returns the best
/// run; deterministic given (data, settings, extra starts) — ties and merge
/// order are resolved by start index.
inline CalibrationResult calibrate(const CalibrationProblem& prob,
                                   const std::vector<Eigen::VectorXd>& extra_starts = {}) {
    const auto& settings = prob.settings();
    const ThetaBounds bounds = prob.default_bounds();

    std::vector<Eigen::VectorXd> starts = multistart_grid(prob);
    if (settings.multistart < static_cast<int>(starts.size()) && settings.multistart >= 1)
        starts.resize(static_cast<std::size_t>(settings.multistart));
    for (const auto& s : extra_starts) starts.push_back(s);

    LevMarOptions opts;
    opts.max_iters = settings.max_iters;
    opts.ftol = settings.tolerance;
    opts.xtol = settings.tolerance;

    const ResidualFn fn = [&](const Eigen::VectorXd& th) { return prob.residuals(th); };

    std::vector<LevMarResult> runs(starts.size());
    int nthreads = settings.threads;
    if (nthreads <= 0) nthreads = static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(starts.size())));
    if (nthreads == 1) {
        for (std::size_t i = 0; i < starts.size(); ++i) runs[i] = levmar_box(fn, starts[i], bounds.lo, bounds.hi, opts);
    } else {
        std::vector<std::thread> workers;
        for (int w = 0; w < nthreads; ++w)
            workers.emplace_back([&, w] {
                for (std::size_t i = static_cast<std::size_t>(w); i < starts.size();
                     i += static_cast<std::size_t>(nthreads))
                    runs[i] = levmar_box(fn, starts[i], bounds.lo, bounds.hi, opts);
            });
        for (auto& t : workers) t.join();
    }

    CalibrationResult res;
    res.variant = prob.variant();
    std::size_t best = starts.size();
    for (std::size_t i = 0; i < runs.size(); ++i) {
        res.starts.push_back({static_cast<int>(i), runs[i].objective, runs[i].iterations, runs[i].stop_reason});
        if (std::isfinite(runs[i].objective) && (best == starts.size() || runs[i].objective < runs[best].objective))
            best = i;
    }
    if (best == starts.size()) {
        std::string diag = "calibration failed: no start produced a finite objective;";
        for (const auto& s : res.starts)
            diag += " start " + std::to_string(s.start_index) + " -> " + s.stop_reason + ";";
        throw CalibrationError(diag);
    }
    res.theta = runs[best].x;
    res.chi2 = runs[best].objective;
    res.trace = runs[best].trace;
    res.params = prob.theta_to_params(res.theta);
    res.residuals = residual_grid(prob, res.params);
    return res;
}

// ---- result files ----------------------------------------------------------

inline void save_calibration_result(const CalibrationResult& r, std::ostream& out) {
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "name,value\n";
    out << "variant," << variant_name(r.variant) << "\n";
    out << "chi2," << fmt(r.chi2) << "\n";
    if (r.chi2_normalized) out << "chi2_normalized," << fmt(*r.chi2_normalized) << "\n";
    out << "n," << r.params.n << "\n";
    for (int i = 0; i < r.params.n; ++i) out << "lambda" << i + 1 << "," << fmt(r.params.lambda[i]) << "\n";
    for (int i = 0; i < r.params.n; ++i) out << "h" << i + 1 << "," << fmt(r.params.h[i]) << "\n";
    for (int i = 0; i < r.params.n; ++i) out << "eta" << i + 1 << "," << fmt(r.params.eta[i]) << "\n";
    out << "rho12," << fmt(r.params.rho(1, 0)) << "\n";
    out << "beta0," << fmt(r.params.beta0) << "\n";
    out << "beta1," << fmt(r.params.beta1) << "\n";
    out << "beta2," << fmt(r.params.beta2) << "\n";
    for (const auto& s : r.starts)
        out << "start" << s.start_index << "_objective," << fmt(s.objective) << "\n";
}

inline void save_calibration_result(const CalibrationResult& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    save_calibration_result(r, out);
}

inline void save_residual_grid(const std::vector<ResidualCell>& grid, std::ostream& out) {
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "expiry_years,tenor_years,float_tenor,market_premium,model_premium,price_rel_error,"
           "market_vol,model_vol,vol_error_bp\n";
    for (const auto& c : grid) {
        out << c.quote.expiry_years << "," << c.quote.tenor_years << "," << tenor_label(c.quote.float_tenor)
            << "," << fmt(c.market_premium) << "," << fmt(c.model_premium) << "," << fmt(c.price_rel_error)
            << ",";
        if (c.vol_ok)
            out << fmt(c.market_vol) << "," << fmt(c.model_vol) << "," << fmt(c.vol_error_bp);
        else
            out << "na,na,na";
        out << "\n";
    }
}

inline void save_residual_grid(const std::vector<ResidualCell>& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    save_residual_grid(grid, out);
}

inline std::vector<ResidualCell> load_residual_grid(std::istream& in) {
    std::vector<ResidualCell> out;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("residual grid: empty file");
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto f = detail::split_csv_row(line);
        if (f.size() != 9) throw std::runtime_error("residual grid: expected 9 fields");
        ResidualCell c;
        c.quote.expiry_years = std::stoi(f[0]);
        c.quote.tenor_years = std::stoi(f[1]);
        c.quote.float_tenor = tenor_from_label(f[2]);
        c.market_premium = std::stod(f[3]);
        c.model_premium = std::stod(f[4]);
        c.price_rel_error = std::stod(f[5]);
        if (f[6] == "na") {
            c.vol_ok = false;
        } else {
            c.market_vol = std::stod(f[6]);
            c.model_vol = std::stod(f[7]);
            c.vol_error_bp = std::stod(f[8]);
        }
        c.quote.premium = c.market_premium;
        out.push_back(c);
    }
    return out;
}

inline std::vector<ResidualCell> load_residual_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return load_residual_grid(in);
}

/// Reads chi2 (and variant) back from a result CSV, for --baseline handling.
inline std::pair<std::string, double> load_result_chi2(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string line, variant;
    double chi2 = -1.0;
    while (std::getline(in, line)) {
        const auto f = detail::split_csv_row(line);
        if (f.size() != 2) continue;
        if (f[0] == "variant") variant = f[1];
        if (f[0] == "chi2") chi2 = std::stod(f[1]);
    }
    if (chi2 < 0.0) throw std::runtime_error("no chi2 in '" + path + "'");
    return {variant, chi2};
}

} // namespace mchjm
