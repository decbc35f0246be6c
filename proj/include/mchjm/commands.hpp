#pragma once
/// Batch command implementations behind the CLI. Each command is a pure
/// function of its options; commands that write an output directory put
/// exactly one manifest there, and reruns with identical manifests produce
/// bit-identical outputs.
///
/// Exit code contract: 0 success, 1 usage error, 2 data error, 3 numerical
/// failure (the CLI main maps exceptions onto it).

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "mchjm/calibrate.hpp"
#include "mchjm/curves_io.hpp"
#include "mchjm/mc.hpp"
#include "mchjm/params_io.hpp"
#include "mchjm/reports.hpp"
#include "mchjm/version.hpp"

namespace mchjm {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_data = 2;
inline constexpr int exit_numerical = 3;

namespace detail {

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

struct RunManifest {
    std::string command;
    std::vector<std::string> inputs;
    std::uint64_t config_digest = 0;
    std::uint64_t seed = 0;
    std::string output_dir;

    void write(const std::filesystem::path& dir) const {
        std::ofstream out(dir / "manifest.txt");
        if (!out) throw std::runtime_error("cannot write manifest in '" + dir.string() + "'");
        out << "command," << command << "\n";
        for (const auto& i : inputs) out << "input," << i << "\n";
        out << "config_digest," << config_digest << "\n";
        out << "seed," << seed << "\n";
        out << "output_dir," << output_dir << "\n";
        out << "version," << version_string << "\n";
    }
};

// ---- curves ----------------------------------------------------------------

struct CurvesCmdOptions {
    std::string curves_path;
    MarketDate anchor = MarketDate::from_ymd(2010, 8, 12);
    std::vector<std::string> sample_dates;  // restrict output to these dates
};

inline int cmd_curves(const CurvesCmdOptions& o, std::ostream& out) {
    const CurveSet cs = load_curves(o.curves_path, o.anchor);
    const auto& dc = cs.discount();
    out << "anchor " << o.anchor.to_string() << "\n";

    if (!o.sample_dates.empty()) {
        out << "date,tau,zero,df,inst_fwd\n";
        for (const auto& ds : o.sample_dates) {
            const MarketDate d = MarketDate::parse(ds);
            const double t = dc.tau(d);
            out << ds << "," << detail::fmt17(t) << "," << detail::fmt17(dc.zero_rate(t)) << ","
                << detail::fmt17(dc.discount(t)) << "," << detail::fmt17(dc.inst_forward(t)) << "\n";
        }
        return exit_ok;
    }

    out << "eonia pillars: " << dc.pillar_times().size() << "\n";
    out << "tau,zero,df\n";
    for (std::size_t i = 0; i < dc.pillar_times().size(); ++i)
        out << detail::fmt17(dc.pillar_times()[i]) << "," << detail::fmt17(dc.zero_rates()[i]) << ","
            << detail::fmt17(dc.discount(dc.pillar_times()[i])) << "\n";
    for (const auto& [months, tc] : cs.tenor_curves()) {
        out << "tenor " << tenor_label(Tenor{months}) << " pillars: " << tc.pillar_times().size() << "\n";
        out << "tau,fwd\n";
        for (std::size_t i = 0; i < tc.pillar_times().size(); ++i)
            out << detail::fmt17(tc.pillar_times()[i]) << "," << detail::fmt17(tc.rates()[i]) << "\n";
    }
    // interpolated samples: E0 and F0 at standard maturities
    out << "samples: T_years,E0_3m,E0_6m";
    for (const auto& [months, tc] : cs.tenor_curves()) out << ",F0_" << tenor_label(Tenor{months});
    out << "\n";
    for (double T : {1.0, 2.0, 5.0, 10.0, 20.0, 30.0}) {
        out << T << "," << detail::fmt17(dc.ois_simple(T, 0.25)) << "," << detail::fmt17(dc.ois_simple(T, 0.5));
        for (const auto& [months, tc] : cs.tenor_curves()) out << "," << detail::fmt17(tc.forward(T));
        out << "\n";
    }
    return exit_ok;
}

// ---- price ------------------------------------------------------------------

struct PriceCmdOptions {
    std::string curves_path, params_path;
    MarketDate anchor = MarketDate::from_ymd(2010, 8, 12);
    int expiry_years = 1, tenor_years = 1;
    Tenor float_tenor{3};
    double strike = -1.0;  // <0 = ATM
    std::string variant = "wg2pp";
};

inline int cmd_price(const PriceCmdOptions& o, std::ostream& out, std::ostream& err) {
    const CurveSet market = load_curves(o.curves_path, o.anchor);
    WgParams params = load_params(o.params_path);
    const ModelVariant variant = variant_from_name(o.variant);
    if (!variant_has_eta(variant)) {
        for (double e : params.eta)
            if (e != 0.0) {
                err << "warning: eta parameters are ignored under variant '" << o.variant << "'\n";
                break;
            }
        params = restrict_params(params, variant);
    }
    const CurveSet cs = curves_for_variant(market, variant);
    const SwapSchedule sch = schedule_for_quote(market.anchor(), o.expiry_years, o.tenor_years, o.float_tenor);
    const SwaptionAnalytics a = swaption_price(params, cs, sch, o.strike);
    const double vol = implied_black_vol(a.price, a.par_rate, a.strike, 0.0, a.annuity, sch.expiry);
    out << "expiry_years,tenor_years,float_tenor,annuity,par_rate,psi,gamma,strike,price,implied_vol\n";
    out << o.expiry_years << "," << o.tenor_years << "," << tenor_label(o.float_tenor) << ","
        << detail::fmt17(a.annuity) << "," << detail::fmt17(a.par_rate) << "," << detail::fmt17(a.psi) << ","
        << detail::fmt17(a.gamma) << "," << detail::fmt17(a.strike) << "," << detail::fmt17(a.price) << ","
        << detail::fmt17(vol) << "\n";
    return exit_ok;
}

// ---- calibrate ---------------------------------------------------------------

struct CalibrateCmdOptions {
    std::string curves_path, swaptions_path, config_path, out_dir;
    MarketDate anchor = MarketDate::from_ymd(2010, 8, 12);
    std::string baseline_result;  // optional: calibration_result.csv of a baseline run
};

inline CalibrationSettings settings_from_config(const std::map<std::string, std::string>& kv) {
    CalibrationSettings s;
    if (kv.count("max_iters")) s.max_iters = std::stoi(kv.at("max_iters"));
    if (kv.count("tolerance")) s.tolerance = std::stod(kv.at("tolerance"));
    if (kv.count("multistart")) s.multistart = std::stoi(kv.at("multistart"));
    if (kv.count("seed")) s.seed = std::stoull(kv.at("seed"));
    if (kv.count("threads")) s.threads = std::stoi(kv.at("threads"));
    return s;
}

inline int cmd_calibrate(const CalibrateCmdOptions& o, std::ostream& out) {
    const CurveSet market = load_curves(o.curves_path, o.anchor);
    const auto quotes = load_swaption_quotes(o.swaptions_path);
    std::ifstream cfg_in(o.config_path);
    if (!cfg_in) throw CurveParseError("cannot open config '" + o.config_path + "'");
    const auto kv = read_keyvalue(cfg_in);
    if (!kv.count("variant")) throw ParamParseError(o.config_path + ": missing 'variant'");
    const ModelVariant variant = variant_from_name(kv.at("variant"));
    const CalibrationSettings settings = settings_from_config(kv);

    CalibrationProblem prob(market, quotes, variant, settings);
    std::vector<Eigen::VectorXd> extra;
    for (int i = 1;; ++i) {
        const auto it = kv.find("extra_start" + std::to_string(i));
        if (it == kv.end()) break;
        const auto v = detail::parse_array(it->second, it->first);
        if (static_cast<int>(v.size()) != prob.n_theta())
            throw ParamParseError(it->first + ": expected " + std::to_string(prob.n_theta()) + " values");
        extra.emplace_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    }

    CalibrationResult result = calibrate(prob, extra);
    if (!o.baseline_result.empty()) {
        const auto [bvariant, bchi2] = load_result_chi2(o.baseline_result);
        result.chi2_normalized = result.chi2 / bchi2;
        out << "chi2 " << detail::fmt17(result.chi2) << " normalized vs " << bvariant << " "
            << detail::fmt17(100.0 * *result.chi2_normalized) << "%\n";
    } else {
        out << "chi2 " << detail::fmt17(result.chi2) << "\n";
    }

    const std::filesystem::path dir(o.out_dir);
    std::filesystem::create_directories(dir);
    save_calibration_result(result, (dir / "calibration_result.csv").string());
    save_residual_grid(result.residuals, (dir / "residuals.csv").string());
    save_params(result.params, (dir / "params.txt").string());

    RunManifest m;
    m.command = "calibrate";
    m.inputs = {o.curves_path, o.swaptions_path, o.config_path};
    m.config_digest = detail::fnv1a(detail::file_bytes(o.config_path));
    m.seed = settings.seed;
    m.output_dir = o.out_dir;
    m.write(dir);
    return exit_ok;
}

// ---- simulate ----------------------------------------------------------------

struct SimulateCmdOptions {
    std::string curves_path, params_path, out_dir;
    MarketDate anchor = MarketDate::from_ymd(2010, 8, 12);
    std::vector<std::string> checks;  // "bond:T", "fwd:T:x"; empty = default suite
    std::size_t paths = 100000;
    double grid_step = 1.0 / 12.0;
    std::uint64_t seed = 42;
    double threshold = 3.0;
    bool negative_control = false;  // drop the drift adjustment; expect failure
    bool antithetic = false;
    int threads = 1;
    std::string dump_states;  // optional binary dump path
};

inline int cmd_simulate(const SimulateCmdOptions& o, std::ostream& out) {
    const CurveSet cs = load_curves(o.curves_path, o.anchor);
    const WgParams params = load_params(o.params_path);

    std::vector<std::string> checks = o.checks;
    if (checks.empty())
        checks = {"bond:1", "bond:2", "bond:5", "bond:10", "fwd:2:6M", "fwd:5:6M", "fwd:2:3M"};

    std::vector<StatReport> reports;
    PathSet last_paths;
    for (const auto& spec : checks) {
        std::stringstream ss(spec);
        std::string kind, a, b;
        std::getline(ss, kind, ':');
        std::getline(ss, a, ':');
        std::getline(ss, b, ':');
        if (kind != "bond" && kind != "fwd")
            throw std::invalid_argument("unknown check '" + spec + "' (bond:T or fwd:T:x)");
        const double T = std::stod(a);
        PathConfig cfg;
        cfg.paths = o.paths;
        cfg.seed = o.seed;
        cfg.antithetic = o.antithetic;
        cfg.threads = o.threads;
        cfg.grid = PathConfig::uniform_grid(T, o.grid_step);
        if (kind == "bond") {
            reports.push_back(check_bond_martingale(params, cs, cfg, T));
        } else {
            if (b.empty()) throw std::invalid_argument("check '" + spec + "': missing tenor");
            const Tenor x = tenor_from_label(b);
            // grid must contain T - x exactly
            cfg.grid = PathConfig::uniform_grid(T - x.years(), o.grid_step);
            cfg.drift_adjustment = !o.negative_control;
            reports.push_back(check_forward_martingale(params, cs, cfg, T, x));
        }
    }

    if (!o.dump_states.empty()) {
        PathConfig cfg;
        cfg.paths = o.paths;
        cfg.seed = o.seed;
        cfg.antithetic = o.antithetic;
        cfg.threads = o.threads;
        cfg.grid = PathConfig::uniform_grid(1.0, o.grid_step);
        cfg.observe = {cfg.grid.back()};
        dump_terminal_states(simulate(params, cs.discount(), cfg), o.dump_states);
    }

    out << "check,estimate,target,std_error,z\n";
    bool all_pass = true;
    std::string failing;
    for (const auto& r : reports) {
        out << r.name << "," << detail::fmt17(r.estimate) << "," << detail::fmt17(r.target) << ","
            << detail::fmt17(r.std_error) << "," << detail::fmt17(r.z) << "\n";
        if (!r.pass(o.threshold)) {
            all_pass = false;
            if (failing.empty()) failing = r.name;
        }
    }

    if (!o.out_dir.empty()) {
        const std::filesystem::path dir(o.out_dir);
        std::filesystem::create_directories(dir);
        {
            std::ofstream z(dir / "zscores.csv");
            z << "check,estimate,target,std_error,z\n";
            for (const auto& r : reports)
                z << r.name << "," << detail::fmt17(r.estimate) << "," << detail::fmt17(r.target) << ","
                  << detail::fmt17(r.std_error) << "," << detail::fmt17(r.z) << "\n";
        }
        RunManifest m;
        m.command = "simulate";
        m.inputs = {o.curves_path, o.params_path};
        std::string cfgs;
        for (const auto& c : checks) cfgs += c + ";";
        cfgs += "paths=" + std::to_string(o.paths) + ";step=" + detail::fmt17(o.grid_step) +
                ";neg=" + std::to_string(o.negative_control) + ";anti=" + std::to_string(o.antithetic) +
                ";threshold=" + detail::fmt17(o.threshold);
        m.config_digest = detail::fnv1a(cfgs);
        m.seed = o.seed;
        m.output_dir = o.out_dir;
        m.write(dir);
    }

    if (o.negative_control) {
        // expected-failure mode inverts the exit logic
        if (all_pass) {
            out << "negative control unexpectedly passed\n";
            return exit_numerical;
        }
        out << "negative control failed as expected (" << failing << ")\n";
        return exit_ok;
    }
    if (!all_pass) {
        out << "check failed: " << failing << "\n";
        return exit_numerical;
    }
    return exit_ok;
}

// ---- report ------------------------------------------------------------------

struct ReportCmdOptions {
    std::string curves_path, out_dir;
    MarketDate anchor = MarketDate::from_ymd(2010, 8, 12);
    std::vector<std::string> run_dirs;  // completed calibration runs
};

inline int cmd_report(const ReportCmdOptions& o, std::ostream& out) {
    if (o.run_dirs.empty()) throw std::invalid_argument("report: no run directories given");
    const CurveSet market = load_curves(o.curves_path, o.anchor);
    const std::filesystem::path dir(o.out_dir);
    std::filesystem::create_directories(dir);

    const std::vector<int> expiries{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20};
    const std::vector<int> tenors{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20};

    std::uint64_t digest = 1469598103934665603ULL;
    std::vector<std::string> inputs{o.curves_path};
    for (const auto& rd : o.run_dirs) {
        const std::filesystem::path run(rd);
        if (!std::filesystem::exists(run / "calibration_result.csv"))
            throw std::runtime_error("missing run: no calibration_result.csv in '" + rd + "'");
        const auto [vname, chi2] = load_result_chi2((run / "calibration_result.csv").string());
        (void)chi2;
        const ModelVariant variant = variant_from_name(vname);
        const WgParams params = load_params((run / "params.txt").string());
        const auto surface = vol_surface_report(params, market, variant, expiries, tenors);
        save_vol_surface(surface, (dir / ("volsurface_" + vname + ".csv")).string());
        const auto residuals = load_residual_grid((run / "residuals.csv").string());
        save_residual_heatmap(residuals, (dir / ("residual_heatmap_" + vname + ".csv")).string());
        digest = detail::fnv1a(rd, digest);
        inputs.push_back(rd);
        out << "reported " << vname << "\n";
    }

    RunManifest m;
    m.command = "report";
    m.inputs = inputs;
    m.config_digest = digest;
    m.seed = 0;
    m.output_dir = o.out_dir;
    m.write(dir);
    return exit_ok;
}

} // namespace mchjm
