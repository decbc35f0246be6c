// Batch CLI over the library: curve inspection, analytic pricing,
// calibration, Monte Carlo validation, report emission.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <CLI11.hpp>
#include <iostream>

#include "mchjm/commands.hpp"

namespace {

mchjm::MarketDate parse_anchor(const std::string& s) {
    return mchjm::MarketDate::parse(s);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-curve HJM pricing and calibration engine"};
    app.require_subcommand(1);

    std::string anchor_str = "2010-08-12";
    app.add_option("--anchor", anchor_str, "curve anchor date (YYYY-MM-DD)")->capture_default_str();

    // curves
    auto* curves = app.add_subcommand("curves", "load a curves CSV and print a summary");
    mchjm::CurvesCmdOptions co;
    curves->add_option("curves", co.curves_path, "curves.csv")->required();
    curves->add_option("--sample-dates", co.sample_dates, "print values at these dates only");

    // price
    auto* price = app.add_subcommand("price", "price one swaption analytically");
    mchjm::PriceCmdOptions po;
    std::string float_label = "6M";
    price->add_option("curves", po.curves_path, "curves.csv")->required();
    price->add_option("params", po.params_path, "parameter file")->required();
    price->add_option("--expiry", po.expiry_years, "expiry in years")->required();
    price->add_option("--tenor", po.tenor_years, "swap tenor in years")->required();
    price->add_option("--float-tenor", float_label, "floating tenor (3M|6M)")->capture_default_str();
    price->add_option("--strike", po.strike, "strike (omit for ATM)");
    price->add_option("--variant", po.variant, "wg2pp|mmg|g2pp")->capture_default_str();

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "fit model parameters to a swaption grid");
    mchjm::CalibrateCmdOptions lo;
    cal->add_option("curves", lo.curves_path, "curves.csv")->required();
    cal->add_option("swaptions", lo.swaptions_path, "swaptions.csv")->required();
    cal->add_option("config", lo.config_path, "calibration config (key = value)")->required();
    cal->add_option("--out", lo.out_dir, "output directory")->required();
    cal->add_option("--baseline", lo.baseline_result, "baseline calibration_result.csv for normalized chi2");

    // simulate
    auto* sim = app.add_subcommand("simulate", "run Monte Carlo no-arbitrage checks");
    mchjm::SimulateCmdOptions so;
    sim->add_option("curves", so.curves_path, "curves.csv")->required();
    sim->add_option("params", so.params_path, "parameter file")->required();
    sim->add_option("--check", so.checks, "bond:T or fwd:T:x (repeatable; default suite otherwise)");
    sim->add_option("--paths", so.paths, "path count")->capture_default_str();
    sim->add_option("--grid-step", so.grid_step, "time step in years")->capture_default_str();
    sim->add_option("--seed", so.seed, "RNG seed")->capture_default_str();
    sim->add_option("--threshold", so.threshold, "|z| pass threshold")->capture_default_str();
    sim->add_option("--threads", so.threads, "worker threads (0 = hardware)")->capture_default_str();
    sim->add_flag("--antithetic", so.antithetic, "antithetic variates");
    sim->add_flag("--negative-control", so.negative_control,
                  "drop the measure-change drift; the run must fail and the exit logic inverts");
    sim->add_option("--out", so.out_dir, "output directory for zscores.csv + manifest");
    sim->add_option("--dump-states", so.dump_states, "binary dump of terminal states");

    // report
    auto* rep = app.add_subcommand("report", "emit figure-data CSVs from calibration runs");
    mchjm::ReportCmdOptions ro;
    rep->add_option("curves", ro.curves_path, "curves.csv")->required();
    rep->add_option("--run", ro.run_dirs, "calibration run directory (repeatable)")->required();
    rep->add_option("--out", ro.out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return mchjm::exit_usage;
    }

    try {
        const mchjm::MarketDate anchor = parse_anchor(anchor_str);
        co.anchor = po.anchor = lo.anchor = so.anchor = ro.anchor = anchor;
        if (*curves) return mchjm::cmd_curves(co, std::cout);
        if (*price) {
            po.float_tenor = mchjm::tenor_from_label(float_label);
            return mchjm::cmd_price(po, std::cout, std::cerr);
        }
        if (*cal) return mchjm::cmd_calibrate(lo, std::cout);
        if (*sim) return mchjm::cmd_simulate(so, std::cout);
        if (*rep) return mchjm::cmd_report(ro, std::cout);
    } catch (const mchjm::CurveParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return mchjm::exit_data;
    } catch (const mchjm::ParamParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return mchjm::exit_data;
    } catch (const mchjm::CalibrationError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return mchjm::exit_numerical;
    } catch (const mchjm::ImpliedVolError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return mchjm::exit_numerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return mchjm::exit_usage;
    } catch (const std::domain_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return mchjm::exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return mchjm::exit_data;
    }
    return mchjm::exit_usage;
}
