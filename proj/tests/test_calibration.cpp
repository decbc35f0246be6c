#include <catch2/catch_amalgamated.hpp>

#include "mchjm/calibrate.hpp"

#include <filesystem>
#include "mchjm/curves_io.hpp"

#include <random>
#include <sstream>

using namespace mchjm;

namespace {

const MarketDate kAnchor = MarketDate::from_ymd(2010, 8, 12);

CurveSet bundled() {
    return load_curves(std::string(MCHJM_DATA_DIR) + "/curves.csv", kAnchor);
}

std::vector<SwaptionQuote> bundled_quotes() {
    return load_swaption_quotes(std::string(MCHJM_DATA_DIR) + "/swaptions.csv");
}

WgParams table3(ModelVariant v) {
    switch (v) {
        case ModelVariant::WG2PP:
            return WgParams::two_factor(0.0073, 4.7344, 0.0059, 0.0411, 0.1581, 0.8894, -0.8577,
                                        1.3160, 1.3327, 0.5900);
        case ModelVariant::MMG:
            return WgParams::two_factor(0.0090, 5.0077, 0.0057, 0.0318, 0.0, 0.0, -0.8396, 1.2811,
                                        1.3109, 0.6059);
        case ModelVariant::G2PP:
            return WgParams::two_factor(0.0008, 0.0036, 0.0132, 0.0162, 0.0, 0.0, -0.9488, 1.0976,
                                        1.5277, 0.4928);
    }
    throw std::logic_error("unreachable");
}

// synthetic quote grid generated by a known parameter vector
std::vector<SwaptionQuote> synthetic_quotes(const CurveSet& market, const WgParams& truth) {
    std::vector<SwaptionQuote> quotes;
    for (int e : {1, 2, 3, 5, 7, 10, 15, 20})
        for (int t : {1, 2, 5, 10, 20}) {
            SwaptionQuote q;
            q.expiry_years = e;
            q.tenor_years = t;
            q.float_tenor = Tenor{t == 1 ? 3 : 6};
            const auto sch = schedule_for_quote(market.anchor(), e, t, q.float_tenor);
            q.premium = swaption_price(truth, market, sch).price;
            quotes.push_back(q);
        }
    return quotes;
}

} // namespace

TEST_CASE("variant restrictions and curves") {
    const CurveSet market = bundled();
    SECTION("eta is zeroed for the benchmarks") {
        const WgParams p = table3(ModelVariant::WG2PP);
        for (ModelVariant v : {ModelVariant::MMG, ModelVariant::G2PP}) {
            const WgParams r = restrict_params(p, v);
            REQUIRE(r.eta == std::vector<double>{0.0, 0.0});
        }
        REQUIRE(restrict_params(p, ModelVariant::WG2PP).eta == p.eta);
    }
    SECTION("single curve compounds the 6m forwards") {
        const CurveSet sc = single_curve_from_6m(market);
        REQUIRE(sc.single_curve());
        const auto& dc = sc.discount();
        // by construction 1 + 0.5 F6(t) == P(t-0.5)/P(t) on the semiannual grid
        for (double t : {1.0, 2.5, 10.0, 30.0}) {
            const double f6 = market.tenor_curve(Tenor{6}).forward(t);
            REQUIRE(dc.discount(t - 0.5) / dc.discount(t) ==
                    Catch::Approx(1.0 + 0.5 * f6).epsilon(1e-12));
        }
        // forwards of any tenor come from the curve itself
        REQUIRE(sc.forward(5.0, Tenor{3}) == Catch::Approx(dc.ois_simple(5.0, 0.25)));
        REQUIRE(sc.forward(5.0, Tenor{6}) == Catch::Approx(dc.ois_simple(5.0, 0.5)));
    }
    SECTION("restriction sets are nested: an MMG point is a WG2++ point") {
        const CalibrationProblem wg(market, bundled_quotes(), ModelVariant::WG2PP);
        const CalibrationProblem mmg(market, bundled_quotes(), ModelVariant::MMG);
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> u01(0.1, 0.9);
        for (int trial = 0; trial < 3; ++trial) {
            Eigen::VectorXd th8(8);
            th8 << 0.01 * u01(rng), std::log(1.0 + u01(rng)), 0.01 * u01(rng), 0.03 * u01(rng),
                -u01(rng), 1.0 + u01(rng), u01(rng), 0.5 + u01(rng);
            Eigen::VectorXd th10(10);
            th10 << th8(0), th8(1), th8(2), th8(3), 0.0, 0.0, th8(4), th8(5), th8(6), th8(7);
            REQUIRE(wg.objective(th10) == mmg.objective(th8));
        }
    }
}

TEST_CASE("objective properties") {
    const CurveSet market = bundled();
    SECTION("exact pricing gives zero objective") {
        const WgParams truth = table3(ModelVariant::WG2PP);
        const auto quotes = synthetic_quotes(market, truth);
        const CalibrationProblem prob(market, quotes, ModelVariant::WG2PP);
        REQUIRE(prob.objective(prob.params_to_theta(truth)) < 1e-24);
    }
    SECTION("doubling the residuals quadruples the objective") {
        const WgParams truth = table3(ModelVariant::WG2PP);
        auto q1 = synthetic_quotes(market, truth);
        auto q2 = q1;
        for (auto& q : q1) q.premium *= 1.01;
        for (auto& q : q2) q.premium *= 1.02;
        const CalibrationProblem p1(market, q1, ModelVariant::WG2PP);
        const CalibrationProblem p2(market, q2, ModelVariant::WG2PP);
        const Eigen::VectorXd th = p1.params_to_theta(truth);
        // residual of the scaled grid: (pi - (1+s) pi)/((1+s) pi) = -s/(1+s)
        const double r1 = 0.01 / 1.01, r2 = 0.02 / 1.02;
        REQUIRE(p2.objective(th) / p1.objective(th) ==
                Catch::Approx((r2 * r2) / (r1 * r1)).epsilon(1e-10));
    }
    SECTION("objective is invariant under quote permutation") {
        auto quotes = bundled_quotes();
        const CalibrationProblem a(bundled(), quotes, ModelVariant::MMG);
        std::reverse(quotes.begin(), quotes.end());
        const CalibrationProblem b(bundled(), quotes, ModelVariant::MMG);
        const Eigen::VectorXd th = a.params_to_theta(table3(ModelVariant::MMG));
        REQUIRE(a.objective(th) == Catch::Approx(b.objective(th)).epsilon(1e-15));
    }
    SECTION("Table 3 parameter sets: finite, positive, WG below the G2 baseline") {
        const CalibrationProblem wg(market, bundled_quotes(), ModelVariant::WG2PP);
        const CalibrationProblem g2(market, bundled_quotes(), ModelVariant::G2PP);
        const double ow = wg.objective(wg.params_to_theta(table3(ModelVariant::WG2PP)));
        const double og = g2.objective(g2.params_to_theta(table3(ModelVariant::G2PP)));
        REQUIRE(std::isfinite(ow));
        REQUIRE(ow > 0.0);
        REQUIRE(og > ow);
    }
    SECTION("theta packing round-trips and enforces the ordering") {
        const CalibrationProblem prob(market, bundled_quotes(), ModelVariant::WG2PP);
        const WgParams p = table3(ModelVariant::WG2PP);
        const Eigen::VectorXd th = prob.params_to_theta(p);
        const WgParams q = prob.theta_to_params(th);
        REQUIRE(q.lambda[0] == Catch::Approx(p.lambda[0]).epsilon(1e-12));
        REQUIRE(q.lambda[1] == Catch::Approx(p.lambda[1]).epsilon(1e-12));
        REQUIRE(q.lambda[1] > q.lambda[0]);
        REQUIRE(q.rho(1, 0) == Catch::Approx(p.rho(1, 0)));
    }
}

TEST_CASE("levmar on a quadratic bowl") {
    const ResidualFn f = [](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(3);
        r << x(0) - 1.0, 2.0 * (x(1) + 0.5), x(0) * x(1) + 0.5;
        return r;
    };
    Eigen::VectorXd x0(2), lo(2), hi(2);
    x0 << 3.0, 3.0;
    lo << -10.0, -10.0;
    hi << 10.0, 10.0;
    const auto res = levmar_box(f, x0, lo, hi);
    REQUIRE(res.objective < 1e-16);
    REQUIRE(res.x(0) == Catch::Approx(1.0).margin(1e-7));
    REQUIRE(res.x(1) == Catch::Approx(-0.5).margin(1e-7));

    SECTION("bounded solution clamps to the box") {
        Eigen::VectorXd tlo(2), thi(2);
        tlo << 2.0, -10.0;
        thi << 10.0, 10.0;
        const auto r2 = levmar_box(f, x0, tlo, thi);
        REQUIRE(r2.x(0) == 2.0);
    }
    SECTION("zero iterations returns the start") {
        LevMarOptions opts;
        opts.max_iters = 0;
        const auto r3 = levmar_box(f, x0, lo, hi, opts);
        REQUIRE(r3.x == x0);
        REQUIRE(r3.objective == Catch::Approx(f(x0).squaredNorm()));
        REQUIRE(r3.iterations == 0);
    }
}

TEST_CASE("calibration on a small synthetic problem is deterministic") {
    const CurveSet market = bundled();
    const WgParams truth = table3(ModelVariant::MMG);
    const auto quotes = synthetic_quotes(market, truth);
    CalibrationSettings settings;
    settings.max_iters = 25;
    settings.multistart = 2;
    const CalibrationProblem prob(market, quotes, ModelVariant::MMG, settings);
    const CalibrationResult a = calibrate(prob);
    const CalibrationResult b = calibrate(prob);
    REQUIRE(a.chi2 == b.chi2);
    REQUIRE(a.theta == b.theta);
    REQUIRE(a.chi2 < prob.objective(multistart_grid(prob)[0]));
    REQUIRE(a.starts.size() == 2);

    SECTION("threaded multistart matches sequential") {
        CalibrationSettings s2 = settings;
        s2.threads = 2;
        const CalibrationProblem prob2(market, quotes, ModelVariant::MMG, s2);
        const CalibrationResult c = calibrate(prob2);
        REQUIRE(c.chi2 == a.chi2);
        REQUIRE(c.theta == a.theta);
    }
}

TEST_CASE("residual grids and exports") {
    const CurveSet market = bundled();
    const CalibrationProblem prob(market, bundled_quotes(), ModelVariant::WG2PP);
    const WgParams p = table3(ModelVariant::WG2PP);
    const auto grid = residual_grid(prob, p);
    REQUIRE(grid.size() == 144);
    SECTION("perfect fit gives an all-zero grid") {
        const auto quotes = synthetic_quotes(market, p);
        const CalibrationProblem ps(market, quotes, ModelVariant::WG2PP);
        for (const auto& c : residual_grid(ps, p)) {
            REQUIRE(std::abs(c.price_rel_error) < 1e-12);
            REQUIRE(std::abs(c.vol_error_bp) < 1e-6);
        }
    }
    SECTION("round-trips through CSV bit-exactly") {
        std::ostringstream out;
        save_residual_grid(grid, out);
        std::istringstream in(out.str());
        const auto grid2 = load_residual_grid(in);
        REQUIRE(grid2.size() == grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            REQUIRE(grid2[i].quote.expiry_years == grid[i].quote.expiry_years);
            REQUIRE(grid2[i].market_premium == grid[i].market_premium);
            REQUIRE(grid2[i].model_premium == grid[i].model_premium);
            REQUIRE(grid2[i].price_rel_error == grid[i].price_rel_error);
            REQUIRE(grid2[i].vol_error_bp == grid[i].vol_error_bp);
        }
    }
    SECTION("result CSV keeps chi2") {
        CalibrationResult r;
        r.variant = ModelVariant::MMG;
        r.params = table3(ModelVariant::MMG);
        r.chi2 = 0.123456789012345;
        std::ostringstream out;
        save_calibration_result(r, out);
        const auto tmp = std::filesystem::temp_directory_path() / "mchjm_result.csv";
        {
            std::ofstream f(tmp);
            f << out.str();
        }
        const auto [v, chi2] = load_result_chi2(tmp.string());
        REQUIRE(v == "mmg");
        REQUIRE(chi2 == r.chi2);
        std::filesystem::remove(tmp);
    }
}

TEST_CASE("fewer quotes than parameters is rejected") {
    const CurveSet market = bundled();
    std::vector<SwaptionQuote> few(bundled_quotes().begin(), bundled_quotes().begin() + 4);
    REQUIRE_THROWS_AS(CalibrationProblem(market, few, ModelVariant::WG2PP), std::invalid_argument);
}
