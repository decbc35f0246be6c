#include <catch2/catch_amalgamated.hpp>

#include "mchjm/curves_io.hpp"
#include "oracle_utils.hpp"

#include <random>
#include <sstream>

using namespace mchjm;

namespace {

const MarketDate kAnchor = MarketDate::from_ymd(2010, 8, 12);

CurveSet bundled() {
    return load_curves(std::string(MCHJM_DATA_DIR) + "/curves.csv", kAnchor);
}

DiscountCurve flat_curve(double r, double horizon = 40.0) {
    return DiscountCurve(kAnchor, std::vector<double>{horizon}, std::vector<double>{r});
}

} // namespace

TEST_CASE("bundled dataset loads with the full pillar grid") {
    const CurveSet cs = bundled();
    REQUIRE(cs.discount().pillar_times().size() == 30);
    REQUIRE(cs.tenor_curves().size() == 2);
    REQUIRE(cs.tenor_curve(Tenor{3}).pillar_times().size() == 29);
    REQUIRE(cs.tenor_curve(Tenor{6}).pillar_times().size() == 29);

    // pillar queries reproduce the tabulated rates bit-exactly
    REQUIRE(cs.discount().zero_rate(MarketDate::from_ymd(2010, 8, 13)) == 0.004770);
    REQUIRE(cs.discount().zero_rate(MarketDate::from_ymd(2011, 8, 16)) == 0.006357);
    REQUIRE(cs.discount().zero_rate(MarketDate::from_ymd(2060, 8, 16)) == 0.024562);
    REQUIRE(cs.tenor_curve(Tenor{3}).forward(MarketDate::from_ymd(2011, 8, 16)) == 0.010829);
    REQUIRE(cs.tenor_curve(Tenor{6}).forward(MarketDate::from_ymd(2011, 8, 16)) == 0.012827);
    REQUIRE(cs.tenor_curve(Tenor{6}).forward(MarketDate::from_ymd(2012, 8, 16)) == 0.016889);
}

TEST_CASE("discount factor basics") {
    const CurveSet cs = bundled();
    const auto& dc = cs.discount();
    REQUIRE(dc.discount(0.0) == 1.0);
    REQUIRE(dc.discount(kAnchor) == 1.0);
    // P0(16-Aug-11) = exp(-0.006357 * tau)
    const double tau = year_fraction(kAnchor, MarketDate::from_ymd(2011, 8, 16));
    REQUIRE(dc.discount(MarketDate::from_ymd(2011, 8, 16)) ==
            Catch::Approx(std::exp(-0.006357 * tau)).epsilon(1e-15));
    // mid-pillar value bracketed by neighbours
    const double t1 = dc.pillar_times()[13], t2 = dc.pillar_times()[14];
    const double mid = 0.5 * (t1 + t2);
    REQUIRE(dc.discount(mid) <= dc.discount(t1));
    REQUIRE(dc.discount(mid) >= dc.discount(t2));
    REQUIRE_THROWS_AS(dc.discount(-0.5), std::domain_error);
}

TEST_CASE("flat curve has constant instantaneous forward") {
    const DiscountCurve dc = flat_curve(0.03);
    for (double t : {0.0, 0.5, 1.0, 7.3, 39.0, 55.0}) REQUIRE(dc.inst_forward(t) == Catch::Approx(0.03));
    REQUIRE_THROWS_AS(dc.inst_forward(MarketDate::from_ymd(2010, 8, 12)), std::domain_error);
}

TEST_CASE("instantaneous forward agrees with finite differences of -log P") {
    const auto& dc = bundled().discount();
    for (std::size_t i = 5; i + 1 < dc.pillar_times().size(); i += 3) {
        const double t = 0.5 * (dc.pillar_times()[i] + dc.pillar_times()[i + 1]);
        const double h = 1e-5 * (dc.pillar_times()[i + 1] - dc.pillar_times()[i]);
        const double fd = oracle::cdiff([&](double u) { return dc.log_discount(u); }, t, h);
        REQUIRE(dc.inst_forward(t) == Catch::Approx(fd).epsilon(1e-8));
    }
}

TEST_CASE("forward integrates back to the discount factor") {
    const auto& dc = bundled().discount();
    for (double T : {0.7, 3.2, 11.0, 28.0}) {
        // integrate the piecewise-constant forward pillar interval by interval
        double acc = 0.0;
        double lo = 0.0;
        for (double p : dc.pillar_times()) {
            const double hi = std::min(p, T);
            if (hi > lo) acc += oracle::integrate([&](double u) { return dc.inst_forward(u); }, lo, hi, 1e-14);
            lo = hi;
            if (lo >= T) break;
        }
        if (lo < T) acc += oracle::integrate([&](double u) { return dc.inst_forward(u); }, lo, T, 1e-14);
        REQUIRE(std::exp(-acc) == Catch::Approx(dc.discount(T)).epsilon(1e-10));
    }
}

TEST_CASE("OIS simple rate") {
    const auto& dc = bundled().discount();
    SECTION("flat unit discount gives zero rate") {
        const DiscountCurve flat0 = flat_curve(0.0);
        REQUIRE(flat0.ois_simple(2.0, 0.5) == Catch::Approx(0.0).margin(1e-16));
    }
    SECTION("definition identity to machine precision") {
        for (double T : {1.0, 2.0, 5.0, 17.0}) {
            for (double x : {0.25, 0.5, 1.0}) {
                const double e = dc.ois_simple(T, x);
                REQUIRE(1.0 + x * e ==
                        Catch::Approx(dc.discount(T - x) / dc.discount(T)).epsilon(1e-14));
            }
        }
    }
    SECTION("Table 1: one-year OIS rate below the 6m Euribor forward at 16-Aug-12") {
        const CurveSet cs = bundled();
        const double e = dc.ois_simple(MarketDate::from_ymd(2012, 8, 16), 1.0);
        REQUIRE(e > 0.0);
        REQUIRE(e < 0.016889);
    }
    SECTION("small-tenor limit approaches the instantaneous forward") {
        const double T = 3.1;
        double prev_gap = 1e9;
        for (double x : {1e-2, 1e-3, 1e-4}) {
            const double gap = std::abs(dc.ois_simple(T, x) - dc.inst_forward(T));
            REQUIRE(gap < prev_gap);
            REQUIRE(x * dc.ois_simple(T, x) < 1e-3);
            prev_gap = gap;
        }
        REQUIRE(prev_gap < 1e-5);
    }
    REQUIRE_THROWS_AS(dc.ois_simple(0.2, 0.5), std::domain_error);
}

TEST_CASE("forward curve interpolation is continuous and exact at nodes") {
    const CurveSet cs = bundled();
    const auto& tc = cs.tenor_curve(Tenor{3});
    for (std::size_t i = 0; i < tc.pillar_times().size(); ++i)
        REQUIRE(tc.forward(tc.pillar_times()[i]) == tc.rates()[i]);
    // continuity across a pillar
    const double p = tc.pillar_times()[10];
    REQUIRE(tc.forward(p - 1e-9) == Catch::Approx(tc.forward(p + 1e-9)).margin(1e-8));
    // flat extrapolation
    REQUIRE(tc.forward(0.0) == tc.rates().front());
    REQUIRE(tc.forward(90.0) == tc.rates().back());
}

TEST_CASE("discount factors are non-increasing when forwards are non-negative") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> fdist(0.0, 0.08), dt(0.2, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        // build a curve from non-negative forwards (zero rates then non-negative)
        std::vector<double> taus, zeros;
        double t = 0.0, y = 0.0;
        for (int i = 0; i < 12; ++i) {
            const double step = dt(rng);
            y += fdist(rng) * step;
            t += step;
            taus.push_back(t);
            zeros.push_back(y / t);
        }
        const DiscountCurve dc(kAnchor, taus, zeros);
        double prev = 1.0;
        for (double u = 0.05; u < t + 5.0; u += 0.173) {
            const double p = dc.discount(u);
            REQUIRE(p > 0.0);
            REQUIRE(p <= prev + 1e-15);
            prev = p;
        }
    }
    // and on the bundled Table 1 data
    const auto& dc = bundled().discount();
    double prev = 1.0;
    for (double u = 0.01; u < 55.0; u += 0.07) {
        REQUIRE(dc.discount(u) <= prev + 1e-15);
        prev = dc.discount(u);
    }
}

TEST_CASE("single-pillar curve is valid with flat extrapolation") {
    std::istringstream in("date,kind,tenor,rate\n2011-08-12,zero,,0.02\n");
    const CurveSet cs = load_curves(in, kAnchor);
    REQUIRE(cs.discount().zero_rate(0.3) == 0.02);
    REQUIRE(cs.discount().zero_rate(10.0) == 0.02);
}

TEST_CASE("curve CSV parse errors name the offending row") {
    auto expect_error = [](const std::string& text, const std::string& needle) {
        std::istringstream in(text);
        try {
            load_curves(in, kAnchor);
            FAIL("expected CurveParseError");
        } catch (const CurveParseError& e) {
            REQUIRE(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_error("", "empty");
    expect_error("date,kind\n", "header");
    expect_error("date,kind,tenor,rate\n2011-01-01,zero,,abc\n", "row 2");
    expect_error("date,kind,tenor,rate\n2011-01-01,zero,,0.01\n2010-12-01,zero,,0.01\n", "row 3");
    expect_error("date,kind,tenor,rate\n2011-01-01,zero,,0.01\n2011-01-01,zero,,0.01\n", "row 3");
    expect_error("date,kind,tenor,rate\n2011-01-01,spot,,0.01\n", "kind");
    expect_error("date,kind,tenor,rate\n2011-01-01,fwd,Q3,0.01\n", "row 2");
    expect_error("date,kind,tenor,rate\n2011-01-01,zero,3M,0.01\n", "empty tenor");
    REQUIRE_THROWS_AS(load_curves("/nonexistent/file.csv", kAnchor), CurveParseError);
}

TEST_CASE("save/load round-trips rate values bit-exactly") {
    const CurveSet cs = bundled();
    std::ostringstream out;
    save_curves(cs, out);
    std::istringstream in(out.str());
    const CurveSet cs2 = load_curves(in, kAnchor);
    REQUIRE(cs2.discount().zero_rates() == cs.discount().zero_rates());
    REQUIRE(cs2.discount().pillar_times() == cs.discount().pillar_times());
    REQUIRE(cs2.tenor_curve(Tenor{3}).rates() == cs.tenor_curve(Tenor{3}).rates());
    REQUIRE(cs2.tenor_curve(Tenor{6}).rates() == cs.tenor_curve(Tenor{6}).rates());
}

TEST_CASE("curve set rejects mismatched anchors and unknown tenors") {
    CurveSet cs = bundled();
    REQUIRE_THROWS_AS(cs.tenor_curve(Tenor{12}), std::out_of_range);
    REQUIRE_THROWS_AS(
        cs.add(TenorCurve(MarketDate::from_ymd(2011, 1, 1), Tenor{12}, std::vector<double>{1.0}, {0.02})),
        std::invalid_argument);
    REQUIRE(cs.has_tenor(Tenor{3}));
    REQUIRE(!cs.has_tenor(Tenor{12}));
}
