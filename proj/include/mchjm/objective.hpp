#pragma once
/// Calibration problem: quote grid, variant restrictions, parameter packing
/// with the ordering constraint lambda2 = lambda1 + e^u, and the least-squares
/// objective sum_cells w * ((Pi_model - Pi_mkt)/Pi_mkt)^2.
///
/// Strikes are fixed once from the *market* curve set (the quotes are
/// at-the-money against market par rates); each variant then prices those
/// strikes with its own curves, which is what handicaps the single-curve
/// benchmark.

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "mchjm/quotes.hpp"
#include "mchjm/swaption.hpp"
#include "mchjm/variant.hpp"

namespace mchjm {

struct CalibrationSettings {
    int max_iters = 200;
    double tolerance = 1e-12;
    int multistart = 8;        // first k points of the documented seed grid
    std::uint64_t seed = 1;    // recorded in outputs; the seed grid itself is fixed
    int threads = 1;
};

/// Box bounds in packed-theta space.
struct ThetaBounds {
    Eigen::VectorXd lo, hi;
};

/// Static per-cell pricing data (theta-independent).
struct CellStatics {
    SwapSchedule schedule;
    double annuity = 0.0;
    double par_rate = 0.0;
    double psi = 0.0;
    std::vector<double> delta;
    double strike = 0.0;  // market ATM strike
    double market_premium = 0.0;
    double weight = 1.0;
};

class CalibrationProblem {
public:
    CalibrationProblem(CurveSet market, std::vector<SwaptionQuote> quotes, ModelVariant variant,
                       CalibrationSettings settings = {}, std::vector<double> weights = {})
        : market_(std::move(market)),
          quotes_(std::move(quotes)),
          variant_(variant),
          settings_(settings) {
        if (quotes_.empty()) throw std::invalid_argument("CalibrationProblem: no quotes");
        if (weights.empty()) weights.assign(quotes_.size(), 1.0);
        if (weights.size() != quotes_.size())
            throw std::invalid_argument("CalibrationProblem: weight/quote size mismatch");
        pricing_curves_ = curves_for_variant(market_, variant_);
        const ShiftRule shift;  // kappa = 1/x
        cells_.reserve(quotes_.size());
        for (std::size_t i = 0; i < quotes_.size(); ++i) {
            const auto& q = quotes_[i];
            CellStatics c;
            c.schedule = schedule_for_quote(market_.anchor(), q.expiry_years, q.tenor_years, q.float_tenor);
            // market ATM strike, same instrument for every variant
            c.strike = par_swap_rate(market_, c.schedule);
            c.annuity = annuity(pricing_curves_, c.schedule);
            c.par_rate = par_swap_rate(pricing_curves_, c.schedule);
            c.psi = swap_shift_psi(pricing_curves_, c.schedule, shift);
            c.delta = delta_weights(pricing_curves_, c.schedule, shift);
            c.market_premium = q.premium;
            c.weight = weights[i];
            cells_.push_back(std::move(c));
        }
        if (static_cast<int>(quotes_.size()) < n_theta())
            throw std::invalid_argument("CalibrationProblem: fewer quotes than free parameters");
    }

    const CurveSet& market() const { return market_; }
    const CurveSet& pricing_curves() const { return pricing_curves_; }
    const std::vector<SwaptionQuote>& quotes() const { return quotes_; }
    const std::vector<CellStatics>& cells() const { return cells_; }
    ModelVariant variant() const { return variant_; }
    const CalibrationSettings& settings() const { return settings_; }

    int n_theta() const { return variant_has_eta(variant_) ? 10 : 8; }

    /// theta = [lambda1, u, h1, h2, (eta1, eta2,) rho12, beta0, beta1, beta2],
    /// lambda2 = lambda1 + e^u enforcing the ordering constraint.
    WgParams theta_to_params(const Eigen::VectorXd& th) const {
        const bool he = variant_has_eta(variant_);
        const int k = he ? 6 : 4;
        const double l1 = th(0), l2 = th(0) + std::exp(th(1));
        const double e1 = he ? th(4) : 0.0, e2 = he ? th(5) : 0.0;
        return WgParams::two_factor(l1, l2, th(2), th(3), e1, e2, th(k), th(k + 1), th(k + 2), th(k + 3));
    }

    Eigen::VectorXd params_to_theta(const WgParams& p) const {
        const bool he = variant_has_eta(variant_);
        Eigen::VectorXd th(n_theta());
        th(0) = p.lambda[0];
        th(1) = std::log(std::max(p.lambda[1] - p.lambda[0], 1e-12));
        th(2) = p.h[0];
        th(3) = p.h[1];
        int k = 4;
        if (he) {
            th(4) = p.eta[0];
            th(5) = p.eta[1];
            k = 6;
        }
        th(k) = p.rho(1, 0);
        th(k + 1) = p.beta0;
        th(k + 2) = p.beta1;
        th(k + 3) = p.beta2;
        return th;
    }

    ThetaBounds default_bounds() const {
        const bool he = variant_has_eta(variant_);
        std::vector<double> lo{1e-6, std::log(1e-3), 1e-4, 1e-4};
        std::vector<double> hi{0.5, std::log(8.0), 0.3, 0.3};
        if (he) {
            lo.insert(lo.end(), {0.0, 0.0});
            hi.insert(hi.end(), {3.0, 3.0});
        }
        lo.insert(lo.end(), {-0.999, 0.01, 1e-4, 0.05});
        hi.insert(hi.end(), {0.999, 5.0, 10.0, 3.0});
        ThetaBounds b;
        b.lo = Eigen::Map<Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size()));
        b.hi = Eigen::Map<Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size()));
        return b;
    }

    /// Model premium for one cell under given parameters.
    double cell_price(const WgParams& p, const CellStatics& c) const {
        const double gamma = gamma_from_deltas(p, c.schedule, c.delta);
        return black_price(c.par_rate, c.strike, c.psi, gamma, c.annuity);
    }

    /// Weighted relative price residuals; pricing failures map to a large
    /// finite penalty and are reported through `failed_cells`.
    Eigen::VectorXd residuals(const Eigen::VectorXd& th, std::vector<std::size_t>* failed_cells = nullptr) const {
        const WgParams p = theta_to_params(th);
        Eigen::VectorXd r(static_cast<Eigen::Index>(cells_.size()));
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            const auto& c = cells_[i];
            double resid;
            try {
                resid = (cell_price(p, c) - c.market_premium) / c.market_premium;
            } catch (const std::exception&) {
                resid = 1e3;
                if (failed_cells) failed_cells->push_back(i);
            }
            r(static_cast<Eigen::Index>(i)) = std::sqrt(c.weight) * resid;
        }
        return r;
    }

    double objective(const Eigen::VectorXd& th) const { return residuals(th).squaredNorm(); }

private:
    CurveSet market_;
    std::vector<SwaptionQuote> quotes_;
    ModelVariant variant_;
    CalibrationSettings settings_;
    CurveSet pricing_curves_;
    std::vector<CellStatics> cells_;
};

} // namespace mchjm
