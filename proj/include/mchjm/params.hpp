#pragma once
/// WG2++ parameterization: factor mean reversions and scales, tenor
/// dampings, factor correlation, the common volatility hump eps(t), the
/// forward-rate shift rule kappa(T,x) and the q-scaling hook.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mchjm/curves.hpp"

namespace mchjm {

/// Piecewise-constant override on (maturity bucket, tenor); used by both the
/// shift rule and the q-scaling hook.
struct BucketOverride {
    Tenor tenor;
    double maturity_lo = 0.0;  // inclusive
    double maturity_hi = 0.0;  // exclusive
    double value = 0.0;
};

/// Shift kappa(T, x).  Defaults to 1/x, which makes x*kappa -> 1 as x -> 0
/// and recovers the instantaneous-rate limit; optional piecewise-constant
/// overrides per (maturity bucket, whole-month tenor). Continuous tenors
/// (no month label) always use the default rule.
struct ShiftRule {
    std::vector<BucketOverride> overrides;

    double kappa(double T, double x_years, int months_label = -1) const {
        if (months_label >= 0)
            for (const auto& o : overrides)
                if (o.tenor.months == months_label && T >= o.maturity_lo && T < o.maturity_hi)
                    return o.value;
        return 1.0 / x_years;
    }
    double kappa(double T, Tenor x) const { return kappa(T, x.years(), x.months); }
};

/// Scalar q-hat(T, x) multiplier on the tenor weighting (defaults to 1);
/// the exact-fit hook of the framework. Disabled unless overrides are set.
struct QhatRule {
    std::vector<BucketOverride> overrides;

    double qhat(double T, int months_label) const {
        if (months_label >= 0)
            for (const auto& o : overrides)
                if (o.tenor.months == months_label && T >= o.maturity_lo && T < o.maturity_hi)
                    return o.value;
        return 1.0;
    }
};

/// The WG2++ free parameters (n factors; ten free parameters for n = 2).
struct WgParams {
    int n = 2;
    std::vector<double> lambda;  // mean reversions, 1/years, strictly increasing, >= 0
    std::vector<double> h;       // volatility scales, > 0
    std::vector<double> eta;     // tenor dampings, 1/years (q_i = e^{-x eta_i})
    Eigen::MatrixXd rho;         // factor correlation, n x n
    double beta0 = 1.0, beta1 = 0.0, beta2 = 1.0;  // hump parameters, > 0
    ShiftRule shift;
    QhatRule qhat;
    std::vector<double> p;       // per-factor diffusion-mode selector, defaults to ones

    Eigen::MatrixXd R;           // lower-triangular pseudo-square-root, R R^T = rho

    WgParams() = default;

    WgParams(std::vector<double> lambda_, std::vector<double> h_, std::vector<double> eta_,
             Eigen::MatrixXd rho_, double b0, double b1, double b2)
        : n(static_cast<int>(lambda_.size())),
          lambda(std::move(lambda_)),
          h(std::move(h_)),
          eta(std::move(eta_)),
          rho(std::move(rho_)),
          beta0(b0), beta1(b1), beta2(b2) {
        finalize();
    }

    /// Convenience for the two-factor case.
    static WgParams two_factor(double l1, double l2, double h1, double h2, double e1, double e2,
                               double rho12, double b0, double b1, double b2) {
        Eigen::MatrixXd r(2, 2);
        r << 1.0, rho12, rho12, 1.0;
        return WgParams({l1, l2}, {h1, h2}, {e1, e2}, std::move(r), b0, b1, b2);
    }

    /// Common volatility shape eps(t) = 1 + (beta0 - 1 + beta1 t) e^{-beta2 t};
    /// strictly positive for beta0 > 0.
    double epsilon(double t) const {
        return 1.0 + (beta0 - 1.0 + beta1 * t) * std::exp(-beta2 * t);
    }

    /// Tenor weighting entering G: q_i(T, x) = qhat(T,x) * p_i * e^{-x eta_i}.
    double q_factor(int i, double T, double x_years, int months_label = -1) const {
        return qhat.qhat(T, months_label) * p[static_cast<std::size_t>(i)] *
               std::exp(-x_years * eta[static_cast<std::size_t>(i)]);
    }
    double q_factor(int i, double T, Tenor x) const { return q_factor(i, T, x.years(), x.months); }

    /// Validates invariants and computes R. Call after mutating fields.
    void finalize() {
        n = static_cast<int>(lambda.size());
        if (n < 1) throw std::invalid_argument("WgParams: need at least one factor");
        if (h.size() != lambda.size() || eta.size() != lambda.size())
            throw std::invalid_argument("WgParams: lambda/h/eta size mismatch");
        if (p.empty()) p.assign(lambda.size(), 1.0);
        if (p.size() != lambda.size()) throw std::invalid_argument("WgParams: p size mismatch");
        for (int i = 0; i < n; ++i) {
            if (lambda[i] < 0.0) throw std::invalid_argument("WgParams: lambda must be non-negative");
            if (i > 0 && lambda[i] <= lambda[i - 1])
                throw std::invalid_argument("WgParams: mean reversions must be strictly increasing");
            if (h[i] <= 0.0) throw std::invalid_argument("WgParams: h must be positive");
        }
        if (beta0 <= 0.0 || beta1 < 0.0 || beta2 <= 0.0)
            throw std::invalid_argument("WgParams: beta0/beta2 must be positive, beta1 non-negative");
        if (rho.rows() != n || rho.cols() != n)
            throw std::invalid_argument("WgParams: correlation matrix size mismatch");
        for (int i = 0; i < n; ++i) {
            if (std::abs(rho(i, i) - 1.0) > 1e-14)
                throw std::invalid_argument("WgParams: correlation diagonal must be 1");
            for (int j = 0; j < i; ++j)
                if (std::abs(rho(i, j) - rho(j, i)) > 1e-14)
                    throw std::invalid_argument("WgParams: correlation must be symmetric");
        }
        R = pseudo_sqrt(rho);
    }

private:
    static Eigen::MatrixXd pseudo_sqrt(const Eigen::MatrixXd& c) {
        Eigen::LLT<Eigen::MatrixXd> llt(c);
        if (llt.info() == Eigen::Success) return llt.matrixL();
        // semidefinite edge (|rho| ~ 1): tiny diagonal jitter
        Eigen::MatrixXd cj = c + 1e-12 * Eigen::MatrixXd::Identity(c.rows(), c.cols());
        Eigen::LLT<Eigen::MatrixXd> llt2(cj);
        if (llt2.info() != Eigen::Success)
            throw std::invalid_argument("WgParams: correlation matrix is not positive semidefinite");
        return llt2.matrixL();
    }
};

} // namespace mchjm
