#pragma once
/// Deterministic kernels of the separable-volatility machinery:
///   g_i(t,u)            = e^{-lambda_i (u-t)}
///   G0_i(t,T0,T1)       = int_{T0}^{T1} g_i(t,y) dy
///   G_i(t,T0,T1;T,x)    = q_i(T,x) * G0_i(t,T0,T1)   (maturity-independent q)
/// the accumulated-covariance matrix Y(t) and the eps^2-weighted decay
/// integrals behind it, all in closed form.

#include <Eigen/Dense>
#include <stdexcept>

#include "mchjm/math.hpp"
#include "mchjm/params.hpp"

namespace mchjm {

class VolKernel {
public:
    explicit VolKernel(const WgParams& p) : p_(&p) {}

    const WgParams& params() const { return *p_; }
    int factors() const { return p_->n; }

    /// g_i(t,u) = e^{-lambda_i (u - t)}, u >= t.
    double g(int i, double t, double u) const {
        if (u < t) throw std::domain_error("kernel g: u < t");
        return std::exp(-p_->lambda[static_cast<std::size_t>(i)] * (u - t));
    }

    /// Component i of G0(t,T0,T1); exact for lambda -> 0.
    double G0_component(int i, double t, double T0, double T1) const {
        if (!(t <= T0 && T0 <= T1)) throw std::domain_error("kernel G0: need t <= T0 <= T1");
        const double lam = p_->lambda[static_cast<std::size_t>(i)];
        const double w = T1 - T0;
        return std::exp(-lam * (T0 - t)) * w * phibar(0, lam * w);
    }

    Eigen::VectorXd G0(double t, double T0, double T1) const {
        Eigen::VectorXd v(p_->n);
        for (int i = 0; i < p_->n; ++i) v(i) = G0_component(i, t, T0, T1);
        return v;
    }

    /// G(t,T0,T1;T,x) = q(T,x) (elementwise) G0(t,T0,T1).
    Eigen::VectorXd G(double t, double T0, double T1, double T, double x_years,
                      int months_label = -1) const {
        Eigen::VectorXd v = G0(t, T0, T1);
        for (int i = 0; i < p_->n; ++i) v(i) *= p_->q_factor(i, T, x_years, months_label);
        return v;
    }
    Eigen::VectorXd G(double t, double T0, double T1, double T, Tenor x) const {
        return G(t, T0, T1, T, x.years(), x.months);
    }

    /// int_s^u eps^2(y) e^{-decay (u - y)} dy in closed form.
    double eps2_decay_integral(double decay, double s, double u) const {
        if (u < s) throw std::domain_error("eps2_decay_integral: u < s");
        const double b = p_->beta0 - 1.0, c = p_->beta1, b2 = p_->beta2;
        double r = poly_exp_integral({1.0, 0.0, 0.0, 0.0}, decay, s, u);
        r += 2.0 * std::exp(-b2 * u) * poly_exp_integral({b, c, 0.0, 0.0}, decay - b2, s, u);
        r += std::exp(-2.0 * b2 * u) * poly_exp_integral({b * b, 2.0 * b * c, c * c, 0.0}, decay - 2.0 * b2, s, u);
        return r;
    }

    /// Conditional covariance of X over [s,u]:
    ///   V_ik = h_i h_k rho_ik int_s^u eps^2(y) e^{-(lambda_i+lambda_k)(u-y)} dy.
    /// Y(t) is the same integral from 0: Y = cov_integral(0, t).
    Eigen::MatrixXd cov_integral(double s, double u) const {
        const int n = p_->n;
        Eigen::MatrixXd v(n, n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k <= i; ++k) {
                const double e = eps2_decay_integral(p_->lambda[i] + p_->lambda[k], s, u);
                v(i, k) = v(k, i) = p_->h[i] * p_->h[k] * p_->rho(i, k) * e;
            }
        return v;
    }

    /// Deterministic solution of the Y dynamics at time t.
    Eigen::MatrixXd Y(double t) const {
        if (t < 0.0) throw std::domain_error("Y: negative time");
        if (t == 0.0) return Eigen::MatrixXd::Zero(p_->n, p_->n);
        return cov_integral(0.0, t);
    }

private:
    const WgParams* p_;
};

} // namespace mchjm
