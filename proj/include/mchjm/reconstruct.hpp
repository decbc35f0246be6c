#pragma once
/// Markov-state reconstruction of forward Libor rates, OIS simple rates,
/// bonds, instantaneous forwards and the short rate from (X, Y).

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "mchjm/curves.hpp"
#include "mchjm/kernels.hpp"

namespace mchjm {

/// The (X, Y) Markov state at time t. Y is symmetric PSD; at t = 0 both
/// vanish and every reconstruction returns its initial curve.
struct HjmState {
    double t = 0.0;
    Eigen::VectorXd X;
    Eigen::MatrixXd Y;

    static HjmState initial(int n) {
        return {0.0, Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};
    }
};

/// log((kappa + F_t)/(kappa + F_0)) for the forward Libor of tenor x
/// maturing at T: G^T (X + Y (G0(t,t,T) - G/2)).
inline double libor_log_increment(const VolKernel& k, const HjmState& s, double T, double x_years,
                                  int months_label = -1) {
    if (s.t > T - x_years + 1e-14) throw std::domain_error("reconstruct: rate already fixed (t > T - x)");
    const Eigen::VectorXd G = k.G(s.t, T - x_years, T, T, x_years, months_label);
    const Eigen::VectorXd G0tT = k.G0(s.t, s.t, T);
    return G.dot(s.X + s.Y * (G0tT - 0.5 * G));
}

/// Same with q == 1: log((1 + x E_t)/(1 + x E_0)).
inline double ois_log_increment(const VolKernel& k, const HjmState& s, double T, double x) {
    if (s.t > T - x + 1e-14) throw std::domain_error("reconstruct: rate already fixed (t > T - x)");
    const Eigen::VectorXd G0p = k.G0(s.t, T - x, T);
    const Eigen::VectorXd G0tT = k.G0(s.t, s.t, T);
    return G0p.dot(s.X + s.Y * (G0tT - 0.5 * G0p));
}

/// F_t(T,x) given the initial forward value F0(T,x); x is a year fraction
/// (pass the month label to engage bucket overrides).
inline double reconstruct_forward_libor(const VolKernel& k, const HjmState& s, double f0_initial,
                                        double T, double x_years, int months_label = -1) {
    const double kap = k.params().shift.kappa(T, x_years, months_label);
    return (kap + f0_initial) * std::exp(libor_log_increment(k, s, T, x_years, months_label)) - kap;
}

/// F_t(T,x) with the initial value interpolated from the curve set.
inline double reconstruct_forward_libor(const VolKernel& k, const HjmState& s, const CurveSet& cs,
                                        double T, Tenor x) {
    if (!cs.has_tenor(x))
        throw std::out_of_range("reconstruct: no curve for tenor " + tenor_label(x));
    return reconstruct_forward_libor(k, s, cs.forward(T, x), T, x.years(), x.months);
}

/// E_t(T,x) given the initial OIS rate E0(T,x).
inline double reconstruct_ois_rate(const VolKernel& k, const HjmState& s, double e0_initial,
                                   double T, double x) {
    return ((1.0 + x * e0_initial) * std::exp(ois_log_increment(k, s, T, x)) - 1.0) / x;
}

inline double reconstruct_ois_rate(const VolKernel& k, const HjmState& s, const DiscountCurve& dc,
                                   double T, double x) {
    return reconstruct_ois_rate(k, s, dc.ois_simple(T, x), T, x);
}

/// P_t(T) = 1 / (1 + (T-t) E_t(T, T-t)); P_t(t) = 1.
inline double bond_price(const VolKernel& k, const HjmState& s, const DiscountCurve& dc, double T) {
    if (T < s.t) throw std::domain_error("bond_price: maturity before state time");
    if (T == s.t) return 1.0;
    const double x = T - s.t;
    return 1.0 / (1.0 + x * reconstruct_ois_rate(k, s, dc, T, x));
}

/// f_t(T) = f_0(T) + sum_i g_i(t,T) (X_i + (Y G0(t,t,T))_i).
inline double inst_forward(const VolKernel& k, const HjmState& s, const DiscountCurve& dc, double T) {
    if (T < s.t) throw std::domain_error("inst_forward: maturity before state time");
    const Eigen::VectorXd G0tT = k.G0(s.t, s.t, T);
    const Eigen::VectorXd v = s.X + s.Y * G0tT;
    double f = dc.inst_forward(T);
    for (int i = 0; i < k.factors(); ++i) f += k.g(i, s.t, T) * v(i);
    return f;
}

/// r_t = f_0(t) + sum_i X_i.
inline double short_rate(const VolKernel&, const HjmState& s, const DiscountCurve& dc) {
    return dc.inst_forward(s.t) + s.X.sum();
}

} // namespace mchjm
