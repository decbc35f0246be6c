#pragma once
/// Analytic swaption pricing under the frozen-weights lognormal-shifted
/// swap-rate approximation:
///   Pi = A * Bl(K + psi, S0 + psi, Gamma)
///   Gamma^2 = Delta^T Sigma Delta,
///   Delta_i = h_i q_i(x) sum_k delta_k G0_i(0, T_k - x, T_k),
///   Sigma_ij = rho_ij int_0^{Ta} eps^2(u) e^{(lambda_i+lambda_j) u} du.
/// Evaluated in the overflow-safe decayed form: with D_i = Delta_i e^{lambda_i Ta},
///   Gamma^2 = sum_ij rho_ij D_i D_j int_0^{Ta} eps^2(u) e^{-(lambda_i+lambda_j)(Ta-u)} du.

#include <vector>

#include "mchjm/black.hpp"
#include "mchjm/kernels.hpp"
#include "mchjm/swap.hpp"

namespace mchjm {

struct SwaptionAnalytics {
    double annuity = 0.0;
    double par_rate = 0.0;
    double psi = 0.0;
    std::vector<double> delta;
    double gamma = 0.0;  // total standard deviation over [0, Ta]
    double strike = 0.0;
    double price = 0.0;
};

/// Gamma^{ab} from precomputed frozen weights; the Sigma integral uses
/// composite Gauss-Legendre (64 nodes per panel).
inline double gamma_from_deltas(const WgParams& p, const SwapSchedule& s,
                                const std::vector<double>& delta) {
    if (s.expiry <= 0.0) throw std::domain_error("swap_vol_gamma: expiry must be positive");
    const VolKernel kern(p);
    const double Ta = s.expiry;

    Eigen::VectorXd D(p.n);
    for (int i = 0; i < p.n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < s.float_pay.size(); ++k) {
            const double T = s.float_pay[k];
            // G0 anchored at Ta keeps every exponent non-positive
            acc += delta[k] * p.q_factor(i, T, s.float_tenor) *
                   kern.G0_component(i, Ta, T - s.float_tenor.years(), T);
        }
        D(i) = p.h[static_cast<std::size_t>(i)] * acc;
    }

    double g2 = 0.0;
    for (int i = 0; i < p.n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double L = p.lambda[static_cast<std::size_t>(i)] + p.lambda[static_cast<std::size_t>(j)];
            const auto f = [&](double u) {
                const double e = p.epsilon(u);
                return e * e * std::exp(-L * (Ta - u));
            };
            const double I = integrate_gl(f, 0.0, Ta, gl64(), decay_panels(L, Ta));
            g2 += (i == j ? 1.0 : 2.0) * p.rho(i, j) * D(i) * D(j) * I;
        }
    return std::sqrt(std::max(g2, 0.0));
}

/// Gamma^{ab}: total volatility of the shifted swap rate to expiry.
inline double swap_vol_gamma(const WgParams& p, const CurveSet& cs, const SwapSchedule& s) {
    return gamma_from_deltas(p, s, delta_weights(cs, s, p.shift));
}

/// Full analytic pricing of a (payer) swaption; strike < 0 means ATM (K = S0).
inline SwaptionAnalytics swaption_price(const WgParams& p, const CurveSet& cs, const SwapSchedule& s,
                                        double strike = -1.0, OptionSide side = OptionSide::Payer) {
    SwaptionAnalytics a;
    a.annuity = annuity(cs, s);
    a.par_rate = par_swap_rate(cs, s);
    a.psi = swap_shift_psi(cs, s, p.shift);
    a.delta = delta_weights(cs, s, p.shift);
    a.gamma = swap_vol_gamma(p, cs, s);
    a.strike = strike < 0.0 ? a.par_rate : strike;
    a.price = black_price(a.par_rate, a.strike, a.psi, a.gamma, a.annuity, side);
    return a;
}

} // namespace mchjm
