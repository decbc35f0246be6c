#pragma once
/// Shifted Black formula and implied-volatility inversion. Gamma is the
/// total (integrated) standard deviation over the option life, not an
/// annualized volatility.

#include <cmath>
#include <stdexcept>

#include "mchjm/math.hpp"

namespace mchjm {

enum class OptionSide { Payer, Receiver };

/// A * [ (F+psi) Phi(d1) - (K+psi) Phi(d2) ] for a payer,
/// d_{1,2} = log((F+psi)/(K+psi))/Gamma +/- Gamma/2.
inline double black_price(double forward, double strike, double shift, double gamma,
                          double annuity, OptionSide side = OptionSide::Payer) {
    const double f = forward + shift, k = strike + shift;
    if (f <= 0.0 || k <= 0.0)
        throw std::domain_error("black_price: shifted forward and strike must be positive");
    if (gamma < 0.0) throw std::domain_error("black_price: negative volatility");
    const double sign = side == OptionSide::Payer ? 1.0 : -1.0;
    if (gamma == 0.0) return annuity * std::max(sign * (forward - strike), 0.0);
    const double d1 = std::log(f / k) / gamma + 0.5 * gamma;
    const double d2 = d1 - gamma;
    return annuity * sign * (f * norm_cdf(sign * d1) - k * norm_cdf(sign * d2));
}

struct ImpliedVolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Annualized sigma such that black_price with Gamma = sigma sqrt(T) matches
/// `price`; safeguarded Newton, |price error| <= 1e-10 * annuity * (F+psi).
inline double implied_black_vol(double price, double forward, double strike, double shift,
                                double annuity, double expiry, OptionSide side = OptionSide::Payer) {
    const double f = forward + shift, k = strike + shift;
    if (f <= 0.0 || k <= 0.0)
        throw std::domain_error("implied_black_vol: shifted forward and strike must be positive");
    if (expiry <= 0.0) throw std::domain_error("implied_black_vol: expiry must be positive");
    const double sign = side == OptionSide::Payer ? 1.0 : -1.0;
    const double intrinsic = annuity * std::max(sign * (forward - strike), 0.0);
    const double upper = annuity * (side == OptionSide::Payer ? f : k);
    const double tol = 1e-10 * annuity * f;
    if (price < intrinsic - tol || price > upper + tol)
        throw ImpliedVolError("implied_black_vol: price outside no-arbitrage bounds");
    if (price <= intrinsic + 0.0) return 0.0;

    double lo = 0.0, hi = 1.0;
    while (black_price(forward, strike, shift, hi, annuity, side) < price) {
        hi *= 2.0;
        if (hi > 1e4) throw ImpliedVolError("implied_black_vol: no bracketing volatility");
    }
    double g = 0.5 * hi;
    for (int it = 0; it < 200; ++it) {
        const double p = black_price(forward, strike, shift, g, annuity, side);
        const double err = p - price;
        if (std::abs(err) <= tol) break;
        if (err > 0.0) hi = g; else lo = g;
        const double d1 = std::log(f / k) / g + 0.5 * g;
        const double vega = annuity * f * norm_pdf(d1);
        double next = vega > 0.0 ? g - err / vega : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - g) < 1e-16 * (1.0 + g)) { g = next; break; }
        g = next;
    }
    return g / std::sqrt(expiry);
}

} // namespace mchjm
