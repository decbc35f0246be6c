#pragma once
/// Time-0 swap analytics: annuity, par rate, the weighted shift psi and the
/// frozen delta weights of the lognormal-shifted swap-rate approximation,
/// basis swap spreads.

#include <stdexcept>
#include <vector>

#include "mchjm/curves.hpp"
#include "mchjm/params.hpp"
#include "mchjm/schedule.hpp"

namespace mchjm {

/// A^{ab} = sum_j taubar_j P0(Tbar_j).
inline double annuity(const CurveSet& cs, const SwapSchedule& s) {
    double a = 0.0;
    for (std::size_t j = 0; j < s.fixed_pay.size(); ++j)
        a += s.fixed_accrual[j] * cs.discount().discount(s.fixed_pay[j]);
    return a;
}

/// S0^{ab} = sum_k tau_k P0(T_k) F0(T_k, x) / A^{ab}.
inline double par_swap_rate(const CurveSet& cs, const SwapSchedule& s) {
    double num = 0.0;
    for (std::size_t k = 0; k < s.float_pay.size(); ++k)
        num += s.float_accrual[k] * cs.discount().discount(s.float_pay[k]) *
               cs.forward(s.float_pay[k], s.float_tenor);
    return num / annuity(cs, s);
}

/// psi^{ab} = sum_k tau_k P0(T_k) kappa(T_k, x) / A^{ab}.
inline double swap_shift_psi(const CurveSet& cs, const SwapSchedule& s, const ShiftRule& shift) {
    double num = 0.0;
    for (std::size_t k = 0; k < s.float_pay.size(); ++k)
        num += s.float_accrual[k] * cs.discount().discount(s.float_pay[k]) *
               shift.kappa(s.float_pay[k], s.float_tenor);
    return num / annuity(cs, s);
}

/// Frozen weights delta_k = tau_k P0(T_k)(kappa + F0) / sum_j (same); they
/// are positive and sum to one whenever kappa + F0 > 0.
inline std::vector<double> delta_weights(const CurveSet& cs, const SwapSchedule& s,
                                         const ShiftRule& shift) {
    std::vector<double> d(s.float_pay.size());
    double den = 0.0;
    for (std::size_t k = 0; k < s.float_pay.size(); ++k) {
        const double T = s.float_pay[k];
        d[k] = s.float_accrual[k] * cs.discount().discount(T) *
               (shift.kappa(T, s.float_tenor) + cs.forward(T, s.float_tenor));
        den += d[k];
    }
    if (den <= 0.0) throw std::domain_error("delta_weights: non-positive shifted float leg");
    for (auto& v : d) v /= den;
    return d;
}

/// B = S(x, xbar) - S(x', xbar): basis spread between two floating tenors
/// sharing the fixed-leg convention.
inline double basis_swap_spread(const CurveSet& cs, MarketDate start, int tenor_years,
                                Tenor x, Tenor x_prime) {
    const SwapSchedule a = build_schedule(cs.anchor(), start, tenor_years, x);
    const SwapSchedule b = build_schedule(cs.anchor(), start, tenor_years, x_prime);
    return par_swap_rate(cs, a) - par_swap_rate(cs, b);
}

} // namespace mchjm
