#pragma once
/// Swap schedules.  Dates roll forward from the start by calendar months
/// (no business-day adjustment); cash-flow accruals are ACT/360 between
/// rolled dates, the fixed leg accrual is pinned to 1.0 exactly (Euro
/// annual convention). Times are ACT/360 year fractions from the anchor.

#include <stdexcept>
#include <vector>

#include "mchjm/curves.hpp"
#include "mchjm/dates.hpp"

namespace mchjm {

struct SwapSchedule {
    MarketDate start_date, end_date;
    Tenor float_tenor;       // x, indexing tenor of the floating leg
    int tenor_years = 0;     // swap length
    double expiry = 0.0;     // T_a, start time in years from anchor

    std::vector<double> float_pay;      // T_k, k = 1..n
    std::vector<double> float_accrual;  // ACT/360 accruals tau_k
    std::vector<double> fixed_pay;      // Tbar_j
    std::vector<double> fixed_accrual;  // taubar_j == 1.0
};

/// Builds a swap schedule rolled forward from `start`; floating leg steps of
/// x months, fixed leg annual.
inline SwapSchedule build_schedule(MarketDate anchor, MarketDate start, int tenor_years,
                                   Tenor float_tenor, int fixed_months = 12) {
    if (tenor_years < 1) throw std::domain_error("build_schedule: tenor must be at least one year");
    if (float_tenor.months <= 0 || 12 % float_tenor.months != 0)
        throw std::domain_error("build_schedule: floating tenor must divide a year");
    if (fixed_months <= 0 || (12 * tenor_years) % fixed_months != 0)
        throw std::domain_error("build_schedule: fixed tenor must divide the swap length");
    if (start < anchor) throw std::domain_error("build_schedule: start before anchor");

    SwapSchedule s;
    s.start_date = start;
    s.end_date = add_months(start, 12 * tenor_years);
    s.float_tenor = float_tenor;
    s.tenor_years = tenor_years;
    s.expiry = year_fraction(anchor, start);

    const int n_float = 12 * tenor_years / float_tenor.months;
    MarketDate prev = start;
    for (int k = 1; k <= n_float; ++k) {
        const MarketDate d = add_months(start, k * float_tenor.months);
        s.float_pay.push_back(year_fraction(anchor, d));
        s.float_accrual.push_back(year_fraction(prev, d));
        prev = d;
    }
    const int n_fixed = 12 * tenor_years / fixed_months;
    for (int j = 1; j <= n_fixed; ++j) {
        const MarketDate d = add_months(start, j * fixed_months);
        s.fixed_pay.push_back(year_fraction(anchor, d));
        s.fixed_accrual.push_back(fixed_months / 12.0);
    }
    return s;
}

/// Schedule for a quoted swaption cell: swap starting expiry_years after the
/// anchor (spot lag ignored).
inline SwapSchedule schedule_for_quote(MarketDate anchor, int expiry_years, int tenor_years,
                                       Tenor float_tenor) {
    return build_schedule(anchor, add_months(anchor, 12 * expiry_years), tenor_years, float_tenor);
}

} // namespace mchjm
