#pragma once
/// Figure-style report data: per-model implied-vol surfaces for 3m- and
/// 6m-indexed swaptions and residual heat-map grids, as plain CSV.
/// Implied vols are unshifted lognormal so the two tenor series live on a
/// common axis; a single-curve model cannot distinguish the two indexings,
/// so G2++ rows carry one computation in both columns.

#include <fstream>
#include <vector>

#include "mchjm/calibrate.hpp"

namespace mchjm {

struct VolSurfaceRow {
    int expiry_years = 0;
    int tenor_years = 0;
    double vol_3m = 0.0;
    double vol_6m = 0.0;
};

/// Model-implied ATM vol for one cell (unshifted lognormal metric).
inline double model_implied_vol(const WgParams& p, const CurveSet& cs, const SwapSchedule& sch) {
    const SwaptionAnalytics a = swaption_price(p, cs, sch);
    return implied_black_vol(a.price, a.par_rate, a.strike, 0.0, a.annuity, sch.expiry);
}

inline std::vector<VolSurfaceRow> vol_surface_report(const WgParams& params, const CurveSet& market,
                                                     ModelVariant variant,
                                                     const std::vector<int>& expiries,
                                                     const std::vector<int>& tenors) {
    const WgParams p = restrict_params(params, variant);
    const CurveSet cs = curves_for_variant(market, variant);
    std::vector<VolSurfaceRow> out;
    for (int e : expiries)
        for (int t : tenors) {
            VolSurfaceRow row;
            row.expiry_years = e;
            row.tenor_years = t;
            if (variant == ModelVariant::G2PP) {
                // quote-convention schedule; 3m and 6m are the same claim here
                const Tenor conv{t == 1 ? 3 : 6};
                const double v = model_implied_vol(p, cs, schedule_for_quote(market.anchor(), e, t, conv));
                row.vol_3m = row.vol_6m = v;
            } else {
                row.vol_3m = model_implied_vol(p, cs, schedule_for_quote(market.anchor(), e, t, Tenor{3}));
                row.vol_6m = model_implied_vol(p, cs, schedule_for_quote(market.anchor(), e, t, Tenor{6}));
            }
            out.push_back(row);
        }
    return out;
}

inline void save_vol_surface(const std::vector<VolSurfaceRow>& rows, std::ostream& out) {
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "expiry_years,tenor_years,vol_3m,vol_6m\n";
    for (const auto& r : rows)
        out << r.expiry_years << "," << r.tenor_years << "," << fmt(r.vol_3m) << "," << fmt(r.vol_6m) << "\n";
}

inline void save_vol_surface(const std::vector<VolSurfaceRow>& rows, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    save_vol_surface(rows, f);
}

/// Residual heat-map in the quote-grid layout: one row per expiry, one
/// column per tenor, vol errors in basis points ("na" where unavailable).
inline void save_residual_heatmap(const std::vector<ResidualCell>& grid, std::ostream& out) {
    std::vector<int> expiries, tenors;
    for (const auto& c : grid) {
        if (std::find(expiries.begin(), expiries.end(), c.quote.expiry_years) == expiries.end())
            expiries.push_back(c.quote.expiry_years);
        if (std::find(tenors.begin(), tenors.end(), c.quote.tenor_years) == tenors.end())
            tenors.push_back(c.quote.tenor_years);
    }
    out << "expiry_years";
    for (int t : tenors) out << ",t" << t << "y_bp";
    out << "\n";
    for (int e : expiries) {
        out << e;
        for (int t : tenors) {
            auto it = std::find_if(grid.begin(), grid.end(), [&](const ResidualCell& c) {
                return c.quote.expiry_years == e && c.quote.tenor_years == t;
            });
            if (it == grid.end() || !it->vol_ok) {
                out << ",na";
            } else {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", it->vol_error_bp);
                out << "," << buf;
            }
        }
        out << "\n";
    }
}

inline void save_residual_heatmap(const std::vector<ResidualCell>& grid, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    save_residual_heatmap(grid, f);
}

} // namespace mchjm
