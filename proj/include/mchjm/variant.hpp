#pragma once
/// Model variants as parameter-space and curve-input restrictions:
///   WG2PP : free eta, Eonia discounting + Euribor forwarding
///   MMG   : eta == 0, same curves (static tenor correction)
///   G2PP  : eta == 0 and a single curve used both for discounting and
///           forwarding (F0 == E0), built by compounding the 6m forwards.

#include <cmath>
#include <stdexcept>
#include <string>

#include "mchjm/curves.hpp"
#include "mchjm/params.hpp"

namespace mchjm {

enum class ModelVariant { WG2PP, MMG, G2PP };

inline std::string variant_name(ModelVariant v) {
    switch (v) {
        case ModelVariant::WG2PP: return "wg2pp";
        case ModelVariant::MMG: return "mmg";
        case ModelVariant::G2PP: return "g2pp";
    }
    return "?";
}

inline ModelVariant variant_from_name(const std::string& s) {
    if (s == "wg2pp") return ModelVariant::WG2PP;
    if (s == "mmg") return ModelVariant::MMG;
    if (s == "g2pp") return ModelVariant::G2PP;
    throw std::invalid_argument("unknown model variant '" + s + "' (wg2pp|mmg|g2pp)");
}

inline bool variant_has_eta(ModelVariant v) { return v == ModelVariant::WG2PP; }

/// Applies the variant's parameter restriction (eta := 0 for the benchmarks).
inline WgParams restrict_params(WgParams p, ModelVariant v) {
    if (!variant_has_eta(v)) {
        for (auto& e : p.eta) e = 0.0;
        p.finalize();
    }
    return p;
}

/// Single curve for the old-style G2++ run: discount factors compounded from
/// the 6m forward curve on a semiannual grid, P(t_m) = P(t_{m-1}) / (1 + F6/2),
/// re-expressed as ACT/360 zero rates. Forwards of every tenor then come from
/// this curve (single-curve mode).
inline CurveSet single_curve_from_6m(const CurveSet& market) {
    const TenorCurve& f6 = market.tenor_curve(Tenor{6});
    const double horizon = f6.pillar_times().back();
    std::vector<double> taus;
    std::vector<double> zeros;
    double lnp = 0.0;
    for (int m = 1; m * 0.5 <= horizon + 0.25; ++m) {
        const double t = m * 0.5;
        lnp -= std::log1p(0.5 * f6.forward(t));
        taus.push_back(t);
        zeros.push_back(-lnp / t);
    }
    CurveSet cs{DiscountCurve(market.anchor(), std::move(taus), std::move(zeros))};
    cs.set_single_curve(true);
    return cs;
}

/// Curve inputs for pricing under a variant.
inline CurveSet curves_for_variant(const CurveSet& market, ModelVariant v) {
    return v == ModelVariant::G2PP ? single_curve_from_6m(market) : market;
}

} // namespace mchjm
