#pragma once
/// Initial term structures: Eonia discount curve (continuously-compounded
/// ACT/360 zero rates, log-linear discount interpolation) and forward Libor
/// curves per tenor (linear interpolation on rates).
///
/// All interior time arguments are ACT/360 year fractions from the anchor
/// date; date-based overloads convert at the boundary. Curves are immutable
/// after construction and safe to share across threads.

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mchjm/dates.hpp"

namespace mchjm {

/// Whole-month tenor label; model quantities use the canonical year
/// fraction months/12 (3M -> 0.25, 6M -> 0.5).
struct Tenor {
    int months = 0;
    double years() const { return months / 12.0; }
    auto operator<=>(const Tenor&) const = default;
};

inline Tenor tenor_from_label(const std::string& s) {
    if (s.size() < 2 || (s.back() != 'M' && s.back() != 'm'))
        throw std::invalid_argument("tenor label must look like '3M', got '" + s + "'");
    const int m = std::stoi(s.substr(0, s.size() - 1));
    if (m <= 0) throw std::invalid_argument("tenor must be positive: '" + s + "'");
    return Tenor{m};
}

inline std::string tenor_label(Tenor x) {
    return std::to_string(x.months) + "M";
}

namespace detail {

// index of the interval [t_i, t_{i+1}) containing t; requires ts.size() >= 2
inline std::size_t bracket(const std::vector<double>& ts, double t) {
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    if (it == ts.begin()) return 0;
    std::size_t i = static_cast<std::size_t>(it - ts.begin()) - 1;
    return std::min(i, ts.size() - 2);
}

} // namespace detail

/// Eonia zero-rate term structure.  P0(T) = exp(-r_z(T) tau) with r_z such
/// that r_z(T)*tau(T) is linear between pillars (log-linear discount
/// factors, piecewise-constant instantaneous forwards); flat zero-rate
/// extrapolation outside the pillar range.
class DiscountCurve {
public:
    DiscountCurve() = default;

    DiscountCurve(MarketDate anchor, std::vector<double> pillar_taus, std::vector<double> zero_rates)
        : anchor_(anchor), taus_(std::move(pillar_taus)), zeros_(std::move(zero_rates)) {
        if (taus_.empty() || taus_.size() != zeros_.size())
            throw std::invalid_argument("DiscountCurve: empty or mismatched pillars");
        double prev = 0.0;
        for (double t : taus_) {
            if (t <= prev) throw std::invalid_argument("DiscountCurve: pillar times must be strictly increasing and after the anchor");
            prev = t;
        }
        ys_.resize(taus_.size());
        for (std::size_t i = 0; i < taus_.size(); ++i) ys_[i] = zeros_[i] * taus_[i];
    }

    DiscountCurve(MarketDate anchor, const std::vector<MarketDate>& pillars, std::vector<double> zero_rates)
        : DiscountCurve(anchor, to_taus(anchor, pillars), std::move(zero_rates)) {}

    MarketDate anchor() const { return anchor_; }
    const std::vector<double>& pillar_times() const { return taus_; }
    const std::vector<double>& zero_rates() const { return zeros_; }
    double max_time() const { return taus_.back(); }

    double tau(MarketDate d) const { return year_fraction(anchor_, d); }

    /// -log P0(t); exact at pillars.
    double log_discount(double t) const {
        if (t < 0.0) throw std::domain_error("DiscountCurve: time before anchor");
        if (t == 0.0) return 0.0;
        if (t <= taus_.front()) return zeros_.front() * t;
        if (t >= taus_.back()) return zeros_.back() * t;
        const std::size_t i = detail::bracket(taus_, t);
        if (t == taus_[i]) return ys_[i];
        const double w = (t - taus_[i]) / (taus_[i + 1] - taus_[i]);
        return ys_[i] + w * (ys_[i + 1] - ys_[i]);
    }

    double discount(double t) const { return std::exp(-log_discount(t)); }
    double discount(MarketDate d) const { return discount(tau(d)); }

    /// Zero rate consistent with log_discount; reproduces pillar inputs exactly.
    double zero_rate(double t) const {
        if (t < 0.0) throw std::domain_error("DiscountCurve: time before anchor");
        if (t <= taus_.front()) return zeros_.front();
        if (t >= taus_.back()) return zeros_.back();
        const std::size_t i = detail::bracket(taus_, t);
        if (t == taus_[i]) return zeros_[i];
        return log_discount(t) / t;
    }
    double zero_rate(MarketDate d) const { return zero_rate(tau(d)); }

    /// Instantaneous forward f0(t) = -d/dt log P0; piecewise constant,
    /// right-continuous at pillars (and at t = 0).
    double inst_forward(double t) const {
        if (t < 0.0) throw std::domain_error("DiscountCurve: instantaneous forward needs t >= 0");
        if (t < taus_.front()) return zeros_.front();
        if (t >= taus_.back()) return zeros_.back();
        const std::size_t i = detail::bracket(taus_, t);
        return (ys_[i + 1] - ys_[i]) / (taus_[i + 1] - taus_[i]);
    }
    double inst_forward(MarketDate d) const {
        if (d <= anchor_) throw std::domain_error("DiscountCurve: instantaneous forward needs a date after the anchor");
        return inst_forward(tau(d));
    }

    /// Single-period OIS rate E0(T,x) = ((P0(T-x)/P0(T)) - 1)/x.
    double ois_simple(double T, double x) const {
        if (x <= 0.0) throw std::domain_error("DiscountCurve: tenor must be positive");
        if (T - x < 0.0) throw std::domain_error("DiscountCurve: period start before anchor");
        return std::expm1(log_discount(T) - log_discount(T - x)) / x;
    }
    double ois_simple(MarketDate d, double x) const { return ois_simple(tau(d), x); }

private:
    static std::vector<double> to_taus(MarketDate anchor, const std::vector<MarketDate>& pillars) {
        std::vector<double> ts;
        ts.reserve(pillars.size());
        for (auto d : pillars) {
            if (d <= anchor) throw std::invalid_argument("DiscountCurve: pillar on or before anchor");
            ts.push_back(year_fraction(anchor, d));
        }
        return ts;
    }

    MarketDate anchor_;
    std::vector<double> taus_;
    std::vector<double> zeros_;
    std::vector<double> ys_; // zero * tau, the linear interpolation ordinate
};

/// Initial forward Libor curve F0(T, x) for one tenor; linear in T between
/// pillars, flat outside.
class TenorCurve {
public:
    TenorCurve() = default;

    TenorCurve(MarketDate anchor, Tenor x, std::vector<double> pillar_taus, std::vector<double> fwd_rates)
        : anchor_(anchor), tenor_(x), taus_(std::move(pillar_taus)), fwds_(std::move(fwd_rates)) {
        if (tenor_.months <= 0) throw std::invalid_argument("TenorCurve: tenor must be positive");
        if (taus_.empty() || taus_.size() != fwds_.size())
            throw std::invalid_argument("TenorCurve: empty or mismatched pillars");
        double prev = -1.0;
        for (double t : taus_) {
            if (t <= prev) throw std::invalid_argument("TenorCurve: pillar times must be strictly increasing");
            prev = t;
        }
    }

    TenorCurve(MarketDate anchor, Tenor x, const std::vector<MarketDate>& pillars, std::vector<double> fwd_rates)
        : TenorCurve(anchor, x, to_taus(anchor, pillars), std::move(fwd_rates)) {}

    MarketDate anchor() const { return anchor_; }
    Tenor tenor() const { return tenor_; }
    const std::vector<double>& pillar_times() const { return taus_; }
    const std::vector<double>& rates() const { return fwds_; }

    /// Interpolated F0(T, x); exact at pillars.
    double forward(double T) const {
        if (T <= taus_.front()) return fwds_.front();
        if (T >= taus_.back()) return fwds_.back();
        const std::size_t i = detail::bracket(taus_, T);
        if (T == taus_[i]) return fwds_[i];
        const double w = (T - taus_[i]) / (taus_[i + 1] - taus_[i]);
        return fwds_[i] + w * (fwds_[i + 1] - fwds_[i]);
    }
    double forward(MarketDate d) const { return forward(year_fraction(anchor_, d)); }

private:
    static std::vector<double> to_taus(MarketDate anchor, const std::vector<MarketDate>& pillars) {
        std::vector<double> ts;
        ts.reserve(pillars.size());
        for (auto d : pillars) ts.push_back(year_fraction(anchor, d));
        return ts;
    }

    MarketDate anchor_;
    Tenor tenor_;
    std::vector<double> taus_;
    std::vector<double> fwds_;
};

/// One discount curve plus forward curves per tenor.  In single-curve mode
/// (old-style models) forwards for every tenor are read off the discount
/// curve as E0(T, x).
class CurveSet {
public:
    CurveSet() = default;

    explicit CurveSet(DiscountCurve discount) : discount_(std::move(discount)) {}

    MarketDate anchor() const { return discount_.anchor(); }
    const DiscountCurve& discount() const { return discount_; }
    bool single_curve() const { return single_curve_; }

    void add(TenorCurve curve) {
        if (curve.anchor() != discount_.anchor())
            throw std::invalid_argument("CurveSet: tenor curve anchor differs from discount anchor");
        const int m = curve.tenor().months;
        tenors_.insert_or_assign(m, std::move(curve));
    }

    /// Marks this set as single-curve: initial forwards of any tenor are
    /// derived from the discount curve (F0 == E0).
    void set_single_curve(bool on) { single_curve_ = on; }

    bool has_tenor(Tenor x) const { return single_curve_ || tenors_.count(x.months) > 0; }

    const TenorCurve& tenor_curve(Tenor x) const {
        auto it = tenors_.find(x.months);
        if (it == tenors_.end())
            throw std::out_of_range("CurveSet: no curve for tenor " + tenor_label(x));
        return it->second;
    }

    const std::map<int, TenorCurve>& tenor_curves() const { return tenors_; }

    /// Initial forward for tenor x at maturity time T (years from anchor).
    double forward(double T, Tenor x) const {
        if (single_curve_) return discount_.ois_simple(T, x.years());
        return tenor_curve(x).forward(T);
    }
    double forward(MarketDate d, Tenor x) const {
        return forward(year_fraction(anchor(), d), x);
    }

private:
    DiscountCurve discount_;
    std::map<int, TenorCurve> tenors_;
    bool single_curve_ = false;
};

} // namespace mchjm
