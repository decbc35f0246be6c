#pragma once
/// Serial-day calendar arithmetic and day-count conventions.
/// Dates are plain serial day counts from 1970-01-01 (proleptic Gregorian).

#include <compare>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace mchjm {

namespace detail {

// Howard Hinnant's civil-from-days / days-from-civil algorithms.
constexpr int days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const int yoe = y - era * 400;
    const int doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const int doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + doe - 719468;
}

struct Ymd {
    int year, month, day;
};

constexpr Ymd civil_from_days(int z) {
    z += 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const int doe = z - era * 146097;
    const int yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int y = yoe + era * 400;
    const int doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const int mp = (5 * doy + 2) / 153;
    const int d = doy - (153 * mp + 2) / 5 + 1;
    const int m = mp + (mp < 10 ? 3 : -9);
    return {y + (m <= 2), m, d};
}

constexpr bool is_leap(int y) {
    return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
}

constexpr int last_day_of_month(int y, int m) {
    constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : days[m - 1];
}

} // namespace detail

/// Calendar date as a serial day count; ordering is calendar ordering.
struct MarketDate {
    int serial = 0;

    static MarketDate from_ymd(int y, int m, int d) {
        if (m < 1 || m > 12 || d < 1 || d > detail::last_day_of_month(y, m))
            throw std::invalid_argument("MarketDate: invalid calendar date");
        return {detail::days_from_civil(y, m, d)};
    }

    /// Parses strict ISO-8601 "YYYY-MM-DD".
    static MarketDate parse(const std::string& s) {
        int y, m, d;
        char extra;
        if (std::sscanf(s.c_str(), "%d-%d-%d%c", &y, &m, &d, &extra) != 3)
            throw std::invalid_argument("MarketDate: expected YYYY-MM-DD, got '" + s + "'");
        return from_ymd(y, m, d);
    }

    detail::Ymd ymd() const { return detail::civil_from_days(serial); }

    std::string to_string() const {
        const auto [y, m, d] = ymd();
        char buf[32];
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
        return buf;
    }

    auto operator<=>(const MarketDate&) const = default;
};

/// Rolls forward by calendar months, clamping the day-of-month (no
/// business-day adjustment).
inline MarketDate add_months(MarketDate d, int months) {
    auto [y, m, day] = d.ymd();
    const int idx = y * 12 + (m - 1) + months;
    const int ny = idx >= 0 ? idx / 12 : (idx - 11) / 12;
    const int nm = idx - ny * 12 + 1;
    const int nd = std::min(day, detail::last_day_of_month(ny, nm));
    return MarketDate::from_ymd(ny, nm, nd);
}

enum class DayCount { Act360 };

/// Year fraction between two dates; requires d1 <= d2.
inline double year_fraction(MarketDate d1, MarketDate d2, DayCount dc = DayCount::Act360) {
    if (d1 > d2) throw std::invalid_argument("year_fraction: dates out of order");
    switch (dc) {
        case DayCount::Act360:
            return static_cast<double>(d2.serial - d1.serial) / 360.0;
    }
    throw std::logic_error("year_fraction: unknown day count");
}

} // namespace mchjm
