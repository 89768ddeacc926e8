#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "bhi/error.hpp"

namespace bhi {

/// Fixed month length used for every decay computation, so results do not
/// depend on which calendar months an interval happens to span.
inline constexpr double kDaysPerMonth = 30.4375;

namespace detail {

// Proleptic Gregorian day count (days since 1970-01-01).
constexpr std::int32_t days_from_civil(std::int32_t y, std::uint32_t m, std::uint32_t d) {
    y -= m <= 2;
    const std::int32_t era = (y >= 0 ? y : y - 399) / 400;
    const std::uint32_t yoe = static_cast<std::uint32_t>(y - era * 400);
    const std::uint32_t doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const std::uint32_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int32_t>(doe) - 719468;
}

struct Civil {
    std::int32_t year;
    std::uint32_t month;
    std::uint32_t day;
};

constexpr Civil civil_from_days(std::int32_t z) {
    z += 719468;
    const std::int32_t era = (z >= 0 ? z : z - 146096) / 146097;
    const std::uint32_t doe = static_cast<std::uint32_t>(z - era * 146097);
    const std::uint32_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int32_t y = static_cast<std::int32_t>(yoe) + era * 400;
    const std::uint32_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const std::uint32_t mp = (5 * doy + 2) / 153;
    const std::uint32_t d = doy - (153 * mp + 2) / 5 + 1;
    const std::uint32_t m = mp + (mp < 10 ? 3 : -9);
    return {y + (m <= 2), m, d};
}

constexpr bool is_leap(std::int32_t y) {
    return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
}

constexpr std::uint32_t days_in_month(std::int32_t y, std::uint32_t m) {
    constexpr std::uint32_t lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : lengths[m - 1];
}

}  // namespace detail

/// Calendar date stored as days since 1970-01-01.
struct Date {
    std::int32_t days = 0;

    constexpr auto operator<=>(const Date&) const = default;

    static constexpr Date from_civil(std::int32_t year, std::uint32_t month, std::uint32_t day) {
        return Date{detail::days_from_civil(year, month, day)};
    }

    std::string to_string() const {
        const auto c = detail::civil_from_days(days);
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", c.year, c.month, c.day);
        return buf;
    }
};

/// Strict ISO-8601 (YYYY-MM-DD) parse. Anything else throws.
inline Date parse_date(std::string_view text) {
    const auto fail = [&] { throw Error("dates", "invalid date '" + std::string(text) + "' (expected YYYY-MM-DD)"); };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') fail();

    const auto to_int = [&](std::string_view part) {
        int value = 0;
        const auto* first = part.data();
        const auto* last = part.data() + part.size();
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last) fail();
        return value;
    };

    const std::int32_t y = to_int(text.substr(0, 4));
    const std::int32_t m = to_int(text.substr(5, 2));
    const std::int32_t d = to_int(text.substr(8, 2));
    if (m < 1 || m > 12) fail();
    if (d < 1 || static_cast<std::uint32_t>(d) > detail::days_in_month(y, static_cast<std::uint32_t>(m))) fail();
    return Date::from_civil(y, static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(d));
}

inline double months_between(Date from, Date to) {
    return static_cast<double>(to.days - from.days) / kDaysPerMonth;
}

}  // namespace bhi
