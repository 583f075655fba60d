#pragma once

// Civil-time plumbing: instants are UTC milliseconds since the Unix epoch.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace sxp {

using Instant = std::int64_t;  // ms since 1970-01-01T00:00:00Z

struct CivilDateTime {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31
    int hour = 0;
    int minute = 0;
    int second = 0;
    int millisecond = 0;
};

// Days since 1970-01-01 for a proleptic Gregorian date.
constexpr std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

// Weekday with Monday=0 .. Sunday=6.
constexpr int weekday_from_days(std::int64_t days) {
    // 1970-01-01 was a Thursday (index 3).
    return static_cast<int>(((days % 7) + 7 + 3) % 7);
}

inline Instant instant_from_civil_utc(const CivilDateTime& c) {
    const std::int64_t days = days_from_civil(c.year, c.month, c.day);
    return ((days * 24 + c.hour) * 60 + c.minute) * 60000 + c.second * 1000 + c.millisecond;
}

inline CivilDateTime civil_utc_from_instant(Instant t) {
    std::int64_t ms = t % 86400000;
    std::int64_t days = t / 86400000;
    if (ms < 0) {
        ms += 86400000;
        days -= 1;
    }
    CivilDateTime c;
    civil_from_days(days, c.year, c.month, c.day);
    c.millisecond = static_cast<int>(ms % 1000);
    std::int64_t s = ms / 1000;
    c.second = static_cast<int>(s % 60);
    c.minute = static_cast<int>((s / 60) % 60);
    c.hour = static_cast<int>(s / 3600);
    return c;
}

// RFC 3339 timestamp, e.g. 2019-06-02T07:00:00Z or 2019-06-02T09:00:00+02:00.
// Fractional seconds are accepted to millisecond precision.
std::optional<Instant> parse_rfc3339(const std::string& text);

inline Instant parse_rfc3339_or_throw(const std::string& text) {
    auto t = parse_rfc3339(text);
    if (!t) throw std::invalid_argument("bad RFC 3339 timestamp: " + text);
    return *t;
}

std::string format_rfc3339(Instant t);

}  // namespace sxp
