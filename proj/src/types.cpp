#include "sxp/types.hpp"

#include <cctype>
#include <cstdio>

#include "sxp/timezone.hpp"

namespace sxp {

const char* to_string(ValenceClass c) {
    switch (c) {
        case ValenceClass::Negative: return "negative";
        case ValenceClass::Neutral: return "neutral";
        case ValenceClass::Positive: return "positive";
    }
    return "?";
}

std::optional<ValenceClass> valence_from_string(const std::string& s) {
    if (s == "negative") return ValenceClass::Negative;
    if (s == "neutral") return ValenceClass::Neutral;
    if (s == "positive") return ValenceClass::Positive;
    return std::nullopt;
}

const char* to_string(ReportOrigin o) {
    return o == ReportOrigin::Button ? "button" : "detected_text";
}

std::optional<ReportOrigin> origin_from_string(const std::string& s) {
    if (s == "button") return ReportOrigin::Button;
    if (s == "detected_text") return ReportOrigin::DetectedText;
    return std::nullopt;
}

const char* to_string(Gender g) {
    switch (g) {
        case Gender::Female: return "female";
        case Gender::Male: return "male";
        case Gender::Other: return "other";
    }
    return "?";
}

std::optional<Gender> gender_from_string(const std::string& s) {
    if (s == "female") return Gender::Female;
    if (s == "male") return Gender::Male;
    if (s == "other") return Gender::Other;
    return std::nullopt;
}

MomentContext moment_of(Instant at, const std::string& tz) {
    const TimeZone& zone = locate_zone(tz);
    const std::int64_t offset_ms = static_cast<std::int64_t>(zone.offset_at(at)) * 1000;
    const Instant local = at + offset_ms;
    std::int64_t days = local / 86400000;
    std::int64_t ms = local % 86400000;
    if (ms < 0) {
        ms += 86400000;
        days -= 1;
    }
    MomentContext m;
    m.weekday = weekday_from_days(days);
    m.hour = static_cast<int>(ms / 3600000);
    return m;
}

std::optional<Instant> parse_rfc3339(const std::string& text) {
    // YYYY-MM-DDTHH:MM:SS[.fff...](Z|±HH:MM)
    const char* p = text.c_str();
    auto digits = [&p](int n, int& out) {
        out = 0;
        for (int i = 0; i < n; ++i) {
            if (!std::isdigit(static_cast<unsigned char>(*p))) return false;
            out = out * 10 + (*p++ - '0');
        }
        return true;
    };
    CivilDateTime c;
    if (!digits(4, c.year) || *p++ != '-') return std::nullopt;
    if (!digits(2, c.month) || *p++ != '-') return std::nullopt;
    if (!digits(2, c.day)) return std::nullopt;
    if (*p != 'T' && *p != 't' && *p != ' ') return std::nullopt;
    ++p;
    if (!digits(2, c.hour) || *p++ != ':') return std::nullopt;
    if (!digits(2, c.minute) || *p++ != ':') return std::nullopt;
    if (!digits(2, c.second)) return std::nullopt;
    if (c.month < 1 || c.month > 12 || c.day < 1 || c.day > 31 || c.hour > 23 ||
        c.minute > 59 || c.second > 60)
        return std::nullopt;
    if (c.second == 60) c.second = 59;  // leap second: clamp
    if (*p == '.') {
        ++p;
        int scale = 100;
        int frac = 0;
        int n = 0;
        while (std::isdigit(static_cast<unsigned char>(*p))) {
            if (n < 3) frac += (*p - '0') * scale;
            scale /= 10;
            ++p;
            ++n;
        }
        if (n == 0) return std::nullopt;
        c.millisecond = frac;
    }
    std::int64_t offset_s = 0;
    if (*p == 'Z' || *p == 'z') {
        ++p;
    } else if (*p == '+' || *p == '-') {
        const int sign = *p == '-' ? -1 : 1;
        ++p;
        int oh = 0, om = 0;
        if (!digits(2, oh)) return std::nullopt;
        if (*p == ':') ++p;
        if (!digits(2, om)) return std::nullopt;
        if (oh > 18 || om > 59) return std::nullopt;
        offset_s = sign * (oh * 3600 + om * 60);
    } else {
        return std::nullopt;
    }
    if (*p != '\0') return std::nullopt;
    return instant_from_civil_utc(c) - offset_s * 1000;
}

std::string format_rfc3339(Instant t) {
    const CivilDateTime c = civil_utc_from_instant(t);
    char buf[40];
    if (c.millisecond != 0) {
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", c.year,
                      c.month, c.day, c.hour, c.minute, c.second, c.millisecond);
    } else {
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", c.year, c.month,
                      c.day, c.hour, c.minute, c.second);
    }
    return buf;
}

}  // namespace sxp
