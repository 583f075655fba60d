#include "sxp/timezone.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace sxp {

namespace {

constexpr const char* kZoneinfoRoot = "/usr/share/zoneinfo/";

std::uint32_t read_u32be(const unsigned char* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

std::int64_t read_i64be(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
    return static_cast<std::int64_t>(v);
}

std::int32_t read_i32be(const unsigned char* p) {
    return static_cast<std::int32_t>(read_u32be(p));
}

struct TzifHeader {
    std::uint32_t isutcnt, isstdcnt, leapcnt, timecnt, typecnt, charcnt;
};

TzifHeader read_header(const unsigned char* p) {
    TzifHeader h;
    h.isutcnt = read_u32be(p + 20);
    h.isstdcnt = read_u32be(p + 24);
    h.leapcnt = read_u32be(p + 28);
    h.timecnt = read_u32be(p + 32);
    h.typecnt = read_u32be(p + 36);
    h.charcnt = read_u32be(p + 40);
    return h;
}

std::size_t block_size(const TzifHeader& h, int time_width) {
    return h.timecnt * static_cast<std::size_t>(time_width) + h.timecnt +
           h.typecnt * 6 + h.charcnt + h.leapcnt * (time_width + 4) +
           h.isstdcnt + h.isutcnt;
}

// ---- POSIX TZ string parsing ------------------------------------------

const char* parse_tz_name(const char* p) {
    if (*p == '<') {
        ++p;
        while (*p && *p != '>') ++p;
        if (*p == '>') ++p;
        return p;
    }
    while (*p && (std::isalpha(static_cast<unsigned char>(*p)))) ++p;
    return p;
}

// hh[:mm[:ss]] with optional sign; returns seconds.
bool parse_tz_time(const char*& p, int& out_s, bool allow_sign) {
    int sign = 1;
    if (allow_sign && (*p == '+' || *p == '-')) {
        if (*p == '-') sign = -1;
        ++p;
    }
    if (!std::isdigit(static_cast<unsigned char>(*p))) return false;
    int h = 0;
    while (std::isdigit(static_cast<unsigned char>(*p))) h = h * 10 + (*p++ - '0');
    int m = 0, s = 0;
    if (*p == ':') {
        ++p;
        while (std::isdigit(static_cast<unsigned char>(*p))) m = m * 10 + (*p++ - '0');
        if (*p == ':') {
            ++p;
            while (std::isdigit(static_cast<unsigned char>(*p))) s = s * 10 + (*p++ - '0');
        }
    }
    out_s = sign * (h * 3600 + m * 60 + s);
    return true;
}

bool parse_tz_rule(const char*& p, PosixTzRule& rule) {
    if (*p == 'M') {
        ++p;
        rule.kind = PosixTzRule::Kind::MonthWeekDay;
        int m = 0, w = 0, d = 0;
        if (!std::isdigit(static_cast<unsigned char>(*p))) return false;
        while (std::isdigit(static_cast<unsigned char>(*p))) m = m * 10 + (*p++ - '0');
        if (*p++ != '.') return false;
        while (std::isdigit(static_cast<unsigned char>(*p))) w = w * 10 + (*p++ - '0');
        if (*p++ != '.') return false;
        while (std::isdigit(static_cast<unsigned char>(*p))) d = d * 10 + (*p++ - '0');
        rule.month = m;
        rule.week = w;
        rule.day = d;
    } else if (*p == 'J') {
        ++p;
        rule.kind = PosixTzRule::Kind::JulianNoLeap;
        int n = 0;
        while (std::isdigit(static_cast<unsigned char>(*p))) n = n * 10 + (*p++ - '0');
        rule.day = n;
    } else if (std::isdigit(static_cast<unsigned char>(*p))) {
        rule.kind = PosixTzRule::Kind::ZeroBased;
        int n = 0;
        while (std::isdigit(static_cast<unsigned char>(*p))) n = n * 10 + (*p++ - '0');
        rule.day = n;
    } else {
        return false;
    }
    rule.time_s = 2 * 3600;
    if (*p == '/') {
        ++p;
        if (!parse_tz_time(p, rule.time_s, true)) return false;
    }
    return true;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

}  // namespace

std::int64_t PosixTzRule::day_of_year(int year) const {
    static const int cum[12] = {0, 31, 59, 90, 120, 151, 181, 212, 243, 273, 304, 334};
    switch (kind) {
        case Kind::JulianNoLeap: {
            // Jn: 1..365, Feb 29 never counted.
            int doy = day - 1;
            if (is_leap(year) && day >= 60) doy += 1;
            return doy;
        }
        case Kind::ZeroBased:
            return day;
        case Kind::MonthWeekDay: {
            int first_doy = cum[month - 1];
            if (is_leap(year) && month > 2) first_doy += 1;
            const std::int64_t first_days = days_from_civil(year, month, 1);
            // weekday_from_days: Monday=0; POSIX rule days use Sunday=0.
            const int first_wd_sun0 = (weekday_from_days(first_days) + 1) % 7;
            int offset = (day - first_wd_sun0 + 7) % 7;
            int dom = 1 + offset + (week - 1) * 7;
            int days_in_month = cum[month % 12] - cum[month - 1];
            if (month == 12) days_in_month = 31;
            if (month == 2 && is_leap(year)) days_in_month = 29;
            while (dom > days_in_month) dom -= 7;  // week 5 means "last"
            return first_doy + dom - 1;
        }
    }
    return 0;
}

int PosixTz::offset_at(Instant t) const {
    if (!has_dst) return std_offset_s;
    const std::int64_t ts = t / 1000 - (t % 1000 < 0 ? 1 : 0);
    // Approximate local year via the standard offset.
    int y, m, d;
    civil_from_days((ts + std_offset_s) / 86400 - ((ts + std_offset_s) % 86400 < 0 ? 1 : 0),
                    y, m, d);
    const std::int64_t jan1 = days_from_civil(y, 1, 1) * 86400;
    // Rule times are expressed in the offset active before the switch.
    const std::int64_t start_utc =
        jan1 + dst_start.day_of_year(y) * 86400 + dst_start.time_s - std_offset_s;
    const std::int64_t end_utc =
        jan1 + dst_end.day_of_year(y) * 86400 + dst_end.time_s - dst_offset_s;
    bool dst;
    if (start_utc <= end_utc) {
        dst = ts >= start_utc && ts < end_utc;  // northern hemisphere
    } else {
        dst = ts >= start_utc || ts < end_utc;  // southern hemisphere
    }
    return dst ? dst_offset_s : std_offset_s;
}

PosixTz parse_posix_tz(const std::string& spec) {
    PosixTz tz;
    const char* p = spec.c_str();
    const char* after_name = parse_tz_name(p);
    if (after_name == p) return tz;
    p = after_name;
    int std_off;
    if (!parse_tz_time(p, std_off, true)) return tz;
    tz.std_offset_s = -std_off;  // POSIX offsets are west-positive
    tz.valid = true;
    after_name = parse_tz_name(p);
    if (after_name == p) return tz;  // no DST name
    p = after_name;
    tz.has_dst = true;
    int dst_off;
    if (parse_tz_time(p, dst_off, true)) {
        tz.dst_offset_s = -dst_off;
    } else {
        tz.dst_offset_s = tz.std_offset_s + 3600;
    }
    if (*p == ',') {
        ++p;
        if (!parse_tz_rule(p, tz.dst_start)) {
            tz.valid = false;
            return tz;
        }
        if (*p == ',') {
            ++p;
            if (!parse_tz_rule(p, tz.dst_end)) {
                tz.valid = false;
                return tz;
            }
        }
    } else {
        // DST named but ruleless; treat as permanently standard.
        tz.has_dst = false;
    }
    return tz;
}

TimeZone TimeZone::fixed(const std::string& name, int offset_s) {
    TimeZone z;
    z.name_ = name;
    z.initial_offset_ = offset_s;
    return z;
}

TimeZone TimeZone::from_tzif(const std::string& name, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("unknown timezone: " + name);
    std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* data = reinterpret_cast<const unsigned char*>(raw.data());
    if (raw.size() < 44 || std::memcmp(data, "TZif", 4) != 0)
        throw std::invalid_argument("not a TZif file: " + path);
    const char version = raw[4];

    TzifHeader h1 = read_header(data);
    std::size_t off = 44;
    int time_width = 4;
    TzifHeader h = h1;
    std::string footer;
    if (version == '2' || version == '3') {
        off += block_size(h1, 4);
        if (off + 44 > raw.size() || std::memcmp(data + off, "TZif", 4) != 0)
            throw std::invalid_argument("truncated TZif file: " + path);
        h = read_header(data + off);
        off += 44;
        time_width = 8;
        const std::size_t body = block_size(h, 8);
        const std::size_t foot_off = off + body;
        if (foot_off < raw.size() && raw[foot_off] == '\n') {
            const auto end = raw.find('\n', foot_off + 1);
            if (end != std::string::npos)
                footer = raw.substr(foot_off + 1, end - foot_off - 1);
        }
    }

    if (off + block_size(h, time_width) > raw.size())
        throw std::invalid_argument("truncated TZif file: " + path);

    TimeZone z;
    z.name_ = name;
    const unsigned char* p = data + off;
    std::vector<std::int64_t> times(h.timecnt);
    for (std::uint32_t i = 0; i < h.timecnt; ++i) {
        times[i] = time_width == 8 ? read_i64be(p + i * 8)
                                   : static_cast<std::int64_t>(read_i32be(p + i * 4));
    }
    p += h.timecnt * time_width;
    std::vector<unsigned char> type_idx(p, p + h.timecnt);
    p += h.timecnt;
    struct TType { int utoff; bool isdst; };
    std::vector<TType> types(h.typecnt);
    for (std::uint32_t i = 0; i < h.typecnt; ++i) {
        types[i].utoff = read_i32be(p + i * 6);
        types[i].isdst = p[i * 6 + 4] != 0;
    }
    if (types.empty()) throw std::invalid_argument("TZif with no time types: " + path);

    z.transition_s_ = std::move(times);
    z.transition_offset_.resize(h.timecnt);
    for (std::uint32_t i = 0; i < h.timecnt; ++i) {
        if (type_idx[i] >= types.size())
            throw std::invalid_argument("corrupt TZif type index: " + path);
        z.transition_offset_[i] = types[type_idx[i]].utoff;
    }
    // Offset before the first transition: first non-DST type, per RFC 8536.
    z.initial_offset_ = types[0].utoff;
    for (const auto& t : types) {
        if (!t.isdst) {
            z.initial_offset_ = t.utoff;
            break;
        }
    }
    if (!footer.empty()) z.footer_ = parse_posix_tz(footer);
    return z;
}

int TimeZone::offset_at(Instant t) const {
    const std::int64_t ts = t / 1000 - (t % 1000 < 0 ? 1 : 0);
    if (transition_s_.empty()) {
        return footer_.valid ? footer_.offset_at(t) : initial_offset_;
    }
    if (ts < transition_s_.front()) return initial_offset_;
    if (ts >= transition_s_.back() && footer_.valid) return footer_.offset_at(t);
    auto it = std::upper_bound(transition_s_.begin(), transition_s_.end(), ts);
    const std::size_t idx = static_cast<std::size_t>(it - transition_s_.begin()) - 1;
    return transition_offset_[idx];
}

namespace {

// "UTC+02:00", "UTC-05", "+02:00", "-0530" → fixed offset seconds.
bool parse_fixed_offset(const std::string& name, int& offset_s) {
    std::string rest = name;
    if (rest.rfind("UTC", 0) == 0 || rest.rfind("GMT", 0) == 0) rest = rest.substr(3);
    if (rest.empty()) {
        offset_s = 0;
        return name.rfind("UTC", 0) == 0 || name.rfind("GMT", 0) == 0;
    }
    if (rest[0] != '+' && rest[0] != '-') return false;
    const int sign = rest[0] == '-' ? -1 : 1;
    rest = rest.substr(1);
    int h = 0, m = 0;
    std::size_t i = 0;
    while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i])) && i < 2)
        h = h * 10 + (rest[i++] - '0');
    if (i == 0) return false;
    if (i < rest.size()) {
        if (rest[i] == ':') ++i;
        int digits = 0;
        while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i]))) {
            m = m * 10 + (rest[i++] - '0');
            ++digits;
        }
        if (digits != 2) return false;
    }
    if (i != rest.size() || h > 18 || m > 59) return false;
    offset_s = sign * (h * 3600 + m * 60);
    return true;
}

bool valid_zone_name(const std::string& name) {
    if (name.empty() || name.size() > 128 || name[0] == '/' || name[0] == '.') return false;
    for (char c : name) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '/' || c == '_' ||
              c == '-' || c == '+' || c == '.'))
            return false;
    }
    return name.find("..") == std::string::npos;
}

}  // namespace

const TimeZone& locate_zone(const std::string& name) {
    static std::mutex mu;
    static std::unordered_map<std::string, std::unique_ptr<TimeZone>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(name);
    if (it != cache.end()) {
        if (!it->second) throw std::invalid_argument("unknown timezone: " + name);
        return *it->second;
    }
    int offset_s;
    if (parse_fixed_offset(name, offset_s)) {
        auto z = std::make_unique<TimeZone>(TimeZone::fixed(name, offset_s));
        return *(cache[name] = std::move(z));
    }
    if (!valid_zone_name(name)) throw std::invalid_argument("unknown timezone: " + name);
    try {
        auto z = std::make_unique<TimeZone>(
            TimeZone::from_tzif(name, std::string(kZoneinfoRoot) + name));
        return *(cache[name] = std::move(z));
    } catch (const std::exception&) {
        cache[name] = nullptr;  // negative cache
        throw std::invalid_argument("unknown timezone: " + name);
    }
}

}  // namespace sxp
