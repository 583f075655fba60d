#pragma once

// IANA timezone resolution backed by the system TZif database
// (/usr/share/zoneinfo, RFC 8536). The toolchain's standard library has no
// tzdb, so the binary format is parsed here: explicit transitions from the
// 64-bit data block plus the POSIX TZ footer rule for instants beyond the
// last transition. Fixed-offset names ("UTC", "UTC+02:00", "-05:30") are
// resolved without touching the database.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sxp/time.hpp"

namespace sxp {

// Recurring daylight-saving rule from a POSIX TZ string footer.
struct PosixTzRule {
    enum class Kind { MonthWeekDay, JulianNoLeap, ZeroBased };
    Kind kind = Kind::MonthWeekDay;
    int month = 0;    // 1..12 (MonthWeekDay)
    int week = 0;     // 1..5, 5 = last
    int day = 0;      // 0=Sunday..6 for MonthWeekDay; day number otherwise
    int time_s = 2 * 3600;  // local seconds after midnight, may exceed 24h

    std::int64_t day_of_year(int year) const;  // days since Jan 1 of `year`
};

struct PosixTz {
    bool valid = false;
    int std_offset_s = 0;   // seconds east of UTC
    bool has_dst = false;
    int dst_offset_s = 0;
    PosixTzRule dst_start;
    PosixTzRule dst_end;

    int offset_at(Instant t) const;
};

PosixTz parse_posix_tz(const std::string& spec);

class TimeZone {
public:
    const std::string& name() const { return name_; }

    // Seconds east of UTC in effect at UTC instant t.
    int offset_at(Instant t) const;

    static TimeZone fixed(const std::string& name, int offset_s);
    static TimeZone from_tzif(const std::string& name, const std::string& path);

private:
    std::string name_;
    std::vector<std::int64_t> transition_s_;  // UTC seconds, ascending
    std::vector<int> transition_offset_;      // offset in effect from transition i
    int initial_offset_ = 0;                  // before the first transition
    PosixTz footer_;                          // after the last transition
};

// Process-wide cache; safe for concurrent callers. Throws
// std::invalid_argument for unresolvable names.
const TimeZone& locate_zone(const std::string& name);

}  // namespace sxp
