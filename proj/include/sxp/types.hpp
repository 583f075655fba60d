#pragma once

// Domain types: valence reports, sensor samples, entity profiles and the
// calendar context they are interpreted in. Everything here is immutable
// after construction and safe to share across threads.

#include <cstdint>
#include <optional>
#include <string>

#include "sxp/time.hpp"

namespace sxp {

enum class ValenceClass : std::uint8_t { Negative = 0, Neutral = 1, Positive = 2 };

constexpr int kNumValenceClasses = 3;

const char* to_string(ValenceClass c);
std::optional<ValenceClass> valence_from_string(const std::string& s);

enum class ReportOrigin : std::uint8_t { Button = 0, DetectedText = 1 };

const char* to_string(ReportOrigin o);
std::optional<ReportOrigin> origin_from_string(const std::string& s);

struct ValenceReport {
    std::string entity_id;
    Instant at = 0;          // UTC
    std::string tz;          // IANA name or fixed offset
    ValenceClass valence = ValenceClass::Neutral;
    ReportOrigin origin = ReportOrigin::Button;
};

enum class SampleKind : std::uint8_t { Location = 0, Activity = 1 };

struct SensorSample {
    std::string entity_id;
    Instant at = 0;  // UTC
    SampleKind kind = SampleKind::Location;
    double lat = 0.0;        // degrees, Location only
    double lon = 0.0;        // degrees, Location only
    double accuracy_m = 0.0;
    bool synthetic = false;  // true for reconstructed samples

    bool has_position() const { return kind == SampleKind::Location; }
};

enum class Gender : std::uint8_t { Female = 0, Male = 1, Other = 2 };

const char* to_string(Gender g);
std::optional<Gender> gender_from_string(const std::string& s);

struct EntityProfile {
    std::string entity_id;
    std::optional<int> age_years;
    std::optional<Gender> gender;

    // Missing age or gender keeps the entity in the learning population but
    // out of the demographic comparisons.
    bool demographics_complete() const { return age_years.has_value() && gender.has_value(); }
};

struct MomentContext {
    int weekday = 0;  // Monday=0 .. Sunday=6
    int hour = 0;     // 0..23

    bool operator==(const MomentContext&) const = default;
};

// Local calendar weekday/hour of a UTC instant in the given timezone,
// honoring DST. Throws std::invalid_argument for unknown zones.
MomentContext moment_of(Instant at, const std::string& tz);

}  // namespace sxp
