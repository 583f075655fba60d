#pragma once

// The human-facing empathy score: exponential time decay (half-life
// doubles while collection is paused) plus a fixed boost per accepted
// report, always clamped to [0, 1].

#include "sxp/time.hpp"

namespace sxp {

struct EmpathyState {
    double score = 0.0;            // [0, 1]
    Instant last_update = 0;
    bool paused = false;
    double half_life_s = 86400.0;  // 24-hour cycle
    double report_boost = 0.05;
    double pause_multiplier = 2.0; // half-life factor while paused
};

// Decays the score to `now`. Throws std::invalid_argument if now precedes
// the state's last update.
EmpathyState advance(const EmpathyState& state, Instant now);

// advance(now), then add the report boost (clamped at 1).
EmpathyState on_report(const EmpathyState& state, Instant now);

}  // namespace sxp
