#include "sxp/empathy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sxp {

EmpathyState advance(const EmpathyState& state, Instant now) {
    if (now < state.last_update)
        throw std::invalid_argument("empathy update moving backwards in time");
    EmpathyState next = state;
    const double dt_s = static_cast<double>(now - state.last_update) / 1000.0;
    const double half_life =
        state.paused ? state.half_life_s * state.pause_multiplier : state.half_life_s;
    next.score = std::clamp(state.score * std::exp2(-dt_s / half_life), 0.0, 1.0);
    next.last_update = now;
    return next;
}

EmpathyState on_report(const EmpathyState& state, Instant now) {
    EmpathyState next = advance(state, now);
    next.score = std::min(1.0, next.score + state.report_boost);
    return next;
}

}  // namespace sxp
