#pragma once

// Sequential model-based optimization: quasi-random initial trials, then
// expected improvement under a Gaussian-process surrogate (Matérn-5/2 on
// per-dimension [0,1]-scaled inputs, observation-noise jitter). Maximizes
// the objective; deterministic for a fixed seed.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sxp {

struct ParamRange {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    bool log_scale = false;  // geometric interpolation over [lo, hi]
    bool integer = false;    // rounded to the nearest integer

    double from_unit(double u) const;  // [0,1] -> raw value
    double to_unit(double v) const;
};

using ParamPoint = std::vector<double>;  // raw-space values, one per range

struct Trial {
    int index = 0;
    ParamPoint point;
    double objective = 0.0;
    bool failed = false;  // objective returned a non-finite value
};

struct BayesOptResult {
    ParamPoint best;
    double best_objective = 0.0;
    std::vector<Trial> trials;
    bool any_succeeded = false;
};

using Objective = std::function<double(const ParamPoint&)>;

BayesOptResult bayes_opt(const Objective& objective, const std::vector<ParamRange>& space,
                         int budget, std::uint64_t seed);

}  // namespace sxp
