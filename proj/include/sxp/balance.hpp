#pragma once

// Class-distribution gating: the imbalance-degree statistic and the
// eligibility heuristic that decides whether an entity trains three-class,
// two-class, or not at all.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sxp/types.hpp"

namespace sxp {

struct ClassCounts {
    std::array<std::int64_t, kNumValenceClasses> counts{0, 0, 0};

    std::int64_t& operator[](ValenceClass c) { return counts[static_cast<int>(c)]; }
    std::int64_t operator[](ValenceClass c) const { return counts[static_cast<int>(c)]; }
    std::int64_t total() const { return counts[0] + counts[1] + counts[2]; }

    static ClassCounts from_labels(const std::vector<ValenceClass>& labels);
};

// Skew statistic over the 3-class simplex: 0 iff exactly balanced,
// otherwise (m-1) + d(p, e)/d(iota_m, e) in [m-1, m), where m is the
// number of minority classes (proportion < 1/3), d is Euclidean distance,
// e the balanced distribution, and iota_m the most-distant distribution
// with exactly m minority classes (located numerically).
// Throws std::invalid_argument on a zero total.
double imbalance_degree(const ClassCounts& counts);

enum class LearningMode { ThreeClass, TwoClass, Ineligible };

const char* to_string(LearningMode m);

struct BalanceThresholds {
    std::int64_t min_reports_per_class = 5;
    double max_degree = 1.8;
};

struct ImbalancePlan {
    ClassCounts counts;
    double degree = 0.0;
    std::vector<ValenceClass> present_classes;  // classes entering the learning step
    LearningMode mode = LearningMode::Ineligible;
    std::string reason;
};

// Three qualifying classes within the degree bound train three-class;
// exactly two qualifying classes train two-class; anything else is
// ineligible. Qualifying = count >= min_reports_per_class.
ImbalancePlan verify_classes(const ClassCounts& counts,
                             const BalanceThresholds& thresholds = {});

}  // namespace sxp
