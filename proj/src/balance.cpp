#include "sxp/balance.hpp"

#include <cmath>
#include <stdexcept>

namespace sxp {

namespace {

constexpr double kThird = 1.0 / 3.0;

double dist_to_balanced(double p0, double p1, double p2) {
    return std::sqrt((p0 - kThird) * (p0 - kThird) + (p1 - kThird) * (p1 - kThird) +
                     (p2 - kThird) * (p2 - kThird));
}

int minority_count(double p0, double p1, double p2) {
    int m = 0;
    for (double p : {p0, p1, p2})
        if (p < kThird - 1e-12) ++m;
    return m;
}

// Most-distant distribution with exactly m minority classes, found by a
// refined grid search over the 2-simplex.
double iota_distance(int m) {
    double best_d = -1.0, best_p0 = kThird, best_p1 = kThird;
    double center0 = 0.5, center1 = 0.5, span = 0.5;  // search window
    int steps = 201;
    for (int round = 0; round < 7; ++round) {
        const double lo0 = std::max(0.0, center0 - span);
        const double hi0 = std::min(1.0, center0 + span);
        const double lo1 = std::max(0.0, center1 - span);
        const double hi1 = std::min(1.0, center1 + span);
        for (int i = 0; i < steps; ++i) {
            const double p0 = lo0 + (hi0 - lo0) * i / (steps - 1);
            for (int j = 0; j < steps; ++j) {
                const double p1 = lo1 + (hi1 - lo1) * j / (steps - 1);
                const double p2 = 1.0 - p0 - p1;
                if (p2 < 0.0) continue;
                if (minority_count(p0, p1, p2) != m) continue;
                const double d = dist_to_balanced(p0, p1, p2);
                if (d > best_d) {
                    best_d = d;
                    best_p0 = p0;
                    best_p1 = p1;
                }
            }
        }
        center0 = best_p0;
        center1 = best_p1;
        span /= 10.0;
    }
    return best_d;
}

}  // namespace

ClassCounts ClassCounts::from_labels(const std::vector<ValenceClass>& labels) {
    ClassCounts c;
    for (auto l : labels) ++c[l];
    return c;
}

double imbalance_degree(const ClassCounts& counts) {
    const std::int64_t total = counts.total();
    if (total <= 0) throw std::invalid_argument("imbalance degree needs a nonzero total");
    const double p0 = static_cast<double>(counts.counts[0]) / total;
    const double p1 = static_cast<double>(counts.counts[1]) / total;
    const double p2 = static_cast<double>(counts.counts[2]) / total;
    const int m = minority_count(p0, p1, p2);
    if (m == 0) return 0.0;  // nothing below 1/3 means exactly balanced

    static const double iota1 = iota_distance(1);
    static const double iota2 = iota_distance(2);
    const double iota = m == 1 ? iota1 : iota2;
    return (m - 1) + dist_to_balanced(p0, p1, p2) / iota;
}

const char* to_string(LearningMode m) {
    switch (m) {
        case LearningMode::ThreeClass: return "three_class";
        case LearningMode::TwoClass: return "two_class";
        case LearningMode::Ineligible: return "ineligible";
    }
    return "?";
}

ImbalancePlan verify_classes(const ClassCounts& counts, const BalanceThresholds& thresholds) {
    ImbalancePlan plan;
    plan.counts = counts;
    const std::int64_t total = counts.total();
    if (total == 0) {
        plan.mode = LearningMode::Ineligible;
        plan.reason = "no reports";
        return plan;
    }
    plan.degree = imbalance_degree(counts);

    std::vector<ValenceClass> qualifying;
    for (int i = 0; i < kNumValenceClasses; ++i)
        if (counts.counts[i] >= thresholds.min_reports_per_class)
            qualifying.push_back(static_cast<ValenceClass>(i));

    if (qualifying.size() == 3 && plan.degree <= thresholds.max_degree) {
        plan.mode = LearningMode::ThreeClass;
        plan.present_classes = qualifying;
        plan.reason = "three classes with enough reports";
    } else if (qualifying.size() == 2) {
        plan.mode = LearningMode::TwoClass;
        plan.present_classes = qualifying;
        plan.reason = "one class below the report minimum; training on the remaining two";
    } else if (qualifying.size() == 3) {
        plan.mode = LearningMode::Ineligible;
        plan.reason = "imbalance degree " + std::to_string(plan.degree) + " above limit " +
                      std::to_string(thresholds.max_degree);
    } else {
        plan.mode = LearningMode::Ineligible;
        plan.reason = "fewer than two classes reach the per-class report minimum";
    }
    return plan;
}

}  // namespace sxp
