#pragma once

// Group-comparison statistics: the Mann-Whitney U test (exact enumeration
// for small tie-free samples, tie-corrected normal approximation
// otherwise) and the five age/gender comparisons over per-entity valence
// measurements.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sxp/balance.hpp"
#include "sxp/types.hpp"

namespace sxp {

enum class TestMethod { Exact, NormalApprox };

struct TestResult {
    double u_statistic = 0.0;  // U of the first sample, midrank ties
    double p_value = 1.0;      // two-sided
    TestMethod method = TestMethod::Exact;
    double alpha = 0.05;
    bool h0_rejected = false;  // p_value < alpha
};

// |a| and |b| must be nonempty. Exact enumeration is used when
// |a|+|b| <= 16 and the pooled values are tie-free.
TestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b,
                          double alpha = 0.05);

struct GroupSpec {
    std::optional<int> age_split;  // default: median age of complete profiles
};

enum class MeasurementCoding {
    ClassProportions,  // three per-class proportions per entity
    SignedReports,     // -1/0/+1 per report
};

struct GroupComparisonRow {
    std::string label;
    std::size_t n_a = 0, n_b = 0;  // measurement counts
    TestResult result;
    bool skipped = false;
    std::string skip_reason;
};

struct GroupSummary {
    std::string label;  // e.g. "[18,34] female"
    std::size_t entities = 0;
    std::int64_t reports = 0;
    std::array<double, 3> class_pct{0, 0, 0};  // negative/neutral/positive
};

struct GroupComparison {
    int age_split = 0;
    std::vector<GroupComparisonRow> rows;     // the five comparisons
    std::vector<GroupSummary> summaries;      // per range x gender
    std::size_t excluded_entities = 0;        // missing age or gender
};

// Reports per entity are class counts; profiles supply age and gender.
GroupComparison compare_groups(const std::map<std::string, ClassCounts>& reports_per_entity,
                               const std::vector<EntityProfile>& profiles,
                               const GroupSpec& spec = {},
                               MeasurementCoding coding = MeasurementCoding::ClassProportions,
                               double alpha = 0.05);

}  // namespace sxp
