#include "sxp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sxp {

namespace {

constexpr int kExactLimit = 16;  // pooled size bound for exact enumeration

double normal_sf_two_sided(double z_abs) {
    return std::erfc(z_abs / std::sqrt(2.0));  // 2 * (1 - Phi(|z|))
}

// Midranks over the pooled sample; returns (rank sum of a, tie groups).
std::pair<double, std::vector<int>> rank_sum_first(const std::vector<double>& a,
                                                   const std::vector<double>& b) {
    struct Tagged {
        double value;
        bool first;
    };
    std::vector<Tagged> pooled;
    pooled.reserve(a.size() + b.size());
    for (double v : a) pooled.push_back({v, true});
    for (double v : b) pooled.push_back({v, false});
    std::sort(pooled.begin(), pooled.end(),
              [](const Tagged& x, const Tagged& y) { return x.value < y.value; });

    double r_a = 0.0;
    std::vector<int> tie_groups;
    std::size_t i = 0;
    while (i < pooled.size()) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j].value == pooled[i].value) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (std::size_t t = i; t < j; ++t)
            if (pooled[t].first) r_a += midrank;
        tie_groups.push_back(static_cast<int>(j - i));
        i = j;
    }
    return {r_a, tie_groups};
}

// P(U <= u) under the exact tie-free null for first-sample size n out of N.
double exact_cdf(int n, int N, double u) {
    const int m = N - n;
    const int max_sum = N * (N + 1) / 2;
    // count[k][s]: subsets of size k of ranks 1..N with rank sum s
    std::vector<std::vector<double>> count(
        static_cast<std::size_t>(n + 1), std::vector<double>(static_cast<std::size_t>(max_sum + 1), 0.0));
    count[0][0] = 1.0;
    for (int rank = 1; rank <= N; ++rank)
        for (int k = std::min(rank, n); k >= 1; --k)
            for (int s = max_sum; s >= rank; --s)
                if (count[k - 1][s - rank] > 0.0) count[k][s] += count[k - 1][s - rank];

    double total = 0.0, below = 0.0;
    const int offset = n * (n + 1) / 2;  // U = rank sum - offset
    for (int s = 0; s <= max_sum; ++s) {
        if (count[n][s] == 0.0) continue;
        total += count[n][s];
        if (static_cast<double>(s - offset) <= u + 1e-9) below += count[n][s];
    }
    (void)m;
    return below / total;
}

}  // namespace

TestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b,
                          double alpha) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("Mann-Whitney U needs nonempty samples");
    const int n = static_cast<int>(a.size());
    const int m = static_cast<int>(b.size());
    const int N = n + m;

    const auto [r_a, tie_groups] = rank_sum_first(a, b);
    const double u_a = r_a - n * (n + 1) / 2.0;
    const double nm = static_cast<double>(n) * m;

    TestResult out;
    out.u_statistic = u_a;
    out.alpha = alpha;

    const bool tie_free =
        std::all_of(tie_groups.begin(), tie_groups.end(), [](int t) { return t == 1; });
    if (N <= kExactLimit && tie_free) {
        out.method = TestMethod::Exact;
        const double u_min = std::min(u_a, nm - u_a);
        out.p_value = std::min(1.0, 2.0 * exact_cdf(n, N, u_min));
    } else {
        out.method = TestMethod::NormalApprox;
        const double mu = nm / 2.0;
        double tie_term = 0.0;
        for (int t : tie_groups) tie_term += static_cast<double>(t) * t * t - t;
        const double sigma2 =
            nm / 12.0 * ((N + 1) - tie_term / (static_cast<double>(N) * (N - 1)));
        if (sigma2 <= 0.0 || u_a == mu) {
            out.p_value = 1.0;
        } else {
            const double cc = u_a > mu ? -0.5 : 0.5;  // continuity, toward the mean
            const double z = (u_a - mu + cc) / std::sqrt(sigma2);
            out.p_value = std::min(1.0, normal_sf_two_sided(std::abs(z)));
        }
    }
    out.h0_rejected = out.p_value < alpha;
    return out;
}

namespace {

struct EntityMeasure {
    int age = 0;
    Gender gender = Gender::Other;
    ClassCounts counts;
};

void append_measurements(std::vector<double>& out, const EntityMeasure& e,
                         MeasurementCoding coding) {
    const std::int64_t total = e.counts.total();
    if (total == 0) return;
    if (coding == MeasurementCoding::ClassProportions) {
        for (int c = 0; c < kNumValenceClasses; ++c)
            out.push_back(static_cast<double>(e.counts.counts[c]) / total);
    } else {
        for (std::int64_t i = 0; i < e.counts.counts[0]; ++i) out.push_back(-1.0);
        for (std::int64_t i = 0; i < e.counts.counts[1]; ++i) out.push_back(0.0);
        for (std::int64_t i = 0; i < e.counts.counts[2]; ++i) out.push_back(1.0);
    }
}

GroupComparisonRow compare_row(const std::string& label, const std::vector<double>& a,
                               const std::vector<double>& b, double alpha) {
    GroupComparisonRow row;
    row.label = label;
    row.n_a = a.size();
    row.n_b = b.size();
    if (a.empty() || b.empty()) {
        row.skipped = true;
        row.skip_reason = "a group has no measurements";
        return row;
    }
    row.result = mann_whitney_u(a, b, alpha);
    return row;
}

}  // namespace

GroupComparison compare_groups(const std::map<std::string, ClassCounts>& reports_per_entity,
                               const std::vector<EntityProfile>& profiles,
                               const GroupSpec& spec, MeasurementCoding coding,
                               double alpha) {
    GroupComparison out;

    std::vector<EntityMeasure> entities;
    int age_min = 0, age_max = 0;
    std::vector<int> ages;
    for (const auto& p : profiles) {
        if (!p.demographics_complete()) {
            ++out.excluded_entities;
            continue;
        }
        EntityMeasure e;
        e.age = *p.age_years;
        e.gender = *p.gender;
        auto it = reports_per_entity.find(p.entity_id);
        if (it != reports_per_entity.end()) e.counts = it->second;
        ages.push_back(e.age);
        entities.push_back(e);
    }
    if (ages.empty()) {
        out.rows.assign(5, GroupComparisonRow{"", 0, 0, {}, true, "no entities with demographics"});
        return out;
    }
    std::sort(ages.begin(), ages.end());
    age_min = ages.front();
    age_max = ages.back();
    out.age_split = spec.age_split.value_or(ages[(ages.size() - 1) / 2]);

    const std::string r1 = "[" + std::to_string(age_min) + "," + std::to_string(out.age_split) + "]";
    const std::string r2 = "(" + std::to_string(out.age_split) + "," + std::to_string(age_max) + "]";

    auto in_r1 = [&](const EntityMeasure& e) { return e.age <= out.age_split; };
    auto gather = [&](auto pred) {
        std::vector<double> v;
        for (const auto& e : entities)
            if (pred(e)) append_measurements(v, e, coding);
        return v;
    };

    const auto r1_all = gather([&](const EntityMeasure& e) { return in_r1(e); });
    const auto r2_all = gather([&](const EntityMeasure& e) { return !in_r1(e); });
    const auto r1_f = gather([&](const EntityMeasure& e) {
        return in_r1(e) && e.gender == Gender::Female;
    });
    const auto r2_f = gather([&](const EntityMeasure& e) {
        return !in_r1(e) && e.gender == Gender::Female;
    });
    const auto r1_m = gather([&](const EntityMeasure& e) {
        return in_r1(e) && e.gender == Gender::Male;
    });
    const auto r2_m = gather([&](const EntityMeasure& e) {
        return !in_r1(e) && e.gender == Gender::Male;
    });

    out.rows.push_back(compare_row(r1 + " vs " + r2, r1_all, r2_all, alpha));
    out.rows.push_back(compare_row(r1 + " female vs " + r2 + " female", r1_f, r2_f, alpha));
    out.rows.push_back(compare_row(r1 + " male vs " + r2 + " male", r1_m, r2_m, alpha));
    out.rows.push_back(compare_row(r1 + " female vs " + r1 + " male", r1_f, r1_m, alpha));
    out.rows.push_back(compare_row(r2 + " female vs " + r2 + " male", r2_f, r2_m, alpha));

    for (int range = 0; range < 2; ++range) {
        for (Gender g : {Gender::Female, Gender::Male}) {
            GroupSummary s;
            s.label = (range == 0 ? r1 : r2) + " " + to_string(g);
            ClassCounts agg;
            for (const auto& e : entities) {
                if (in_r1(e) != (range == 0) || e.gender != g) continue;
                ++s.entities;
                for (int c = 0; c < kNumValenceClasses; ++c)
                    agg.counts[c] += e.counts.counts[c];
            }
            s.reports = agg.total();
            if (s.reports > 0)
                for (int c = 0; c < kNumValenceClasses; ++c)
                    s.class_pct[c] = 100.0 * agg.counts[c] / static_cast<double>(s.reports);
            out.summaries.push_back(std::move(s));
        }
    }
    return out;
}

}  // namespace sxp
