#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sxp/rng.hpp"
#include "sxp/stats.hpp"

using namespace sxp;

namespace {

EntityProfile profile(const std::string& id, int age, Gender g) {
    EntityProfile p;
    p.entity_id = id;
    p.age_years = age;
    p.gender = g;
    return p;
}

ClassCounts counts(std::int64_t a, std::int64_t b, std::int64_t c) {
    ClassCounts out;
    out.counts = {a, b, c};
    return out;
}

}  // namespace

TEST_CASE("identical samples give U = nm/2") {
    const std::vector<double> a = {1, 2, 3, 4};
    const auto r = mann_whitney_u(a, a);
    CHECK(r.u_statistic == doctest::Approx(8.0));  // 4*4/2
    CHECK(r.p_value > 0.9);
    CHECK(!r.h0_rejected);
}

TEST_CASE("fully separated small samples: exact two-sided p = 0.1") {
    const auto r = mann_whitney_u({1, 2, 3}, {4, 5, 6});
    CHECK(r.method == TestMethod::Exact);
    CHECK(r.u_statistic == 0.0);
    CHECK(r.p_value == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(!r.h0_rejected);  // 0.1 >= 0.05
}

TEST_CASE("swapping samples preserves p and mirrors U") {
    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> a, b;
        const int n = rng.uniform_int(2, 9), m = rng.uniform_int(2, 9);
        for (int i = 0; i < n; ++i) a.push_back(rng.uniform());
        for (int i = 0; i < m; ++i) b.push_back(rng.uniform());
        const auto ab = mann_whitney_u(a, b);
        const auto ba = mann_whitney_u(b, a);
        CHECK(ab.p_value == doctest::Approx(ba.p_value).epsilon(1e-12));
        CHECK(ab.u_statistic ==
              doctest::Approx(static_cast<double>(n) * m - ba.u_statistic));
        CHECK(ab.method == ba.method);
    }
}

TEST_CASE("exact p matches the enumeration oracle for all small tie-free draws") {
    Rng rng(7);
    for (int t = 0; t < 300; ++t) {
        const int n = rng.uniform_int(1, 6), m = rng.uniform_int(1, 6);
        std::vector<double> a, b;
        for (int i = 0; i < n; ++i) a.push_back(rng.uniform());
        for (int i = 0; i < m; ++i) b.push_back(rng.uniform());
        const auto r = mann_whitney_u(a, b);
        REQUIRE(r.method == TestMethod::Exact);
        const double oracle_p = oracle::enumerate_mwu_p(a, b);
        CHECK(std::abs(r.p_value - oracle_p) <= 1e-12);
    }
}

TEST_CASE("ties or large samples fall back to the normal approximation") {
    const auto tied = mann_whitney_u({1, 1, 2}, {2, 3, 4});
    CHECK(tied.method == TestMethod::NormalApprox);
    std::vector<double> big_a, big_b;
    for (int i = 0; i < 12; ++i) big_a.push_back(i * 1.1);
    for (int i = 0; i < 12; ++i) big_b.push_back(i * 1.3 + 0.05);
    CHECK(mann_whitney_u(big_a, big_b).method == TestMethod::NormalApprox);
}

TEST_CASE("midrank tie handling keeps U symmetric around nm/2") {
    const std::vector<double> a = {1, 2, 2, 3};
    const std::vector<double> b = {2, 2, 4, 5};
    const auto ab = mann_whitney_u(a, b);
    const auto ba = mann_whitney_u(b, a);
    CHECK(ab.u_statistic + ba.u_statistic == doctest::Approx(16.0));
}

TEST_CASE("exact and normal p agree within 0.02 on tie-free 8+8 samples") {
    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> a, b;
        for (int i = 0; i < 8; ++i) a.push_back(rng.normal());
        for (int i = 0; i < 8; ++i) b.push_back(rng.normal() + rng.uniform(-0.5, 0.5));
        const auto exact = mann_whitney_u(a, b);
        REQUIRE(exact.method == TestMethod::Exact);
        // force the approximation path by inflating the sample with itself:
        // instead evaluate the approximation formula on the same data via a
        // 17-element padding-free trick is not possible, so compare the
        // exact p against the oracle-computed normal approximation here.
        const double nm = 64.0;
        const double mu = nm / 2.0;
        const double sigma = std::sqrt(nm * 17.0 / 12.0);
        const double u = exact.u_statistic;
        if (u != mu) {
            const double cc = u > mu ? -0.5 : 0.5;
            const double z = (u - mu + cc) / sigma;
            const double p_norm = std::erfc(std::abs(z) / std::sqrt(2.0));
            CHECK(std::abs(exact.p_value - std::min(1.0, p_norm)) <= 0.02);
        }
    }
}

TEST_CASE("U is invariant under strictly monotone transforms") {
    Rng rng(13);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> a, b;
        for (int i = 0; i < 6; ++i) a.push_back(rng.uniform(0.1, 5.0));
        for (int i = 0; i < 7; ++i) b.push_back(rng.uniform(0.1, 5.0));
        const auto base = mann_whitney_u(a, b);
        auto fa = a, fb = b;
        for (auto& v : fa) v = std::exp(v) + v * v * v;
        for (auto& v : fb) v = std::exp(v) + v * v * v;
        const auto mapped = mann_whitney_u(fa, fb);
        CHECK(base.u_statistic == mapped.u_statistic);
        CHECK(base.p_value == doctest::Approx(mapped.p_value).epsilon(1e-12));
    }
}

TEST_CASE("empty samples are rejected") {
    CHECK_THROWS_AS(mann_whitney_u({}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(mann_whitney_u({1.0}, {}), std::invalid_argument);
}

TEST_CASE("disjoint group distributions are detected") {
    std::vector<double> lo, hi;
    for (int i = 0; i < 10; ++i) {
        lo.push_back(i * 0.01);
        hi.push_back(1.0 + i * 0.01);
    }
    const auto r = mann_whitney_u(lo, hi);
    CHECK(r.h0_rejected);
    CHECK(r.p_value < 0.001);
}

TEST_CASE("compare_groups: five comparison rows with the range/gender structure") {
    std::vector<EntityProfile> profiles;
    std::map<std::string, ClassCounts> reports;
    Rng rng(17);
    for (int i = 0; i < 24; ++i) {
        const std::string id = "e" + std::to_string(i);
        const int age = 20 + i * 2;  // split lands at the median
        const Gender g = i % 2 == 0 ? Gender::Female : Gender::Male;
        profiles.push_back(profile(id, age, g));
        reports[id] = counts(rng.uniform_int(5, 30), rng.uniform_int(5, 30),
                             rng.uniform_int(5, 30));
    }
    const auto cmp = compare_groups(reports, profiles);
    REQUIRE(cmp.rows.size() == 5);
    for (const auto& row : cmp.rows) {
        CHECK(!row.skipped);
        CHECK(row.n_a > 0);
        CHECK(row.n_b > 0);
    }
    CHECK(cmp.summaries.size() == 4);
    for (const auto& s : cmp.summaries) {
        if (s.reports == 0) continue;
        CHECK(s.class_pct[0] + s.class_pct[1] + s.class_pct[2] ==
              doctest::Approx(100.0).epsilon(1e-9));
    }
}

TEST_CASE("compare_groups: identical distributions rarely reject") {
    Rng rng(19);
    int total_tests = 0, rejections = 0;
    for (int run = 0; run < 40; ++run) {
        std::vector<EntityProfile> profiles;
        std::map<std::string, ClassCounts> reports;
        for (int i = 0; i < 20; ++i) {
            const std::string id = "r" + std::to_string(run) + "e" + std::to_string(i);
            profiles.push_back(profile(id, rng.uniform_int(18, 70),
                                       i % 2 == 0 ? Gender::Female : Gender::Male));
            // same generating distribution for everyone
            ClassCounts c;
            for (int k = 0; k < 60; ++k) ++c.counts[rng.uniform_int(0, 2)];
            reports[id] = c;
        }
        const auto cmp = compare_groups(reports, profiles);
        for (const auto& row : cmp.rows) {
            if (row.skipped) continue;
            ++total_tests;
            if (row.result.h0_rejected) ++rejections;
        }
    }
    REQUIRE(total_tests >= 150);
    // under H0 at alpha=0.05, rejections should stay rare
    CHECK(static_cast<double>(rejections) / total_tests <= 0.05 + 0.04);
}

TEST_CASE("compare_groups: disjoint group behaviours are rejected") {
    std::vector<EntityProfile> profiles;
    std::map<std::string, ClassCounts> reports;
    for (int i = 0; i < 10; ++i) {
        const std::string young = "y" + std::to_string(i);
        profiles.push_back(profile(young, 20 + (i % 5), Gender::Female));
        reports[young] = counts(90 + i, 5, 5);  // overwhelmingly negative
        const std::string old = "o" + std::to_string(i);
        profiles.push_back(profile(old, 50 + (i % 5), Gender::Female));
        reports[old] = counts(5, 5, 90 + i);  // overwhelmingly positive
    }
    const auto cmp = compare_groups(reports, profiles);
    CHECK(!cmp.rows[0].skipped);
    CHECK(cmp.rows[0].result.h0_rejected);  // age ranges differ
    CHECK(!cmp.rows[1].skipped);
    CHECK(cmp.rows[1].result.h0_rejected);  // female split differs
}

TEST_CASE("compare_groups: incomplete demographics are excluded and counted") {
    std::vector<EntityProfile> profiles;
    std::map<std::string, ClassCounts> reports;
    for (int i = 0; i < 8; ++i) {
        const std::string id = "e" + std::to_string(i);
        profiles.push_back(profile(id, 20 + i * 5, i % 2 ? Gender::Female : Gender::Male));
        reports[id] = counts(10, 10, 10);
    }
    EntityProfile no_age;
    no_age.entity_id = "no_age";
    no_age.gender = Gender::Female;
    profiles.push_back(no_age);
    EntityProfile no_gender;
    no_gender.entity_id = "no_gender";
    no_gender.age_years = 40;
    profiles.push_back(no_gender);
    reports["no_age"] = counts(5, 5, 5);
    reports["no_gender"] = counts(5, 5, 5);

    const auto cmp = compare_groups(reports, profiles);
    CHECK(cmp.excluded_entities == 2);
}

TEST_CASE("compare_groups: empty group rows are skipped with a reason") {
    std::vector<EntityProfile> profiles;
    std::map<std::string, ClassCounts> reports;
    for (int i = 0; i < 6; ++i) {  // all male: female rows must be skipped
        const std::string id = "e" + std::to_string(i);
        profiles.push_back(profile(id, 20 + i * 6, Gender::Male));
        reports[id] = counts(10, 10, 10);
    }
    const auto cmp = compare_groups(reports, profiles);
    REQUIRE(cmp.rows.size() == 5);
    CHECK(!cmp.rows[0].skipped);  // age ranges still comparable
    CHECK(cmp.rows[1].skipped);   // female vs female
    CHECK(!cmp.rows[1].skip_reason.empty());
}

TEST_CASE("compare_groups: signed-report coding is available") {
    std::vector<EntityProfile> profiles;
    std::map<std::string, ClassCounts> reports;
    for (int i = 0; i < 8; ++i) {
        const std::string id = "e" + std::to_string(i);
        profiles.push_back(profile(id, 20 + i * 5, i % 2 ? Gender::Female : Gender::Male));
        reports[id] = counts(4, 4, 4);
    }
    const auto cmp = compare_groups(reports, profiles, {}, MeasurementCoding::SignedReports);
    // each entity contributes one value per report now
    CHECK(cmp.rows[0].n_a + cmp.rows[0].n_b == 8 * 12);
}
