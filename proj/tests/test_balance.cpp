#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sxp/balance.hpp"
#include "sxp/rng.hpp"

using namespace sxp;

namespace {

ClassCounts counts(std::int64_t neg, std::int64_t neu, std::int64_t pos) {
    ClassCounts c;
    c.counts = {neg, neu, pos};
    return c;
}

int minority_classes(const ClassCounts& c) {
    const double total = static_cast<double>(c.total());
    int m = 0;
    for (auto v : c.counts)
        if (static_cast<double>(v) / total < 1.0 / 3.0 - 1e-12) ++m;
    return m;
}

}  // namespace

TEST_CASE("numeric iota maximization matches the closed forms") {
    // the grid oracle itself is validated against the analytic values
    CHECK(oracle::grid_iota_distance(1) ==
          doctest::Approx(std::sqrt(2.0) / 3.0).epsilon(1e-3));
    CHECK(oracle::grid_iota_distance(2) ==
          doctest::Approx(std::sqrt(6.0) / 3.0).epsilon(1e-3));
}

TEST_CASE("balanced distribution has degree exactly zero") {
    CHECK(imbalance_degree(counts(10, 10, 10)) == 0.0);
    CHECK(imbalance_degree(counts(7, 7, 7)) == 0.0);
}

TEST_CASE("one absent class lands in [0, 1)") {
    const double d = imbalance_degree(counts(0, 15, 15));
    CHECK(d >= 0.0);
    CHECK(d < 1.0);
    CHECK(minority_classes(counts(0, 15, 15)) == 1);
    // oracle value: (m-1) + d(p,e)/d(iota_m,e) with analytic iota distance
    const double dist = std::sqrt(3.0 * (1.0 / 3.0 - 0.0) * (1.0 / 3.0 - 0.0) / 2.0 +
                                  0.0);  // p = (0, .5, .5)
    const double expect =
        std::sqrt(std::pow(0 - 1.0 / 3, 2) + 2 * std::pow(0.5 - 1.0 / 3, 2)) /
        (std::sqrt(2.0) / 3.0);
    (void)dist;
    CHECK(d == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("two minority classes land in [1, 2)") {
    const double d = imbalance_degree(counts(1, 1, 98));
    CHECK(d >= 1.0);
    CHECK(d < 2.0);
    CHECK(minority_classes(counts(1, 1, 98)) == 2);
    const double p0 = 0.01, p2 = 0.98;
    const double expect =
        1.0 + std::sqrt(2 * std::pow(p0 - 1.0 / 3, 2) + std::pow(p2 - 1.0 / 3, 2)) /
                  (std::sqrt(6.0) / 3.0);
    CHECK(d == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("degree bracket property on random distributions") {
    Rng rng(13);
    for (int t = 0; t < 200; ++t) {
        const ClassCounts c = counts(rng.uniform_int(0, 100), rng.uniform_int(0, 100),
                                     rng.uniform_int(0, 100));
        if (c.total() == 0) continue;
        const int m = minority_classes(c);
        const double d = imbalance_degree(c);
        if (m == 0) {
            CHECK(d == 0.0);
        } else {
            CHECK(d >= static_cast<double>(m - 1));
            CHECK(d < static_cast<double>(m));
        }
    }
}

TEST_CASE("degree is permutation- and scale-invariant") {
    const double base = imbalance_degree(counts(5, 20, 75));
    CHECK(imbalance_degree(counts(75, 5, 20)) == doctest::Approx(base).epsilon(1e-12));
    CHECK(imbalance_degree(counts(20, 75, 5)) == doctest::Approx(base).epsilon(1e-12));
    CHECK(imbalance_degree(counts(50, 200, 750)) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("degree grows toward the simplex vertex") {
    // walk from balanced toward (0, 0, 1)
    double prev = -1.0;
    for (int step = 0; step <= 8; ++step) {
        const double a = 1.0 / 3.0 * (1.0 - step / 10.0);
        const auto c = counts(static_cast<std::int64_t>(a * 9000),
                              static_cast<std::int64_t>(a * 9000),
                              static_cast<std::int64_t>((1.0 - 2 * a) * 9000));
        const double d = imbalance_degree(c);
        CHECK(d > prev);
        prev = d;
    }
}

TEST_CASE("degree errors on an empty distribution") {
    CHECK_THROWS_AS(imbalance_degree(counts(0, 0, 0)), std::invalid_argument);
}

TEST_CASE("verify_classes: three healthy classes") {
    const auto plan = verify_classes(counts(50, 50, 50), {5, 1.8});
    CHECK(plan.mode == LearningMode::ThreeClass);
    CHECK(plan.present_classes.size() == 3);
    CHECK(!plan.reason.empty());
    CHECK(plan.degree == 0.0);
}

TEST_CASE("verify_classes: one absent class trains two-class") {
    const auto plan = verify_classes(counts(0, 40, 60), {5, 1.8});
    CHECK(plan.mode == LearningMode::TwoClass);
    REQUIRE(plan.present_classes.size() == 2);
    CHECK(plan.present_classes[0] == ValenceClass::Neutral);
    CHECK(plan.present_classes[1] == ValenceClass::Positive);
}

TEST_CASE("verify_classes: two absent classes are ineligible") {
    const auto plan = verify_classes(counts(0, 0, 100), {5, 1.8});
    CHECK(plan.mode == LearningMode::Ineligible);
    CHECK(!plan.reason.empty());
}

TEST_CASE("verify_classes: excessive imbalance degree gates out") {
    // all classes above the minimum but heavily skewed
    const auto plan = verify_classes(counts(5, 5, 990), {5, 1.2});
    CHECK(imbalance_degree(counts(5, 5, 990)) > 1.2);
    CHECK(plan.mode == LearningMode::Ineligible);
    CHECK(plan.reason.find("degree") != std::string::npos);
}

TEST_CASE("verify_classes: below-minimum class demotes to two-class") {
    const auto plan = verify_classes(counts(3, 40, 60), {5, 1.8});
    CHECK(plan.mode == LearningMode::TwoClass);
    REQUIRE(plan.present_classes.size() == 2);
}

TEST_CASE("verify_classes: empty counts") {
    const auto plan = verify_classes(counts(0, 0, 0), {5, 1.8});
    CHECK(plan.mode == LearningMode::Ineligible);
    CHECK(plan.reason == "no reports");
}

TEST_CASE("verify_classes: deterministic and total over random inputs") {
    Rng rng(29);
    for (int t = 0; t < 300; ++t) {
        const auto c = counts(rng.uniform_int(0, 30), rng.uniform_int(0, 30),
                              rng.uniform_int(0, 30));
        const auto a = verify_classes(c, {5, 1.8});
        const auto b = verify_classes(c, {5, 1.8});
        CHECK(a.mode == b.mode);
        if (a.mode == LearningMode::ThreeClass)
            for (auto v : c.counts) CHECK(v >= 5);
        if (a.mode == LearningMode::Ineligible) CHECK(!a.reason.empty());
        if (a.mode == LearningMode::TwoClass) CHECK(a.present_classes.size() == 2);
    }
}
