#include <doctest.h>

#include <cmath>

#include "sxp/empathy.hpp"
#include "sxp/rng.hpp"

using namespace sxp;

namespace {

constexpr Instant kDay = 86400LL * 1000;

EmpathyState at(double score, Instant last, bool paused = false) {
    EmpathyState s;
    s.score = score;
    s.last_update = last;
    s.paused = paused;
    return s;
}

}  // namespace

TEST_CASE("one half-life halves the score exactly") {
    const auto next = advance(at(0.8, 0), kDay);
    CHECK(std::abs(next.score - 0.4) <= 1e-12);
    CHECK(next.last_update == kDay);
}

TEST_CASE("zero elapsed time changes nothing") {
    const auto next = advance(at(0.7, 500), 500);
    CHECK(next.score == 0.7);
}

TEST_CASE("paused decay uses a doubled half-life") {
    const auto next = advance(at(0.8, 0, true), kDay);
    CHECK(next.score == doctest::Approx(0.8 * std::exp2(-0.5)).epsilon(1e-12));
}

TEST_CASE("time moving backwards is an error") {
    CHECK_THROWS_AS(advance(at(0.5, 1000), 999), std::invalid_argument);
}

TEST_CASE("report boost clamps at one") {
    const auto next = on_report(at(0.99, 0), 0);
    CHECK(next.score == 1.0);
}

TEST_CASE("twenty instant reports saturate from zero") {
    EmpathyState s = at(0.0, 0);
    for (int i = 0; i < 20; ++i) s = on_report(s, 0);
    CHECK(s.score == 1.0);
}

TEST_CASE("periodic reports converge to the fixed point of the decay-boost map") {
    // s* = s*/2 + boost  =>  s* = 2 * boost = 0.1
    EmpathyState s = at(0.5, 0);
    Instant t = 0;
    for (int i = 0; i < 200; ++i) {
        t += kDay;
        s = on_report(s, t);
    }
    // independent iteration oracle on the scalar map
    double v = 0.5;
    for (int i = 0; i < 200; ++i) v = std::min(1.0, v / 2.0 + 0.05);
    CHECK(std::abs(s.score - v) <= 1e-12);
    CHECK(s.score == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("advance composes: stopping halfway changes nothing") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const double score = rng.uniform();
        const Instant t1 = static_cast<Instant>(rng.uniform(0, 3e8));
        const Instant t2 = t1 + static_cast<Instant>(rng.uniform(0, 3e8));
        const auto direct = advance(at(score, 0), t2);
        const auto stepped = advance(advance(at(score, 0), t1), t2);
        CHECK(std::abs(direct.score - stepped.score) <= 1e-12);
    }
}

TEST_CASE("score never leaves [0,1]; decay never raises, boosts never lower") {
    Rng rng(6);
    EmpathyState s = at(0.3, 0);
    Instant t = 0;
    for (int i = 0; i < 500; ++i) {
        t += static_cast<Instant>(rng.uniform(0, 2.0 * kDay));
        const double before = s.score;
        if (rng.uniform() < 0.5) {
            s = advance(s, t);
            CHECK(s.score <= before + 1e-15);
        } else {
            const double after_decay = advance(s, t).score;
            s = on_report(s, t);
            CHECK(s.score >= after_decay - 1e-15);
        }
        CHECK(s.score >= 0.0);
        CHECK(s.score <= 1.0);
    }
}
