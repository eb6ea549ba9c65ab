#include "doctest.h"
#include "smn/errors.hpp"
#include "smn/metrics.hpp"

using namespace smn;

TEST_SUITE_BEGIN("metrics");

TEST_CASE("jain index") {
    CHECK(jain_index({5, 5, 5, 5}) == doctest::Approx(1.0));
    CHECK(jain_index({1, 0, 0, 0}) == doctest::Approx(0.25));
    CHECK(jain_index({2, 1}) == doctest::Approx(0.9));
    CHECK_THROWS_AS(jain_index({0, 0, 0}), AllZero);
    CHECK_THROWS_AS(jain_index({}), AllZero);
    CHECK_THROWS_AS(jain_index({1.0, -2.0}), DomainError);

    // scale invariance
    const double base = jain_index({3, 7, 1, 9});
    CHECK(jain_index({30, 70, 10, 90}) == doctest::Approx(base));
    CHECK(jain_index({0.3, 0.7, 0.1, 0.9}) == doctest::Approx(base));
}

TEST_CASE("delay accounting and percentile ordering") {
    Metrics m;
    m.set_meter_count(2);
    m.on_generated(0, Priority::Low, 0);
    m.on_completed(0, Priority::Low, 0, 5'000'000, 100);  // 5 ms
    for (int i = 1; i <= 100; ++i) m.on_generated(1, Priority::High, 5'000'000 + i);
    for (int i = 1; i <= 100; ++i)
        m.on_completed(1, Priority::High, 6'000'000, 6'000'000 + i * 1000, 50);
    const auto r = m.finalize(10'000'000, 0);
    REQUIRE(r.delay_all.has_value());
    CHECK(r.delay_all->count == 101);
    REQUIRE(r.delay_low.has_value());
    CHECK(r.delay_low->p50_ns == 5'000'000);
    REQUIRE(r.delay_high.has_value());
    CHECK(r.delay_high->p50_ns <= r.delay_high->p95_ns);
    CHECK(r.delay_high->p95_ns <= r.delay_high->p99_ns);
    CHECK(r.delay_high->p99_ns <= r.delay_high->max_ns);
    CHECK(r.delay_high->p50_ns == 50'000);
    CHECK(r.delay_high->p95_ns == 95'000);
    CHECK(r.delay_high->p99_ns == 99'000);
    CHECK(r.delay_high->max_ns == 100'000);
}

TEST_CASE("dropped frames are counted but not in delay stats") {
    Metrics m;
    m.set_meter_count(1);
    m.on_generated(0, Priority::Low, 0);
    m.on_generated(0, Priority::Low, 10);
    m.on_completed(0, Priority::Low, 0, 1000, 10);
    m.on_dropped(0, Priority::Low, 2000);
    const auto r = m.finalize(10'000, 0);
    CHECK(r.delivered == 1);
    CHECK(r.dropped == 1);
    CHECK(r.delay_all->count == 1);
}

TEST_CASE("out-of-order events are rejected") {
    Metrics m;
    m.set_meter_count(1);
    m.on_generated(0, Priority::Low, 1000);
    CHECK_THROWS_AS(m.on_generated(0, Priority::Low, 500), OutOfOrder);
}

TEST_CASE("conservation is enforced at finalize") {
    Metrics m;
    m.set_meter_count(1);
    m.on_generated(0, Priority::Low, 0);
    m.on_generated(0, Priority::Low, 1);
    m.on_completed(0, Priority::Low, 0, 10, 10);
    CHECK_THROWS_AS(m.finalize(1000, 0), InvariantViolation);  // one frame lost
    CHECK_NOTHROW(m.finalize(1000, 1));                        // still queued
}

TEST_CASE("zero-traffic run finalizes cleanly") {
    Metrics m;
    m.set_meter_count(3);
    const auto r = m.finalize(1'000'000, 0);
    CHECK(r.generated == 0);
    CHECK_FALSE(r.delay_all.has_value());
    CHECK_FALSE(r.jain_index.has_value());
    CHECK(r.collision_ratio == 0.0);
}

TEST_CASE("collision ratio counts retries as attempts") {
    Metrics m;
    m.set_meter_count(1);
    m.on_generated(0, Priority::Low, 0);
    m.on_attempt(0, 10, AttemptOutcome::Collision);
    m.on_attempt(0, 20, AttemptOutcome::Collision);
    m.on_attempt(0, 30, AttemptOutcome::Success);
    m.on_completed(0, Priority::Low, 0, 30, 10);
    const auto r = m.finalize(100, 0);
    CHECK(r.attempts == 3);
    CHECK(r.collisions == 2);
    CHECK(r.collision_ratio == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("cycle and busy accounting") {
    Metrics m;
    m.set_meter_count(1);
    CycleRecord c;
    c.index = 0;
    c.start_ns = 0;
    c.length_ns = 500;
    m.on_cycle(c);
    c.index = 1;
    c.start_ns = 500;
    c.length_ns = 700;
    m.on_cycle(c);
    m.add_busy_interval(0, 250);
    m.add_busy_interval(600, 850);
    const auto r = m.finalize(1000, 0);
    REQUIRE(r.cycles.has_value());
    CHECK(r.cycles->count == 2);
    CHECK(r.cycles->min_ns == 500);
    CHECK(r.cycles->max_ns == 700);
    CHECK(r.cycles->mean_ns == doctest::Approx(600.0));
    CHECK(r.airtime_utilization == doctest::Approx(0.5));
}

TEST_SUITE_END();
