#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "smn/errors.hpp"
#include "smn/rng.hpp"
#include "smn/simengine.hpp"

using namespace smn;

TEST_SUITE_BEGIN("simengine");

TEST_CASE("events pop in (time, seq) order") {
    Simulator sim;
    std::vector<int> order;
    sim.schedule(100, EventKind::Timer, 0, [&] { order.push_back(1); });
    sim.schedule(50, EventKind::Timer, 0, [&] { order.push_back(2); });
    sim.schedule(100, EventKind::Timer, 0, [&] { order.push_back(3); });
    sim.schedule(50, EventKind::Timer, 0, [&] { order.push_back(4); });
    sim.run_until(1000);
    CHECK(order == std::vector<int>{2, 4, 1, 3});
    CHECK(sim.now() == 1000);
}

TEST_CASE("scheduling at the current clock is legal, the past is not") {
    Simulator sim;
    int fired = 0;
    sim.schedule(10, EventKind::Timer, 0, [&] {
        CHECK(sim.now() == 10);
        sim.schedule(10, EventKind::Timer, 0, [&] { ++fired; });  // same instant
        CHECK_THROWS_AS(sim.schedule(9, EventKind::Timer, 0, [] {}), PastEvent);
    });
    sim.run_until(20);
    CHECK(fired == 1);
}

TEST_CASE("run_until stops before later events and ends at t_end") {
    Simulator sim;
    int fired = 0;
    sim.schedule(500, EventKind::Timer, 0, [&] { ++fired; });
    sim.run_until(100);
    CHECK(fired == 0);
    CHECK(sim.now() == 100);
    sim.run_until(600);
    CHECK(fired == 1);

    Simulator empty;
    empty.run_until(12345);
    CHECK(empty.now() == 12345);
}

TEST_CASE("cancel suppresses dispatch") {
    Simulator sim;
    int fired = 0;
    const auto seq = sim.schedule(10, EventKind::Timer, 0, [&] { ++fired; });
    sim.schedule(20, EventKind::Timer, 0, [&] { ++fired; });
    sim.cancel(seq);
    sim.run_until(100);
    CHECK(fired == 1);
}

TEST_CASE("identical seeds give identical dispatch traces") {
    auto trace = [](std::uint64_t seed) {
        Simulator sim;
        Rng rng(seed);
        std::vector<TimeNs> times;
        for (int i = 0; i < 200; ++i) {
            const TimeNs t = static_cast<TimeNs>(rng.uniform_below(1'000'000));
            sim.schedule(t, EventKind::Timer, 0, [&times, &sim] { times.push_back(sim.now()); });
        }
        sim.run_until(1'000'000);
        return times;
    };
    CHECK(trace(42) == trace(42));
    CHECK(trace(42) != trace(43));
}

TEST_CASE("topology sampling: count, density, radial law") {
    RandomStreams streams{7};
    Rng stream = streams.derive(StreamDomain::Topology);

    const auto empty = sample_topology_count(1200.0, 0, stream);
    CHECK(empty.meter_count() == 0);

    // density: round(rho * pi * R^2)
    Rng s2 = streams.derive(StreamDomain::Topology);
    const auto by_density = sample_topology_density(1200.0, 1e-3, s2);
    CHECK(by_density.meter_count() == 4524);

    Rng s3 = streams.derive(StreamDomain::Topology);
    const auto big = sample_topology_count(1200.0, 100'000, s3);
    double mean_r = 0.0;
    for (const auto& p : big.positions) {
        CHECK(p.r_m >= 0.0);
        CHECK(p.r_m <= 1200.0);
        mean_r += p.r_m;
    }
    mean_r /= static_cast<double>(big.meter_count());
    CHECK(mean_r == doctest::Approx(2.0 * 1200.0 / 3.0).epsilon(0.01));

    // Kolmogorov-Smirnov distance of the radial CDF against r^2/R^2
    std::vector<double> radii;
    radii.reserve(big.meter_count());
    for (const auto& p : big.positions) radii.push_back(p.r_m);
    std::sort(radii.begin(), radii.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double model = radii[i] * radii[i] / (1200.0 * 1200.0);
        const double hi = static_cast<double>(i + 1) / radii.size();
        const double lo = static_cast<double>(i) / radii.size();
        ks = std::max({ks, std::abs(model - hi), std::abs(model - lo)});
    }
    CHECK(ks < 0.01);
}

TEST_CASE("derived streams are independent of one another") {
    RandomStreams streams{123};
    Rng a = streams.derive(StreamDomain::MeterMac, 0);
    Rng b = streams.derive(StreamDomain::MeterMac, 1);
    Rng a2 = streams.derive(StreamDomain::MeterMac, 0);
    CHECK(a.next_u64() != b.next_u64());
    Rng a3 = streams.derive(StreamDomain::MeterMac, 0);
    CHECK(a2.next_u64() == a3.next_u64());
}

TEST_SUITE_END();
