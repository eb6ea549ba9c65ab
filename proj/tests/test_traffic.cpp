#include <cmath>
#include <limits>

#include "doctest.h"
#include "smn/errors.hpp"
#include "smn/rng.hpp"
#include "smn/traffic.hpp"

using namespace smn;

TEST_SUITE_BEGIN("traffic");

TEST_CASE("periodic arrivals without jitter are exact") {
    TrafficSpec spec;
    spec.kind = TrafficKind::Periodic;
    spec.period_ns = 15LL * 60 * 1'000'000'000;
    spec.start_offset_ns = 0;
    spec.payload_bytes = 200;
    RandomStreams streams{1};
    TrafficSource src(spec, streams.derive(StreamDomain::Traffic, 0), 0);
    TimeNs t = 0;
    for (int n = 0; n < 5; ++n) {
        const TimeNs a = src.next_arrival(t);
        CHECK(a == n * spec.period_ns);
        t = a;
    }
}

TEST_CASE("periodic arrivals with jitter stay ordered") {
    TrafficSpec spec;
    spec.kind = TrafficKind::Periodic;
    spec.period_ns = 1'000'000;
    spec.start_offset_ns = 0;
    spec.jitter_ns = 400'000;  // just under period/2
    spec.payload_bytes = 10;
    RandomStreams streams{3};
    TrafficSource src(spec, streams.derive(StreamDomain::Traffic, 0), 0);
    TimeNs prev = std::numeric_limits<TimeNs>::min();
    TimeNs t = 0;
    for (int n = 0; n < 10000; ++n) {
        const TimeNs a = src.next_arrival(t);
        CHECK(a > prev);
        prev = a;
        t = a;
    }
}

TEST_CASE("excessive jitter is rejected at validation") {
    TrafficSpec spec;
    spec.kind = TrafficKind::Periodic;
    spec.period_ns = 1'000'000;
    spec.jitter_ns = 500'000;  // = period/2
    spec.payload_bytes = 10;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("poisson arrival count concentrates around lambda*t") {
    TrafficSpec spec;
    spec.kind = TrafficKind::Poisson;
    spec.rate_per_s = 100.0;
    spec.payload_bytes = 10;
    RandomStreams streams{11};
    TrafficSource src(spec, streams.derive(StreamDomain::Traffic, 1), 0);
    const TimeNs horizon = 100LL * 1'000'000'000;  // lambda*t = 1e4
    long count = 0;
    TimeNs t = 0;
    for (;;) {
        t = src.next_arrival(t);
        if (t > horizon) break;
        ++count;
    }
    CHECK(std::abs(count - 10000.0) <= 3.0 * 100.0);
}

TEST_CASE("random phase offsets differ across meters") {
    TrafficSpec spec;
    spec.kind = TrafficKind::Periodic;
    spec.period_ns = 1'000'000'000;
    spec.payload_bytes = 10;  // no start_offset: random phase
    RandomStreams streams{5};
    TrafficSource a(spec, streams.derive(StreamDomain::Traffic, 0), 0);
    TrafficSource b(spec, streams.derive(StreamDomain::Traffic, 1), 0);
    TrafficSource a2(spec, streams.derive(StreamDomain::Traffic, 0), 0);
    const TimeNs fa = a.next_arrival(0);
    const TimeNs fb = b.next_arrival(0);
    CHECK(fa != fb);                 // streams never shared
    CHECK(fa == a2.next_arrival(0)); // deterministic per meter
    CHECK(fa >= 0);
    CHECK(fa < spec.period_ns);
}

TEST_CASE("presets") {
    CHECK(traffic_preset("billing").kind == TrafficKind::Periodic);
    CHECK(traffic_preset("billing").period_ns == 15LL * 60 * 1'000'000'000);
    CHECK(traffic_preset("billing").payload_bytes == 200);
    CHECK(traffic_preset("outage-alert").kind == TrafficKind::Poisson);
    CHECK(traffic_preset("outage-alert").priority == Priority::High);
    CHECK(traffic_preset("demand-response").kind == TrafficKind::Periodic);
    CHECK(traffic_preset("pricing").kind == TrafficKind::Periodic);
    CHECK(traffic_preset("ev-charging").kind == TrafficKind::Poisson);
    CHECK_THROWS_AS(traffic_preset("espresso"), UnknownPreset);
}

TEST_SUITE_END();
