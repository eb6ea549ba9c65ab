#include "doctest.h"
#include "smn/errors.hpp"
#include "smn/scenario.hpp"

using namespace smn;

namespace {

const char* kMinimalPcf = R"({
  "topology": { "cell_radius_m": 1200, "meter_count": 5 },
  "protocol": { "type": "pcf" },
  "duration_s": 1.0,
  "seed": 7
})";

}  // namespace

TEST_SUITE_BEGIN("scenario");

TEST_CASE("minimal scenario parses with defaults") {
    const Scenario s = parse_scenario_text(kMinimalPcf);
    CHECK(s.protocol == Protocol::Pcf);
    CHECK(s.seed == 7);
    CHECK(s.duration_ns == 1'000'000'000);
    CHECK(s.radio.bandwidth_hz == doctest::Approx(2e6));
    CHECK(s.fixed_rate_bps == doctest::Approx(1e5));
    const SimConfig cfg = build_sim_config(s);
    CHECK(cfg.topology.meter_count() == 5);
    for (const auto& p : cfg.topology.positions) CHECK(p.r_m <= 1200.0);
}

TEST_CASE("unknown keys are rejected everywhere") {
    CHECK_THROWS_AS(parse_scenario_text(R"({
      "topology": { "cell_radius_m": 1200, "meter_count": 5 },
      "protocol": { "type": "pcf" },
      "duration_s": 1.0,
      "bogus": 1
    })"),
                    ConfigError);
    CHECK_THROWS_AS(parse_scenario_text(R"({
      "topology": { "cell_radius_m": 1200, "meter_count": 5, "extra": 2 },
      "protocol": { "type": "pcf" },
      "duration_s": 1.0
    })"),
                    ConfigError);
    CHECK_THROWS_AS(parse_scenario_text(R"({
      "topology": { "cell_radius_m": 1200, "meter_count": 5 },
      "protocol": { "type": "dcf", "mac": { "slot_usec": 52 } },
      "duration_s": 1.0
    })"),
                    ConfigError);
    CHECK_THROWS_AS(parse_scenario_text(R"({
      "radio": { "tx_power_w": 1.0 },
      "topology": { "cell_radius_m": 1200, "meter_count": 5 },
      "protocol": { "type": "pcf" },
      "duration_s": 1.0
    })"),
                    ConfigError);
}

TEST_CASE("topology must be specified exactly one way") {
    CHECK_THROWS_AS(parse_scenario_text(R"({
      "topology": { "cell_radius_m": 1200 },
      "protocol": { "type": "pcf" },
      "duration_s": 1.0
    })"),
                    ConfigError);
    CHECK_THROWS_AS(parse_scenario_text(R"({
      "topology": { "cell_radius_m": 1200, "meter_count": 5,
                    "meter_density_per_km2": 1000 },
      "protocol": { "type": "pcf" },
      "duration_s": 1.0
    })"),
                    ConfigError);
}

TEST_CASE("dbm and dbw powers are interchangeable") {
    const Scenario dbm = parse_scenario_text(R"({
      "radio": { "tx_power_dbm": 30.0 },
      "topology": { "cell_radius_m": 1200, "meter_count": 1 },
      "protocol": { "type": "pcf" },
      "duration_s": 1.0
    })");
    CHECK(dbm.radio.tx_power_dbw == doctest::Approx(0.0));
    CHECK_THROWS_AS(parse_scenario_text(R"({
      "radio": { "tx_power_dbm": 30.0, "tx_power_dbw": 0.0 },
      "topology": { "cell_radius_m": 1200, "meter_count": 1 },
      "protocol": { "type": "pcf" },
      "duration_s": 1.0
    })"),
                    ConfigError);
}

TEST_CASE("explicit positions and joins build a combined topology") {
    const Scenario s = parse_scenario_text(R"({
      "topology": { "cell_radius_m": 1200,
                    "positions": [[400, 0.0], [800, 2.0]] },
      "protocol": { "type": "dcf" },
      "joins": [ { "meter": 2, "join_at_s": 5.0, "position": [600, 1.0] } ],
      "duration_s": 10.0
    })");
    const SimConfig cfg = build_sim_config(s);
    REQUIRE(cfg.topology.meter_count() == 3);
    CHECK(cfg.topology.positions[2].r_m == doctest::Approx(600.0));
    REQUIRE(cfg.joins.size() == 1);
    CHECK(cfg.joins[0].meter == 2);

    // wrong join index: must continue the base topology
    CHECK_THROWS_AS(build_sim_config(parse_scenario_text(R"({
      "topology": { "cell_radius_m": 1200, "positions": [[400, 0.0]] },
      "protocol": { "type": "dcf" },
      "joins": [ { "meter": 0, "join_at_s": 5.0, "position": [600, 1.0] } ],
      "duration_s": 10.0
    })")),
                    ConfigError);
}

TEST_CASE("traffic blocks: presets, selectors, and validation") {
    const Scenario s = parse_scenario_text(R"({
      "topology": { "cell_radius_m": 1200, "meter_count": 10 },
      "protocol": { "type": "pcf" },
      "traffic": [
        { "preset": "billing" },
        { "preset": "outage-alert", "meters": [1, 2] },
        { "kind": "periodic", "period_s": 60, "payload_bytes": 64,
          "priority": "high", "group": 0 }
      ],
      "duration_s": 1.0
    })");
    REQUIRE(s.traffic.size() == 3);
    CHECK(s.traffic[0].spec.kind == TrafficKind::Periodic);
    CHECK(s.traffic[0].target == TrafficBinding::Target::All);
    CHECK(s.traffic[1].spec.priority == Priority::High);
    CHECK(s.traffic[1].target == TrafficBinding::Target::Meters);
    CHECK(s.traffic[2].target == TrafficBinding::Target::Group);

    CHECK_THROWS_AS(parse_scenario_text(R"({
      "topology": { "cell_radius_m": 1200, "meter_count": 10 },
      "protocol": { "type": "pcf" },
      "traffic": [ { "preset": "unknown-preset" } ],
      "duration_s": 1.0
    })"),
                    ConfigError);
    CHECK_THROWS_AS(parse_scenario_text(R"({
      "topology": { "cell_radius_m": 1200, "meter_count": 10 },
      "protocol": { "type": "pcf" },
      "traffic": [ { "kind": "periodic", "period_s": 1, "payload_bytes": 10,
                     "jitter_s": 0.5 } ],
      "duration_s": 1.0
    })"),
                    ConfigError);
}

TEST_CASE("protocol blocks must match the selected type") {
    CHECK_THROWS_AS(parse_scenario_text(R"({
      "topology": { "cell_radius_m": 1200, "meter_count": 5 },
      "protocol": { "type": "dcf", "pcf": { "poll_order": "lcfs" } },
      "duration_s": 1.0
    })"),
                    ConfigError);
    // ppmac demands its block (zc_length has no sensible default)
    CHECK_THROWS_AS(parse_scenario_text(R"({
      "topology": { "cell_radius_m": 1200, "meter_count": 5 },
      "protocol": { "type": "ppmac" },
      "duration_s": 1.0
    })"),
                    ConfigError);
    CHECK_THROWS_AS(parse_scenario_text(R"({
      "topology": { "cell_radius_m": 1200, "meter_count": 5 },
      "protocol": { "type": "ppmac", "ppmac": { "zc_length": 21 } },
      "duration_s": 1.0
    })"),
                    ConfigError);  // 21 is not prime
}

TEST_CASE("edca keeps distinct class parameters, dcf collapses them") {
    const Scenario edca = parse_scenario_text(R"({
      "topology": { "cell_radius_m": 1200, "meter_count": 5 },
      "protocol": { "type": "edca" },
      "duration_s": 1.0
    })");
    CHECK(edca.mac.cw_min_high < edca.mac.cw_min_low);
    CHECK(edca.mac.aifs_high_ns < edca.mac.aifs_low_ns);

    const Scenario dcf = parse_scenario_text(R"({
      "topology": { "cell_radius_m": 1200, "meter_count": 5 },
      "protocol": { "type": "dcf" },
      "duration_s": 1.0
    })");
    CHECK(dcf.mac.cw_min_high == dcf.mac.cw_min_low);
    CHECK(dcf.mac.aifs_high_ns == dcf.mac.aifs_low_ns);
    CHECK(dcf.mac.aifs_low_ns == dcf.mac.difs_ns);
}

TEST_SUITE_END();
