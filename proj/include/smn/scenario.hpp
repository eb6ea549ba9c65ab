#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smn/macproto.hpp"

namespace smn {

// A parsed scenario file.  The JSON schema is strict: unknown keys are
// rejected at every level so parameter typos fail loudly (exit code 2).
struct Scenario {
    RadioParams radio;
    SensingMode sensing_mode = SensingMode::PairwiseRange;
    double fixed_rate_bps = 1e5;  // 0 => per-distance rate
    Protocol protocol = Protocol::Dcf;
    MacTimingParams mac;
    PcfParams pcf;
    QdcfParams qdcf;
    PpmacParams ppmac;

    enum class TopoSpec : std::uint8_t { Density, Count, Positions };
    TopoSpec topo_spec = TopoSpec::Density;
    double cell_radius_m = 1200.0;
    double density_per_km2 = 1000.0;
    int meter_count = 0;
    std::vector<MeterPosition> explicit_positions;
    std::vector<MeterPosition> join_positions;  // appended after base meters

    std::vector<TrafficBinding> traffic;
    std::vector<FaultScript> faults;
    std::vector<JoinScript> joins;

    TimeNs duration_ns = 0;
    std::uint64_t seed = 1;
};

Scenario parse_scenario_text(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

// Analyze-command config: radio parameters plus the meter density.
struct AnalyzeConfig {
    RadioParams radio;
    double density_per_km2 = 1000.0;
};
AnalyzeConfig parse_analyze_config_text(const std::string& json_text);
AnalyzeConfig load_analyze_config_file(const std::string& path);

// Samples the topology when given as a density or count (stream derived from
// the scenario seed) and assembles the runnable configuration.
SimConfig build_sim_config(const Scenario& scenario);

}  // namespace smn
