#pragma once

#include <optional>
#include <string>

#include "smn/rng.hpp"
#include "smn/simengine.hpp"

namespace smn {

enum class Priority : std::uint8_t { High, Low };

const char* priority_name(Priority p);

enum class TrafficKind : std::uint8_t { Periodic, Poisson };

// One frame-arrival generator.  Periodic sources fire at
// offset + n*period + U(-jitter, +jitter); when no explicit offset is given
// each meter draws a random phase over one period so deployments do not
// synchronize artificially.  Poisson sources fire with exponential gaps.
struct TrafficSpec {
    TrafficKind kind = TrafficKind::Periodic;
    TimeNs period_ns = 0;
    std::optional<TimeNs> start_offset_ns;  // periodic; absent => random phase
    TimeNs jitter_ns = 0;
    double rate_per_s = 0.0;  // poisson
    int payload_bytes = 0;
    Priority priority = Priority::Low;
    std::string name;

    void validate() const;  // throws ConfigError
};

// Named defaults for the usual smart-meter traffic rows.  The numeric
// magnitudes are plumbing defaults, overridable in the scenario file:
//   billing          periodic 15 min / 200 B, low
//   demand-response  periodic  5 min / 100 B, low
//   pricing          periodic  5 min / 100 B, low
//   outage-alert     poisson 1e-4 /s / 100 B, high
//   ev-charging      poisson 1e-4 /s / 150 B, low
TrafficSpec traffic_preset(const std::string& name);  // throws UnknownPreset

// Stateful arrival iterator over one spec; each source owns its stream.
class TrafficSource {
public:
    TrafficSource(TrafficSpec spec, Rng stream, TimeNs start_ns);

    const TrafficSpec& spec() const { return spec_; }

    // Absolute time of the next frame after t_now (poisson) or of the next
    // point of the deterministic schedule (periodic).
    TimeNs next_arrival(TimeNs t_now);

private:
    TrafficSpec spec_;
    Rng rng_;
    TimeNs base_ns_;   // start time plus resolved phase offset
    long index_ = 0;   // periodic arrival counter
};

}  // namespace smn
