#include "smn/traffic.hpp"

#include <cmath>

#include "smn/errors.hpp"

namespace smn {

const char* priority_name(Priority p) {
    return p == Priority::High ? "high" : "low";
}

void TrafficSpec::validate() const {
    if (!(payload_bytes > 0)) throw ConfigError("traffic: payload_bytes must be > 0");
    if (kind == TrafficKind::Periodic) {
        if (!(period_ns > 0)) throw ConfigError("traffic: period must be > 0");
        if (jitter_ns < 0) throw ConfigError("traffic: jitter must be >= 0");
        if (2 * jitter_ns >= period_ns)
            throw ConfigError("traffic: jitter must be < period/2 to keep arrivals ordered");
    } else {
        if (!(rate_per_s > 0)) throw ConfigError("traffic: rate must be > 0");
    }
}

TrafficSpec traffic_preset(const std::string& name) {
    TrafficSpec s;
    s.name = name;
    if (name == "billing") {
        s.kind = TrafficKind::Periodic;
        s.period_ns = 15LL * 60 * 1'000'000'000;
        s.payload_bytes = 200;
        s.priority = Priority::Low;
    } else if (name == "demand-response") {
        s.kind = TrafficKind::Periodic;
        s.period_ns = 5LL * 60 * 1'000'000'000;
        s.payload_bytes = 100;
        s.priority = Priority::Low;
    } else if (name == "pricing") {
        s.kind = TrafficKind::Periodic;
        s.period_ns = 5LL * 60 * 1'000'000'000;
        s.payload_bytes = 100;
        s.priority = Priority::Low;
    } else if (name == "outage-alert") {
        s.kind = TrafficKind::Poisson;
        s.rate_per_s = 1e-4;
        s.payload_bytes = 100;
        s.priority = Priority::High;
    } else if (name == "ev-charging") {
        s.kind = TrafficKind::Poisson;
        s.rate_per_s = 1e-4;
        s.payload_bytes = 150;
        s.priority = Priority::Low;
    } else {
        throw UnknownPreset("traffic preset: " + name);
    }
    return s;
}

TrafficSource::TrafficSource(TrafficSpec spec, Rng stream, TimeNs start_ns)
    : spec_(std::move(spec)), rng_(stream), base_ns_(start_ns) {
    spec_.validate();
    if (spec_.kind == TrafficKind::Periodic) {
        if (spec_.start_offset_ns) {
            base_ns_ += *spec_.start_offset_ns;
        } else {
            base_ns_ += static_cast<TimeNs>(
                std::llround(rng_.uniform01() * static_cast<double>(spec_.period_ns)));
        }
    }
}

TimeNs TrafficSource::next_arrival(TimeNs t_now) {
    if (spec_.kind == TrafficKind::Poisson) {
        const double gap_s = rng_.exponential(spec_.rate_per_s);
        return t_now + static_cast<TimeNs>(std::llround(gap_s * 1e9));
    }
    TimeNs t = base_ns_ + index_ * spec_.period_ns;
    if (spec_.jitter_ns > 0) {
        t += static_cast<TimeNs>(std::llround(
            rng_.uniform(-static_cast<double>(spec_.jitter_ns),
                         static_cast<double>(spec_.jitter_ns))));
    }
    ++index_;
    return t;
}

}  // namespace smn
