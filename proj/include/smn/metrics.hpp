#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smn/simengine.hpp"
#include "smn/traffic.hpp"

namespace smn {

enum class AttemptOutcome : std::uint8_t { Success, Collision, BelowSensitivity };

struct DelayStats {
    long count = 0;
    double mean_ns = 0.0;
    TimeNs p50_ns = 0;
    TimeNs p95_ns = 0;
    TimeNs p99_ns = 0;
    TimeNs max_ns = 0;
};

struct CycleStats {
    long count = 0;
    TimeNs min_ns = 0;
    double mean_ns = 0.0;
    TimeNs max_ns = 0;
};

struct SilentFlagRecord {
    int meter = -1;
    TimeNs flag_time_ns = 0;
    TimeNs latency_ns = -1;  // from scripted failure (or first miss) to flag
};

// One polling (or probe) cycle as recorded by the collector.
struct CycleRecord {
    long index = 0;
    TimeNs start_ns = 0;
    TimeNs length_ns = 0;
    int polled = 0;
    int responses = 0;
    int probed_group = -1;  // PP-MAC only
    int detected = -1;      // PP-MAC only
};

struct MetricsReport {
    long generated = 0;
    long delivered = 0;
    long dropped = 0;
    long queued = 0;

    long attempts = 0;
    long collisions = 0;
    long below_sensitivity = 0;
    double collision_ratio = 0.0;

    std::optional<DelayStats> delay_all;
    std::optional<DelayStats> delay_high;
    std::optional<DelayStats> delay_low;

    std::optional<double> jain_index;
    double throughput_bps = 0.0;
    double airtime_utilization = 0.0;

    std::vector<long> delivered_per_meter;
    std::vector<double> throughput_per_meter_bps;

    std::optional<CycleStats> cycles;
    std::vector<SilentFlagRecord> silent_flags;
};

// (sum x)^2 / (n * sum x^2); throws AllZero when every value is zero.
double jain_index(const std::vector<double>& values);

// Per-run accumulator.  Events must arrive in nondecreasing time order;
// violations throw OutOfOrder.
class Metrics {
public:
    void set_meter_count(int n);

    void on_generated(int meter, Priority cls, TimeNs t);
    void on_attempt(int meter, TimeNs t, AttemptOutcome outcome);
    void on_completed(int meter, Priority cls, TimeNs enqueue_ns,
                      TimeNs complete_ns, int payload_bytes);
    void on_dropped(int meter, Priority cls, TimeNs t);
    void on_cycle(const CycleRecord& cycle);
    void on_flagged(int meter, TimeNs t, TimeNs latency_ns);
    void add_busy_interval(TimeNs from_ns, TimeNs to_ns);

    // Derives every statistic; `queued` is the count of frames still waiting
    // at run end.  Checks traffic conservation (throws InvariantViolation).
    MetricsReport finalize(TimeNs duration_ns, long queued) const;

private:
    void check_order(TimeNs t);

    int meter_count_ = 0;
    TimeNs last_event_ns_ = std::numeric_limits<TimeNs>::min();

    long generated_ = 0, delivered_ = 0, dropped_ = 0;
    long attempts_ = 0, collisions_ = 0, below_ = 0;
    std::vector<TimeNs> delays_all_, delays_high_, delays_low_;
    std::vector<long> delivered_per_meter_;
    std::vector<long> generated_per_meter_;
    std::vector<long> payload_bits_per_meter_;
    std::vector<TimeNs> cycle_lengths_;
    std::vector<SilentFlagRecord> flags_;
    TimeNs busy_ns_ = 0;
};

}  // namespace smn
