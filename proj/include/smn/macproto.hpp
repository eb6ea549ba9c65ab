#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smn/channel.hpp"
#include "smn/metrics.hpp"
#include "smn/simengine.hpp"
#include "smn/traffic.hpp"

namespace smn {

enum class Protocol : std::uint8_t { Dcf, Edca, Pcf, Qdcf, Ppmac };
const char* protocol_name(Protocol p);

enum class PollOrder : std::uint8_t { RoundRobin, Lcfs };
enum class QdcfGroupMode : std::uint8_t { SharedParams, PerGroupParams, GroupByGroup };

enum class FrameKind : std::uint8_t {
    Data,
    Ack,
    Rts,
    Cts,
    Beacon,
    Poll,
    Null,
    Probe,
    ProbeAck,
    JoinReq,
    JoinResp,
    BroadcastParams,
};

struct Frame {
    std::uint64_t id = 0;
    NodeId src = kNoNode;
    NodeId dst = kNoNode;
    FrameKind kind = FrameKind::Data;
    Priority priority = Priority::Low;
    int size_bytes = 0;
    TimeNs enqueue_ns = 0;
};

// CSMA/CA timing and retry parameters shared by the DCF-family protocols.
// Defaults are sub-1GHz-plausible, not normative, and fully configurable.
struct MacTimingParams {
    TimeNs slot_ns = 52'000;
    TimeNs sifs_ns = 160'000;
    TimeNs difs_ns = 264'000;       // sifs + 2 slots
    TimeNs aifs_high_ns = 264'000;  // = difs
    TimeNs aifs_low_ns = 368'000;   // difs + 2 slots
    int cw_min_high = 7;
    int cw_min_low = 15;
    int cw_max = 1023;
    int retry_limit = 7;
    bool rts_cts_enabled = false;
    int rts_threshold_bytes = 0;
    TimeNs phy_header_ns = 0;
    TimeNs ack_timeout_ns = 0;  // 0 => sifs + ack airtime + slot
    int control_bytes = 14;     // ack / rts / cts / null
    int mgmt_bytes = 20;        // beacon / poll / probe / join

    void validate() const;
};

struct AccessParams {
    TimeNs aifs_ns;
    int cw_min;
};

// Per-class access parameters; high priority gets the shorter AIFS and the
// smaller minimum contention window.
AccessParams edca_classify(const MacTimingParams& mac, Priority cls);

struct PcfParams {
    PollOrder poll_order = PollOrder::RoundRobin;
    TimeNs beacon_interval_ns = 0;   // 0 => cycles run back to back
    TimeNs response_timeout_ns = 0;  // 0 => sifs + null airtime + slot
    int silent_miss_threshold = 3;

    void validate() const;
};

struct QdcfParams {
    double contention_factor_q = 1.0;
    TimeNs prohibit_time_ns = 0;
    int group_count = 1;
    QdcfGroupMode group_mode = QdcfGroupMode::SharedParams;
    TimeNs phase_length_ns = 500'000'000;
    std::vector<double> per_group_q;      // PerGroupParams mode
    std::vector<TimeNs> per_group_t_ns;   // PerGroupParams mode

    void validate() const;
};

struct PpmacParams {
    int group_count = 1;
    int zc_length = 0;  // prime, >= largest group size + 1
    TimeNs chip_ns = 10'000;
    double detection_threshold = 0.5;
    double noise_sigma = 0.0;
    TimeNs response_timeout_ns = 0;
    int silent_miss_threshold = 3;

    TimeNs probe_ack_slot_ns() const { return zc_length * chip_ns; }
    void validate() const;
};

struct TrafficBinding {
    enum class Target : std::uint8_t { All, Meters, Group };
    TrafficSpec spec;
    Target target = Target::All;
    std::vector<int> meters;  // Target::Meters
    int group = -1;           // Target::Group
};

struct FaultScript {
    int meter = -1;
    TimeNs fail_at_ns = 0;
    std::optional<TimeNs> recover_at_ns;
};

struct JoinScript {
    int meter = -1;  // index into the topology; starts unassociated
    TimeNs join_at_ns = 0;
};

struct SimConfig {
    RadioParams radio;
    SensingMode sensing_mode = SensingMode::PairwiseRange;
    double fixed_rate_bps = 1e5;  // 0 => per-distance achievable rate
    Protocol protocol = Protocol::Dcf;
    MacTimingParams mac;
    PcfParams pcf;
    QdcfParams qdcf;
    PpmacParams ppmac;
    CellTopology topology;  // includes join-scripted meters at their slots
    std::vector<TrafficBinding> traffic;
    std::vector<FaultScript> faults;
    std::vector<JoinScript> joins;
    TimeNs duration_ns = 0;
    std::uint64_t master_seed = 1;

    void validate() const;
};

enum class FrameFate : std::uint8_t { Delivered, Dropped, Queued };
const char* frame_fate_name(FrameFate f);

struct FrameRecord {
    std::uint64_t frame_id = 0;
    int meter = -1;
    Priority priority = Priority::Low;
    TimeNs enqueue_ns = 0;
    FrameFate fate = FrameFate::Queued;
    TimeNs delay_ns = -1;  // delivered frames only
    int attempts = 0;      // transmission tries performed
};

struct JoinEvent {
    int meter = -1;
    TimeNs time_ns = 0;
    bool registered = false;
    int group = -1;
    int zc_root = 0;
};

struct UnflagEvent {
    int meter = -1;
    TimeNs time_ns = 0;
};

struct QdcfPhaseRecord {
    long index = 0;
    TimeNs start_ns = 0;
    int allowed = 0;
    int deferred = 0;
};

struct RunResult {
    MetricsReport report;
    std::vector<FrameRecord> frames;   // generation order
    std::vector<CycleRecord> cycles;   // polling protocols
    std::vector<JoinEvent> joins;
    std::vector<UnflagEvent> unflags;
    std::vector<QdcfPhaseRecord> qdcf_phases;
    long lcfs_checks = 0;  // per-poll argmin verifications performed
};

// Runs one deterministic simulation of the configured protocol over the
// shared channel.  Single-threaded; distinct configs may run concurrently.
RunResult run_simulation(const SimConfig& cfg);

}  // namespace smn
