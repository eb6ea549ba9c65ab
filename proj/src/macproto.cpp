#include "smn/macproto.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <set>

#include "smn/errors.hpp"
#include "smn/zadoffchu.hpp"

namespace smn {

const char* protocol_name(Protocol p) {
    switch (p) {
        case Protocol::Dcf: return "dcf";
        case Protocol::Edca: return "edca";
        case Protocol::Pcf: return "pcf";
        case Protocol::Qdcf: return "qdcf";
        case Protocol::Ppmac: return "ppmac";
    }
    return "?";
}

const char* frame_fate_name(FrameFate f) {
    switch (f) {
        case FrameFate::Delivered: return "delivered";
        case FrameFate::Dropped: return "dropped";
        case FrameFate::Queued: return "queued";
    }
    return "?";
}

AccessParams edca_classify(const MacTimingParams& mac, Priority cls) {
    if (cls == Priority::High) return {mac.aifs_high_ns, mac.cw_min_high};
    return {mac.aifs_low_ns, mac.cw_min_low};
}

void MacTimingParams::validate() const {
    if (!(slot_ns > 0)) throw ConfigError("mac: slot must be > 0");
    if (!(sifs_ns >= 0)) throw ConfigError("mac: sifs must be >= 0");
    if (difs_ns < sifs_ns) throw ConfigError("mac: difs must be >= sifs");
    if (cw_min_high > cw_max || cw_min_low > cw_max)
        throw ConfigError("mac: cw_min must be <= cw_max");
    if (aifs_high_ns > aifs_low_ns)
        throw ConfigError("mac: high class AIFS must not exceed low class AIFS");
    if (cw_min_high > cw_min_low)
        throw ConfigError("mac: high class cw_min must not exceed low class cw_min");
    if (retry_limit < 1) throw ConfigError("mac: retry_limit must be >= 1");
    if (control_bytes <= 0 || mgmt_bytes <= 0)
        throw ConfigError("mac: frame sizes must be > 0");
    if (rts_threshold_bytes < 0) throw ConfigError("mac: rts_threshold must be >= 0");
}

void PcfParams::validate() const {
    if (beacon_interval_ns < 0) throw ConfigError("pcf: beacon interval must be >= 0");
    if (response_timeout_ns < 0) throw ConfigError("pcf: response timeout must be >= 0");
    if (silent_miss_threshold < 1)
        throw ConfigError("pcf: silent miss threshold must be >= 1");
}

void QdcfParams::validate() const {
    if (!(contention_factor_q > 0.0) || contention_factor_q > 1.0)
        throw ConfigError("qdcf: contention factor must be in (0, 1]");
    if (prohibit_time_ns < 0) throw ConfigError("qdcf: prohibit time must be >= 0");
    if (group_count < 1) throw ConfigError("qdcf: group count must be >= 1");
    if (!(phase_length_ns > 0)) throw ConfigError("qdcf: phase length must be > 0");
    if (group_mode == QdcfGroupMode::PerGroupParams) {
        if (per_group_q.size() != static_cast<std::size_t>(group_count) ||
            per_group_t_ns.size() != static_cast<std::size_t>(group_count))
            throw ConfigError("qdcf: per-group parameter arrays must match group count");
        for (double q : per_group_q)
            if (!(q > 0.0) || q > 1.0)
                throw ConfigError("qdcf: per-group Q must be in (0, 1]");
        for (TimeNs t : per_group_t_ns)
            if (t < 0) throw ConfigError("qdcf: per-group T must be >= 0");
    }
}

namespace {

bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; static_cast<long long>(d) * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

}  // namespace

void PpmacParams::validate() const {
    if (group_count < 1) throw ConfigError("ppmac: group count must be >= 1");
    if (!is_prime(zc_length)) throw ConfigError("ppmac: zc_length must be prime");
    if (zc_length < 3) throw ConfigError("ppmac: zc_length must be >= 3");
    if (!(chip_ns > 0)) throw ConfigError("ppmac: chip time must be > 0");
    if (!(detection_threshold > 0.0) || !(detection_threshold < 1.0))
        throw ConfigError("ppmac: detection threshold must be in (0, 1)");
    if (noise_sigma < 0.0) throw ConfigError("ppmac: noise sigma must be >= 0");
    if (silent_miss_threshold < 1)
        throw ConfigError("ppmac: silent miss threshold must be >= 1");
}

void SimConfig::validate() const {
    radio.validate();
    mac.validate();
    if (duration_ns < 0) throw ConfigError("scenario: duration must be >= 0");
    switch (protocol) {
        case Protocol::Pcf: pcf.validate(); break;
        case Protocol::Qdcf: qdcf.validate(); break;
        case Protocol::Ppmac: ppmac.validate(); break;
        default: break;
    }
    const int n = static_cast<int>(topology.meter_count());
    for (const auto& f : faults) {
        if (f.meter < 0 || f.meter >= n) throw ConfigError("fault: meter index out of range");
        if (f.recover_at_ns && *f.recover_at_ns <= f.fail_at_ns)
            throw ConfigError("fault: recovery must follow failure");
    }
    std::set<int> joinset;
    for (const auto& j : joins) {
        if (j.meter < 0 || j.meter >= n) throw ConfigError("join: meter index out of range");
        if (!joinset.insert(j.meter).second)
            throw ConfigError("join: duplicate meter index");
    }
    for (const auto& b : traffic) {
        b.spec.validate();
        if (b.target == TrafficBinding::Target::Meters)
            for (int m : b.meters)
                if (m < 0 || m >= n) throw ConfigError("traffic: meter index out of range");
        if (b.target == TrafficBinding::Target::Group && b.group < 0)
            throw ConfigError("traffic: group must be >= 0");
    }
}

namespace {

constexpr NodeId kCollectorNode = 0;

enum class AccessState : std::uint8_t { Idle, Blocked, Counting, Exchanging };

// What the meter is waiting for after transmitting.
enum class Awaiting : std::uint8_t { Nothing, Cts, Ack, JoinResp };

class Engine;

struct SenseAdapter final : MediumListener {
    Engine* engine = nullptr;
    int meter = -1;
    void on_medium_busy() override;
    void on_medium_idle() override;
};

struct MeterCtx {
    int index = -1;
    NodeId node = kNoNode;
    MeterPosition pos;

    std::deque<Frame> queue_high, queue_low;
    long completed_frames = 0;
    int group = -1;
    bool associated = false;
    bool failed = false;
    bool join_rejected = false;
    int zc_root = 0;

    // the frame currently under contention; pinned so a later high-priority
    // arrival cannot swap the head mid-attempt
    bool serving = false;
    Priority serving_class = Priority::Low;

    // contention engine
    AccessState st = AccessState::Idle;
    Awaiting awaiting = Awaiting::Nothing;
    int cw = 0;
    int backoff_slots = 0;
    int attempts_for_head = 0;
    bool attempt_below = false;  // outgoing frame fell under the noise floor
    TimeNs nav_until_ns = 0;
    TimeNs countdown_started_ns = 0;
    TimeNs countdown_deadline_ns = 0;
    std::uint64_t countdown_timer = 0;
    std::uint64_t response_timer = 0;
    std::uint64_t wake_timer = 0;
    bool joining = false;
    Frame join_frame;

    // qdcf gate
    long gate_phase = -1;
    TimeNs gate_allowed_from_ns = 0;

    // silent-node bookkeeping
    TimeNs fail_time_ns = -1;
    TimeNs first_miss_ns = -1;

    std::vector<TrafficSource> sources;
    Rng mac_rng{0};
    Rng gate_rng{0};
    SenseAdapter sense;
    bool listening = false;

    bool backlogged() const { return !queue_high.empty() || !queue_low.empty(); }
};

// Collector-side registry and polling state.
struct CollectorCtx {
    std::vector<std::uint8_t> registered;
    std::vector<int> registry_order;
    std::vector<int> miss_count;
    std::set<int> flagged;
    std::vector<std::vector<int>> free_roots;  // per group, ascending
    int next_group_rr = 0;

    long cycle_index = 0;
    TimeNs cycle_start_ns = 0;
    std::vector<int> cycle_pending;
    int cycle_polled = 0;
    int cycle_responses = 0;
    int cycle_probed_group = -1;
    int cycle_detected = -1;
    int current_polled = -1;
    bool status_poll_stage = false;
    std::size_t status_rotate = 0;
    std::uint64_t poll_timeout_timer = 0;
};

struct TxCtx {
    Channel::TxId tx_id = 0;
    NodeId tx = kNoNode;
    NodeId rx = kNoNode;
    FrameKind kind = FrameKind::Data;
    int meter = -1;  // owner of the MAC exchange (or polled meter)
    std::uint64_t frame_id = 0;
    TimeNs start_ns = 0;
    TimeNs end_ns = 0;
    TimeNs nav_duration_ns = 0;
    bool join_accept = false;
};

class Engine {
public:
    explicit Engine(const SimConfig& cfg) : cfg_(cfg), streams_{cfg.master_seed} {}

    RunResult run();

    void meter_medium_busy(int m);
    void meter_medium_idle(int m);

private:
    // --- setup -------------------------------------------------------------
    void setup();
    void associate_initial(int meter);
    void register_meter(int meter);  // collector-side group + root assignment
    void activate_traffic(MeterCtx& m);
    bool contention_protocol() const {
        return cfg_.protocol == Protocol::Dcf || cfg_.protocol == Protocol::Edca ||
               cfg_.protocol == Protocol::Qdcf;
    }
    int group_count() const;
    bool polling_protocol() const {
        return cfg_.protocol == Protocol::Pcf || cfg_.protocol == Protocol::Ppmac;
    }
    int silent_threshold() const {
        return cfg_.protocol == Protocol::Ppmac ? cfg_.ppmac.silent_miss_threshold
                                                : cfg_.pcf.silent_miss_threshold;
    }

    // --- traffic -----------------------------------------------------------
    void schedule_next_arrival(int meter, std::size_t source_idx);
    void on_arrival(int meter, std::size_t source_idx, TimeNs t);

    // --- contention engine ---------------------------------------------------
    Frame* head_frame(MeterCtx& m);
    AccessParams head_access(MeterCtx& m);
    void start_frame(MeterCtx& m);
    void begin_attempt(MeterCtx& m);
    void try_contend(MeterCtx& m);
    void arm_wake(MeterCtx& m, TimeNs at);
    void freeze_countdown(MeterCtx& m);
    void countdown_fired(MeterCtx& m);
    void begin_exchange(MeterCtx& m);
    void attempt_resolved(MeterCtx& m, bool success);
    void on_response_timeout(MeterCtx& m);
    void set_nav(MeterCtx& m, TimeNs until_ns);
    bool gate_allows(MeterCtx& m, TimeNs* next_allowed);

    // --- transmissions -------------------------------------------------------
    TimeNs airtime(NodeId tx, NodeId rx, int bytes) const;
    void start_unicast(NodeId tx, NodeId rx, FrameKind kind, int bytes, int meter,
                       std::uint64_t frame_id, TimeNs nav_duration,
                       bool join_accept = false);
    void on_tx_end(TxCtx ctx);
    void distribute_nav(const TxCtx& ctx);

    // frame-kind handlers
    void on_data_end(const TxCtx& ctx, Outcome out);
    void on_rts_end(const TxCtx& ctx, Outcome out);
    void on_cts_end(const TxCtx& ctx, Outcome out);
    void on_ack_end(const TxCtx& ctx, Outcome out);
    void on_join_req_end(const TxCtx& ctx, Outcome out);
    void on_join_resp_end(const TxCtx& ctx, Outcome out);

    // --- polling (PCF + PP-MAC) ---------------------------------------------
    void start_pcf_cycle();
    void start_ppmac_cycle();
    void after_probe(Channel::TxId id, int group);
    void after_ack_slot(int group, std::vector<int> responders);
    void advance_poll();
    void do_poll(int meter, bool status_poll);
    void on_poll_end(const TxCtx& ctx, Outcome out);
    void on_poll_timeout(int meter, bool status_poll);
    void on_response_end(const TxCtx& ctx, Outcome out);
    void record_miss(int meter);
    void record_response_ok(int meter);
    void finish_cycle();
    int pick_next_poll();

    // --- qdcf ----------------------------------------------------------------
    void start_qdcf_phase(long index);
    void flush_phase_record();

    // --- faults / joins -------------------------------------------------------
    void on_fail(int meter);
    void on_recover(int meter);
    void start_join(int meter);

    // --- bookkeeping -----------------------------------------------------------
    FrameRecord& record_of(std::uint64_t frame_id) {
        return frames_.at(frame_id - 1);
    }
    void complete_frame(MeterCtx& m, Frame& f, TimeNs now);
    void ensure_listener(MeterCtx& m);
    void drop_listener(MeterCtx& m);

    const SimConfig& cfg_;
    RandomStreams streams_;
    Simulator sim_;
    std::unique_ptr<Channel> channel_;
    std::vector<MeterCtx> meters_;
    CollectorCtx coll_;
    Metrics metrics_;
    Rng zc_noise_rng_{0};

    std::vector<FrameRecord> frames_;
    std::vector<CycleRecord> cycles_;
    std::vector<JoinEvent> join_events_;
    std::vector<UnflagEvent> unflag_events_;
    std::vector<QdcfPhaseRecord> phases_;
    long lcfs_checks_ = 0;
    std::uint64_t next_frame_id_ = 1;

    // qdcf phase state
    long qdcf_phase_index_ = -1;
    QdcfPhaseRecord current_phase_{};

    // ppmac codebook cache (rebuilt when group membership changes)
    struct GroupCodebook {
        bool dirty = true;
        std::vector<int> roots;   // ascending
        std::vector<int> meters;  // root -> meter index, aligned with roots
        std::vector<ZcSequence> sequences;
    };
    std::vector<GroupCodebook> codebooks_;
};

void SenseAdapter::on_medium_busy() { engine->meter_medium_busy(meter); }
void SenseAdapter::on_medium_idle() { engine->meter_medium_idle(meter); }

int Engine::group_count() const {
    switch (cfg_.protocol) {
        case Protocol::Qdcf: return cfg_.qdcf.group_count;
        case Protocol::Ppmac: return cfg_.ppmac.group_count;
        default: return 1;
    }
}

// ---------------------------------------------------------------------------
// setup
// ---------------------------------------------------------------------------

void Engine::setup() {
    ChannelConfig ch;
    ch.radio = cfg_.radio;
    ch.sensing_mode = cfg_.sensing_mode;
    ch.fixed_rate_bps = cfg_.fixed_rate_bps;
    ch.phy_header_ns = cfg_.mac.phy_header_ns;
    channel_ = std::make_unique<Channel>(ch, cfg_.topology.positions);
    channel_->set_busy_interval_sink(
        [this](TimeNs a, TimeNs b) { metrics_.add_busy_interval(a, b); });

    const int n = static_cast<int>(cfg_.topology.meter_count());
    metrics_.set_meter_count(n);
    meters_.resize(static_cast<std::size_t>(n));
    coll_.registered.assign(static_cast<std::size_t>(n), 0);
    coll_.miss_count.assign(static_cast<std::size_t>(n), 0);
    coll_.free_roots.resize(static_cast<std::size_t>(group_count()));
    if (cfg_.protocol == Protocol::Ppmac) {
        for (auto& pool : coll_.free_roots)
            for (int root = cfg_.ppmac.zc_length - 1; root >= 1; --root)
                pool.push_back(root);  // pop_back yields the smallest root
        codebooks_.resize(static_cast<std::size_t>(group_count()));
    }
    zc_noise_rng_ = streams_.derive(StreamDomain::ZcNoise);

    std::set<int> join_later;
    for (const auto& j : cfg_.joins) join_later.insert(j.meter);

    for (int i = 0; i < n; ++i) {
        MeterCtx& m = meters_[static_cast<std::size_t>(i)];
        m.index = i;
        m.node = i + 1;
        m.pos = cfg_.topology.positions[static_cast<std::size_t>(i)];
        m.mac_rng = streams_.derive(StreamDomain::MeterMac, static_cast<std::uint64_t>(i));
        m.gate_rng = streams_.derive(StreamDomain::QdcfGate, static_cast<std::uint64_t>(i));
        m.sense.engine = this;
        m.sense.meter = i;
    }
    for (int i = 0; i < n; ++i)
        if (!join_later.count(i)) associate_initial(i);

    if (cfg_.protocol == Protocol::Ppmac) {
        // every group must fit inside the Zadoff-Chu root space
        std::vector<int> sizes(static_cast<std::size_t>(group_count()), 0);
        for (const auto& m : meters_)
            if (m.associated) ++sizes[static_cast<std::size_t>(m.group)];
        for (int s : sizes)
            if (s > cfg_.ppmac.zc_length - 1)
                throw ConfigError("ppmac: group size exceeds zc_length - 1");
    }

    for (const auto& f : cfg_.faults) {
        sim_.schedule(f.fail_at_ns, EventKind::Fail, meters_[static_cast<std::size_t>(f.meter)].node,
                      [this, meter = f.meter] { on_fail(meter); });
        if (f.recover_at_ns)
            sim_.schedule(*f.recover_at_ns, EventKind::Fail,
                          meters_[static_cast<std::size_t>(f.meter)].node,
                          [this, meter = f.meter] { on_recover(meter); });
    }
    for (const auto& j : cfg_.joins)
        sim_.schedule(j.join_at_ns, EventKind::Join,
                      meters_[static_cast<std::size_t>(j.meter)].node,
                      [this, meter = j.meter] { start_join(meter); });

    switch (cfg_.protocol) {
        case Protocol::Pcf:
            sim_.schedule(0, EventKind::Beacon, kCollectorNode, [this] { start_pcf_cycle(); });
            break;
        case Protocol::Ppmac:
            sim_.schedule(0, EventKind::Probe, kCollectorNode, [this] { start_ppmac_cycle(); });
            break;
        case Protocol::Qdcf:
            sim_.schedule(0, EventKind::Timer, kCollectorNode, [this] { start_qdcf_phase(0); });
            break;
        default:
            break;
    }
}

void Engine::register_meter(int meter) {
    MeterCtx& m = meters_[static_cast<std::size_t>(meter)];
    const int groups = group_count();
    int group = -1;
    if (cfg_.protocol == Protocol::Ppmac) {
        // round-robin over groups, skipping exhausted root pools
        for (int k = 0; k < groups; ++k) {
            const int candidate = (coll_.next_group_rr + k) % groups;
            if (!coll_.free_roots[static_cast<std::size_t>(candidate)].empty()) {
                group = candidate;
                break;
            }
        }
        if (group < 0) return;  // capacity exhausted; caller rejects
        m.zc_root = coll_.free_roots[static_cast<std::size_t>(group)].back();
        coll_.free_roots[static_cast<std::size_t>(group)].pop_back();
        codebooks_[static_cast<std::size_t>(group)].dirty = true;
    } else {
        group = coll_.next_group_rr % groups;
    }
    coll_.next_group_rr = (group + 1) % groups;
    m.group = group;
    coll_.registered[static_cast<std::size_t>(meter)] = 1;
    coll_.registry_order.push_back(meter);
}

void Engine::associate_initial(int meter) {
    MeterCtx& m = meters_[static_cast<std::size_t>(meter)];
    register_meter(meter);
    if (!coll_.registered[static_cast<std::size_t>(meter)])
        throw ConfigError("association capacity exhausted for initial meters");
    m.associated = true;
    if (contention_protocol()) ensure_listener(m);
    activate_traffic(m);
}

void Engine::activate_traffic(MeterCtx& m) {
    for (const auto& binding : cfg_.traffic) {
        bool applies = false;
        switch (binding.target) {
            case TrafficBinding::Target::All: applies = true; break;
            case TrafficBinding::Target::Meters:
                applies = std::find(binding.meters.begin(), binding.meters.end(),
                                    m.index) != binding.meters.end();
                break;
            case TrafficBinding::Target::Group:
                applies = (binding.group == m.group);
                break;
        }
        if (!applies) continue;
        const auto source_idx = static_cast<std::uint64_t>(m.sources.size());
        Rng stream = streams_.derive(
            StreamDomain::Traffic,
            (static_cast<std::uint64_t>(m.index) << 16) | source_idx);
        m.sources.emplace_back(binding.spec, stream, sim_.now());
    }
    for (std::size_t s = 0; s < m.sources.size(); ++s)
        schedule_next_arrival(m.index, s);
}

void Engine::ensure_listener(MeterCtx& m) {
    if (m.listening) return;
    channel_->register_listener(m.node, &m.sense);
    m.listening = true;
}

void Engine::drop_listener(MeterCtx& m) {
    if (!m.listening) return;
    channel_->unregister_listener(m.node);
    m.listening = false;
}

// ---------------------------------------------------------------------------
// traffic
// ---------------------------------------------------------------------------

void Engine::schedule_next_arrival(int meter, std::size_t source_idx) {
    MeterCtx& m = meters_[static_cast<std::size_t>(meter)];
    // jittered periodic points can land before the source start; clamp to now
    const TimeNs t = std::max(m.sources[source_idx].next_arrival(sim_.now()), sim_.now());
    if (t > cfg_.duration_ns) return;  // beyond the horizon; stop the chain
    sim_.schedule(t, EventKind::FrameArrival, m.node,
                  [this, meter, source_idx, t] { on_arrival(meter, source_idx, t); });
}

void Engine::on_arrival(int meter, std::size_t source_idx, TimeNs t) {
    MeterCtx& m = meters_[static_cast<std::size_t>(meter)];
    const TrafficSpec& spec = m.sources[source_idx].spec();

    Frame f;
    f.id = next_frame_id_++;
    f.src = m.node;
    f.dst = kCollectorNode;
    f.kind = FrameKind::Data;
    f.priority = spec.priority;
    f.size_bytes = spec.payload_bytes;
    f.enqueue_ns = t;

    FrameRecord rec;
    rec.frame_id = f.id;
    rec.meter = meter;
    rec.priority = f.priority;
    rec.enqueue_ns = t;
    frames_.push_back(rec);
    metrics_.on_generated(meter, f.priority, t);

    (f.priority == Priority::High ? m.queue_high : m.queue_low).push_back(f);

    if (contention_protocol() && !m.serving && m.st == AccessState::Idle && !m.joining)
        start_frame(m);

    schedule_next_arrival(meter, source_idx);
}

// ---------------------------------------------------------------------------
// contention engine
// ---------------------------------------------------------------------------

Frame* Engine::head_frame(MeterCtx& m) {
    if (m.joining) return &m.join_frame;
    if (m.serving) {
        auto& q = m.serving_class == Priority::High ? m.queue_high : m.queue_low;
        return &q.front();
    }
    if (!m.queue_high.empty()) return &m.queue_high.front();
    if (!m.queue_low.empty()) return &m.queue_low.front();
    return nullptr;
}

AccessParams Engine::head_access(MeterCtx& m) {
    Frame* f = head_frame(m);
    return edca_classify(cfg_.mac, f ? f->priority : Priority::Low);
}

void Engine::start_frame(MeterCtx& m) {
    if (!m.queue_high.empty()) {
        m.serving = true;
        m.serving_class = Priority::High;
    } else if (!m.queue_low.empty()) {
        m.serving = true;
        m.serving_class = Priority::Low;
    } else {
        m.serving = false;
        m.st = AccessState::Idle;
        return;
    }
    m.cw = head_access(m).cw_min;
    m.attempts_for_head = 0;
    begin_attempt(m);
}

void Engine::begin_attempt(MeterCtx& m) {
    m.backoff_slots = static_cast<int>(
        m.mac_rng.uniform_below(static_cast<std::uint64_t>(m.cw) + 1));
    m.st = AccessState::Idle;
    try_contend(m);
}

void Engine::try_contend(MeterCtx& m) {
    if (m.failed) return;
    if (!m.associated && !m.joining) return;
    if (m.st == AccessState::Counting || m.st == AccessState::Exchanging) return;
    if (!head_frame(m)) {
        m.st = AccessState::Idle;
        return;
    }
    TimeNs next_allowed = 0;
    if (!gate_allows(m, &next_allowed)) {
        m.st = AccessState::Blocked;
        arm_wake(m, next_allowed);
        return;
    }
    if (sim_.now() < m.nav_until_ns) {
        m.st = AccessState::Blocked;
        arm_wake(m, m.nav_until_ns);
        return;
    }
    if (channel_->is_transmitting(m.node)) {
        // a pre-failure transmission is still in the air after recovery
        m.st = AccessState::Blocked;
        arm_wake(m, sim_.now() + cfg_.mac.slot_ns);
        return;
    }
    if (channel_->carrier_busy(m.node)) {
        m.st = AccessState::Blocked;  // idle edge will retrigger
        return;
    }
    m.st = AccessState::Counting;
    m.countdown_started_ns = sim_.now();
    const AccessParams ap = head_access(m);
    m.countdown_deadline_ns = sim_.now() + ap.aifs_ns +
                              static_cast<TimeNs>(m.backoff_slots) * cfg_.mac.slot_ns;
    m.countdown_timer = sim_.schedule(
        m.countdown_deadline_ns, EventKind::Timer, m.node, [this, idx = m.index] {
            countdown_fired(meters_[static_cast<std::size_t>(idx)]);
        });
}

void Engine::arm_wake(MeterCtx& m, TimeNs at) {
    if (m.wake_timer) sim_.cancel(m.wake_timer);
    if (at <= sim_.now()) at = sim_.now() + 1;
    m.wake_timer = sim_.schedule(at, EventKind::Timer, m.node,
                                 [this, idx = m.index] {
                                     MeterCtx& mm = meters_[static_cast<std::size_t>(idx)];
                                     mm.wake_timer = 0;
                                     if (mm.st == AccessState::Blocked ||
                                         mm.st == AccessState::Idle)
                                         try_contend(mm);
                                 });
}

void Engine::freeze_countdown(MeterCtx& m) {
    if (m.st != AccessState::Counting) return;
    // A countdown that has already reached its deadline at this instant is
    // committed: the meter cannot sense a transmission that starts in the
    // same slot boundary, so it transmits anyway (the slot-tie collision).
    if (m.countdown_deadline_ns <= sim_.now()) return;
    sim_.cancel(m.countdown_timer);
    m.countdown_timer = 0;
    const AccessParams ap = head_access(m);
    const TimeNs elapsed = sim_.now() - m.countdown_started_ns - ap.aifs_ns;
    if (elapsed > 0) {
        const int consumed = static_cast<int>(elapsed / cfg_.mac.slot_ns);
        m.backoff_slots -= std::min(m.backoff_slots, consumed);
    }
    m.st = AccessState::Blocked;
}

void Engine::meter_medium_busy(int meter) {
    freeze_countdown(meters_[static_cast<std::size_t>(meter)]);
}

void Engine::meter_medium_idle(int meter) {
    MeterCtx& m = meters_[static_cast<std::size_t>(meter)];
    if (m.st == AccessState::Blocked) try_contend(m);
}

void Engine::countdown_fired(MeterCtx& m) {
    m.countdown_timer = 0;
    if (m.st != AccessState::Counting) return;
    m.backoff_slots = 0;
    TimeNs next_allowed = 0;
    if (!gate_allows(m, &next_allowed)) {  // group window may have closed
        m.st = AccessState::Blocked;
        arm_wake(m, next_allowed);
        return;
    }
    begin_exchange(m);
}

void Engine::begin_exchange(MeterCtx& m) {
    m.st = AccessState::Exchanging;
    m.attempt_below = false;
    Frame* f = head_frame(m);
    ++m.attempts_for_head;
    if (m.joining) {
        m.awaiting = Awaiting::JoinResp;
        start_unicast(m.node, kCollectorNode, FrameKind::JoinReq, cfg_.mac.mgmt_bytes,
                      m.index, 0, 0);
        return;
    }
    ++record_of(f->id).attempts;
    if (cfg_.mac.rts_cts_enabled && f->size_bytes >= cfg_.mac.rts_threshold_bytes) {
        const TimeNs data_air = airtime(m.node, kCollectorNode, f->size_bytes);
        const TimeNs ctl_air = airtime(kCollectorNode, m.node, cfg_.mac.control_bytes);
        const TimeNs nav = 3 * cfg_.mac.sifs_ns + ctl_air + data_air + ctl_air;
        m.awaiting = Awaiting::Cts;
        start_unicast(m.node, kCollectorNode, FrameKind::Rts, cfg_.mac.control_bytes,
                      m.index, f->id, nav);
    } else {
        m.awaiting = Awaiting::Ack;
        start_unicast(m.node, kCollectorNode, FrameKind::Data, f->size_bytes, m.index,
                      f->id, 0);
    }
}

void Engine::complete_frame(MeterCtx& m, Frame& f, TimeNs now) {
    FrameRecord& rec = record_of(f.id);
    rec.fate = FrameFate::Delivered;
    rec.delay_ns = now - f.enqueue_ns;
    metrics_.on_completed(m.index, f.priority, f.enqueue_ns, now, f.size_bytes);
    ++m.completed_frames;
    (f.priority == Priority::High ? m.queue_high : m.queue_low).pop_front();
    m.serving = false;
}

void Engine::attempt_resolved(MeterCtx& m, bool success) {
    if (m.response_timer) {
        sim_.cancel(m.response_timer);
        m.response_timer = 0;
    }
    m.awaiting = Awaiting::Nothing;
    m.st = AccessState::Idle;

    if (m.joining) {
        if (!success) {
            // joins retry forever: reset the ladder after exhausting it
            if (m.attempts_for_head > cfg_.mac.retry_limit) {
                m.cw = edca_classify(cfg_.mac, m.join_frame.priority).cw_min;
                m.attempts_for_head = 0;
            } else {
                m.cw = std::min(2 * (m.cw + 1) - 1, cfg_.mac.cw_max);
            }
            begin_attempt(m);
        }
        return;
    }

    Frame* f = head_frame(m);
    if (success) {
        metrics_.on_attempt(m.index, sim_.now(), AttemptOutcome::Success);
        complete_frame(m, *f, sim_.now());
        start_frame(m);
        return;
    }
    metrics_.on_attempt(m.index, sim_.now(),
                        m.attempt_below ? AttemptOutcome::BelowSensitivity
                                        : AttemptOutcome::Collision);
    if (m.attempts_for_head > cfg_.mac.retry_limit) {
        FrameRecord& rec = record_of(f->id);
        rec.fate = FrameFate::Dropped;
        metrics_.on_dropped(m.index, f->priority, sim_.now());
        (f->priority == Priority::High ? m.queue_high : m.queue_low).pop_front();
        m.serving = false;
        start_frame(m);
        return;
    }
    m.cw = std::min(2 * (m.cw + 1) - 1, cfg_.mac.cw_max);
    begin_attempt(m);
}

void Engine::on_response_timeout(MeterCtx& m) {
    m.response_timer = 0;
    if (m.st != AccessState::Exchanging) return;
    attempt_resolved(m, false);
}

void Engine::set_nav(MeterCtx& m, TimeNs until_ns) {
    if (until_ns <= m.nav_until_ns) return;
    m.nav_until_ns = until_ns;
    if (m.st == AccessState::Counting) {
        freeze_countdown(m);
        arm_wake(m, until_ns);
    } else if (m.st == AccessState::Blocked) {
        arm_wake(m, until_ns);
    }
}

bool Engine::gate_allows(MeterCtx& m, TimeNs* next_allowed) {
    if (cfg_.protocol != Protocol::Qdcf || m.joining) return true;
    if (qdcf_phase_index_ < 0) return true;

    const QdcfParams& q = cfg_.qdcf;
    const TimeNs phase_start = qdcf_phase_index_ * q.phase_length_ns;
    const TimeNs phase_end = phase_start + q.phase_length_ns;

    if (m.gate_phase != qdcf_phase_index_) {
        double factor = q.contention_factor_q;
        TimeNs prohibit = q.prohibit_time_ns;
        if (q.group_mode == QdcfGroupMode::PerGroupParams) {
            factor = q.per_group_q[static_cast<std::size_t>(m.group)];
            prohibit = q.per_group_t_ns[static_cast<std::size_t>(m.group)];
        }
        const double u = m.gate_rng.uniform01();
        const bool pass = u <= factor;
        m.gate_allowed_from_ns = phase_start + (pass ? 0 : prohibit);
        m.gate_phase = qdcf_phase_index_;
        if (pass)
            ++current_phase_.allowed;
        else
            ++current_phase_.deferred;
    }

    TimeNs from = m.gate_allowed_from_ns;
    if (q.group_mode == QdcfGroupMode::GroupByGroup) {
        const TimeNs window = q.phase_length_ns / q.group_count;
        const TimeNs win_start = phase_start + m.group * window;
        const TimeNs win_end = win_start + window;
        if (sim_.now() >= win_end) {
            // wake at the next phase start; the fresh draw happens there
            *next_allowed = phase_end;
            return false;
        }
        from = std::max(from, win_start);
        if (sim_.now() < from) {
            *next_allowed = std::min(from, phase_end);
            return false;
        }
        return true;
    }
    if (sim_.now() < from) {
        *next_allowed = std::min(from, phase_end);
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// transmissions
// ---------------------------------------------------------------------------

TimeNs Engine::airtime(NodeId tx, NodeId rx, int bytes) const {
    return channel_->airtime_ns(tx, rx, bytes);
}

void Engine::start_unicast(NodeId tx, NodeId rx, FrameKind kind, int bytes,
                           int meter, std::uint64_t frame_id, TimeNs nav_duration,
                           bool join_accept) {
    const TimeNs now = sim_.now();
    const TimeNs end = now + airtime(tx, rx, bytes);
    TxCtx ctx;
    ctx.tx = tx;
    ctx.rx = rx;
    ctx.kind = kind;
    ctx.meter = meter;
    ctx.frame_id = frame_id;
    ctx.start_ns = now;
    ctx.end_ns = end;
    ctx.nav_duration_ns = nav_duration;
    ctx.join_accept = join_accept;
    ctx.tx_id = channel_->begin_transmission(tx, rx, now, end);
    sim_.schedule(end, EventKind::TxEnd, tx, [this, ctx] { on_tx_end(ctx); });
}

void Engine::on_tx_end(TxCtx ctx) {
    const Outcome out = channel_->end_transmission(ctx.tx_id);
    if ((ctx.kind == FrameKind::Rts || ctx.kind == FrameKind::Cts) &&
        ctx.nav_duration_ns > 0)
        distribute_nav(ctx);

    switch (ctx.kind) {
        case FrameKind::Data:
            if (polling_protocol() && coll_.current_polled == ctx.meter &&
                ctx.rx == kCollectorNode) {
                on_response_end(ctx, out);
            } else {
                on_data_end(ctx, out);
            }
            break;
        case FrameKind::Null:
            on_response_end(ctx, out);
            break;
        case FrameKind::Poll:
            on_poll_end(ctx, out);
            break;
        case FrameKind::Rts:
            on_rts_end(ctx, out);
            break;
        case FrameKind::Cts:
            on_cts_end(ctx, out);
            break;
        case FrameKind::Ack:
            on_ack_end(ctx, out);
            break;
        case FrameKind::JoinReq:
            on_join_req_end(ctx, out);
            break;
        case FrameKind::JoinResp:
            on_join_resp_end(ctx, out);
            break;
        default:
            break;
    }
}

void Engine::distribute_nav(const TxCtx& ctx) {
    // Virtual carrier sense: third parties that could hear the control frame
    // and were not transmitting themselves honor the reservation.
    for (auto& m : meters_) {
        if (m.node == ctx.tx || m.node == ctx.rx) continue;
        if (m.failed || (!m.associated && !m.joining)) continue;
        if (!channel_->senses(m.node, ctx.tx)) continue;
        if (channel_->node_transmitted_during(m.node, ctx.start_ns, ctx.end_ns))
            continue;
        set_nav(m, ctx.end_ns + ctx.nav_duration_ns);
    }
}

void Engine::on_data_end(const TxCtx& ctx, Outcome out) {
    MeterCtx& m = meters_[static_cast<std::size_t>(ctx.meter)];
    if (out == Outcome::BelowSensitivity) m.attempt_below = true;
    // ACK from the collector after SIFS, if it can transmit
    if (out == Outcome::Delivered) {
        sim_.schedule_in(cfg_.mac.sifs_ns, EventKind::Timer, kCollectorNode,
                         [this, ctx] {
                             if (channel_->is_transmitting(kCollectorNode)) return;
                             start_unicast(kCollectorNode, ctx.tx, FrameKind::Ack,
                                           cfg_.mac.control_bytes, ctx.meter,
                                           ctx.frame_id, 0);
                         });
    }
    if (m.failed) return;  // radio died mid-air; no timeout chain
    TimeNs timeout = cfg_.mac.ack_timeout_ns;
    if (timeout <= 0)
        timeout = cfg_.mac.sifs_ns + airtime(kCollectorNode, m.node, cfg_.mac.control_bytes) +
                  cfg_.mac.slot_ns;
    m.response_timer = sim_.schedule_in(
        timeout, EventKind::Timer, m.node,
        [this, idx = ctx.meter] { on_response_timeout(meters_[static_cast<std::size_t>(idx)]); });
}

void Engine::on_rts_end(const TxCtx& ctx, Outcome out) {
    MeterCtx& m = meters_[static_cast<std::size_t>(ctx.meter)];
    if (out == Outcome::BelowSensitivity) m.attempt_below = true;
    if (out == Outcome::Delivered) {
        const TimeNs cts_nav =
            ctx.nav_duration_ns - cfg_.mac.sifs_ns -
            airtime(kCollectorNode, m.node, cfg_.mac.control_bytes);
        sim_.schedule_in(cfg_.mac.sifs_ns, EventKind::Timer, kCollectorNode,
                         [this, ctx, cts_nav] {
                             if (channel_->is_transmitting(kCollectorNode)) return;
                             start_unicast(kCollectorNode, ctx.tx, FrameKind::Cts,
                                           cfg_.mac.control_bytes, ctx.meter,
                                           ctx.frame_id, cts_nav);
                         });
    }
    if (m.failed) return;
    const TimeNs timeout = cfg_.mac.sifs_ns +
                           airtime(kCollectorNode, m.node, cfg_.mac.control_bytes) +
                           cfg_.mac.slot_ns;
    m.response_timer = sim_.schedule_in(
        timeout, EventKind::Timer, m.node,
        [this, idx = ctx.meter] { on_response_timeout(meters_[static_cast<std::size_t>(idx)]); });
}

void Engine::on_cts_end(const TxCtx& ctx, Outcome out) {
    MeterCtx& m = meters_[static_cast<std::size_t>(ctx.meter)];
    if (m.failed || m.st != AccessState::Exchanging || m.awaiting != Awaiting::Cts)
        return;
    if (out != Outcome::Delivered) return;  // meter keeps waiting; timeout decides
    if (m.response_timer) {
        sim_.cancel(m.response_timer);
        m.response_timer = 0;
    }
    m.awaiting = Awaiting::Ack;
    sim_.schedule_in(cfg_.mac.sifs_ns, EventKind::Timer, m.node, [this, idx = ctx.meter] {
        MeterCtx& mm = meters_[static_cast<std::size_t>(idx)];
        if (mm.failed || mm.st != AccessState::Exchanging) return;
        Frame* f = head_frame(mm);
        if (!f) return;
        start_unicast(mm.node, kCollectorNode, FrameKind::Data, f->size_bytes,
                      mm.index, f->id, 0);
    });
}

void Engine::on_ack_end(const TxCtx& ctx, Outcome out) {
    MeterCtx& m = meters_[static_cast<std::size_t>(ctx.meter)];
    if (m.failed || m.st != AccessState::Exchanging || m.awaiting != Awaiting::Ack)
        return;
    if (out == Outcome::Delivered) {
        attempt_resolved(m, true);
    }
    // a lost ACK is resolved by the meter's timeout
}

void Engine::on_join_req_end(const TxCtx& ctx, Outcome out) {
    MeterCtx& m = meters_[static_cast<std::size_t>(ctx.meter)];
    if (out == Outcome::BelowSensitivity) m.attempt_below = true;
    if (out == Outcome::Delivered) {
        if (!coll_.registered[static_cast<std::size_t>(ctx.meter)])
            register_meter(ctx.meter);
        const bool accepted = coll_.registered[static_cast<std::size_t>(ctx.meter)] != 0;
        sim_.schedule_in(cfg_.mac.sifs_ns, EventKind::Timer, kCollectorNode,
                         [this, ctx, accepted] {
                             if (channel_->is_transmitting(kCollectorNode)) return;
                             start_unicast(kCollectorNode, ctx.tx, FrameKind::JoinResp,
                                           cfg_.mac.mgmt_bytes, ctx.meter, 0, 0,
                                           accepted);
                         });
    }
    if (m.failed) return;
    const TimeNs timeout = cfg_.mac.sifs_ns +
                           airtime(kCollectorNode, m.node, cfg_.mac.mgmt_bytes) +
                           cfg_.mac.slot_ns;
    m.response_timer = sim_.schedule_in(
        timeout, EventKind::Timer, m.node,
        [this, idx = ctx.meter] { on_response_timeout(meters_[static_cast<std::size_t>(idx)]); });
}

void Engine::on_join_resp_end(const TxCtx& ctx, Outcome out) {
    MeterCtx& m = meters_[static_cast<std::size_t>(ctx.meter)];
    if (m.failed || !m.joining || out != Outcome::Delivered) return;
    if (m.response_timer) {
        sim_.cancel(m.response_timer);
        m.response_timer = 0;
    }
    m.joining = false;
    m.awaiting = Awaiting::Nothing;
    m.st = AccessState::Idle;
    if (ctx.join_accept) {
        m.associated = true;
        join_events_.push_back({m.index, sim_.now(), true, m.group, m.zc_root});
        if (!contention_protocol()) drop_listener(m);
        activate_traffic(m);
        if (contention_protocol() && m.backlogged()) start_frame(m);
    } else {
        m.join_rejected = true;
        join_events_.push_back({m.index, sim_.now(), false, -1, 0});
        drop_listener(m);
    }
}

// ---------------------------------------------------------------------------
// polling (PCF and the PP-MAC poll stage)
// ---------------------------------------------------------------------------

void Engine::start_pcf_cycle() {
    coll_.cycle_start_ns = sim_.now();
    coll_.cycle_polled = 0;
    coll_.cycle_responses = 0;
    coll_.cycle_probed_group = -1;
    coll_.cycle_detected = -1;
    coll_.status_poll_stage = false;
    coll_.cycle_pending.clear();
    for (int meter : coll_.registry_order) {
        const MeterCtx& m = meters_[static_cast<std::size_t>(meter)];
        if (m.associated && !coll_.flagged.count(meter))
            coll_.cycle_pending.push_back(meter);
    }
    if (channel_->is_transmitting(kCollectorNode) ||
        channel_->carrier_busy(kCollectorNode)) {
        // defer the beacon while a (join) transmission is arriving
        sim_.schedule_in(cfg_.mac.slot_ns, EventKind::Beacon, kCollectorNode,
                         [this] { start_pcf_cycle(); });
        return;
    }
    const TimeNs air = airtime(kCollectorNode, kCollectorNode, cfg_.mac.mgmt_bytes);
    const Channel::TxId id =
        channel_->begin_transmission(kCollectorNode, kNoNode, sim_.now(), sim_.now() + air);
    sim_.schedule_in(air, EventKind::TxEnd, kCollectorNode, [this, id] {
        channel_->end_broadcast(id);  // beacon carries timing only
        advance_poll();
    });
}

int Engine::pick_next_poll() {
    if (cfg_.protocol == Protocol::Pcf && cfg_.pcf.poll_order == PollOrder::Lcfs) {
        // Least Completed First Send: argmin completed count, meter id breaks ties
        std::size_t best = 0;
        for (std::size_t i = 1; i < coll_.cycle_pending.size(); ++i) {
            const MeterCtx& a = meters_[static_cast<std::size_t>(coll_.cycle_pending[i])];
            const MeterCtx& b = meters_[static_cast<std::size_t>(coll_.cycle_pending[best])];
            if (a.completed_frames < b.completed_frames ||
                (a.completed_frames == b.completed_frames && a.index < b.index))
                best = i;
        }
        const int chosen = coll_.cycle_pending[best];
        // independent re-check of the argmin property
        for (int other : coll_.cycle_pending) {
            const MeterCtx& o = meters_[static_cast<std::size_t>(other)];
            if (o.completed_frames <
                meters_[static_cast<std::size_t>(chosen)].completed_frames)
                throw InvariantViolation("lcfs: polled meter is not the argmin");
        }
        ++lcfs_checks_;
        coll_.cycle_pending.erase(coll_.cycle_pending.begin() +
                                  static_cast<std::ptrdiff_t>(best));
        return chosen;
    }
    const int chosen = coll_.cycle_pending.front();
    coll_.cycle_pending.erase(coll_.cycle_pending.begin());
    return chosen;
}

void Engine::advance_poll() {
    if (!coll_.cycle_pending.empty()) {
        const bool status = coll_.status_poll_stage;
        const int meter = status ? coll_.cycle_pending.front() : pick_next_poll();
        if (status) coll_.cycle_pending.clear();
        sim_.schedule_in(cfg_.mac.sifs_ns, EventKind::Poll, kCollectorNode,
                         [this, meter, status] { do_poll(meter, status); });
        return;
    }
    if (cfg_.protocol == Protocol::Pcf && !coll_.status_poll_stage &&
        !coll_.flagged.empty()) {
        // one status poll per cycle over the flagged set, rotating
        coll_.status_poll_stage = true;
        std::vector<int> flagged(coll_.flagged.begin(), coll_.flagged.end());
        const int meter = flagged[coll_.status_rotate % flagged.size()];
        ++coll_.status_rotate;
        coll_.cycle_pending.push_back(meter);
        advance_poll();
        return;
    }
    finish_cycle();
}

void Engine::do_poll(int meter, bool status_poll) {
    if (channel_->is_transmitting(kCollectorNode) ||
        channel_->carrier_busy(kCollectorNode)) {
        sim_.schedule_in(cfg_.mac.slot_ns, EventKind::Poll, kCollectorNode,
                         [this, meter, status_poll] { do_poll(meter, status_poll); });
        return;
    }
    coll_.current_polled = meter;
    if (!status_poll) ++coll_.cycle_polled;
    MeterCtx& m = meters_[static_cast<std::size_t>(meter)];
    // the frame_id slot carries the status-poll flag
    start_unicast(kCollectorNode, m.node, FrameKind::Poll, cfg_.mac.mgmt_bytes, meter,
                  status_poll ? 1 : 0, 0);
}

void Engine::on_poll_end(const TxCtx& ctx, Outcome out) {
    const int meter = ctx.meter;
    const bool status_poll = ctx.frame_id == 1;
    MeterCtx& m = meters_[static_cast<std::size_t>(meter)];

    TimeNs timeout = cfg_.protocol == Protocol::Ppmac ? cfg_.ppmac.response_timeout_ns
                                                      : cfg_.pcf.response_timeout_ns;
    if (timeout <= 0)
        timeout = cfg_.mac.sifs_ns + airtime(m.node, kCollectorNode, cfg_.mac.control_bytes) +
                  cfg_.mac.slot_ns;
    coll_.poll_timeout_timer =
        sim_.schedule_in(timeout, EventKind::Timer, kCollectorNode,
                         [this, meter, status_poll] { on_poll_timeout(meter, status_poll); });

    if (out != Outcome::Delivered) return;
    if (m.failed || !m.associated) return;
    if (channel_->is_transmitting(m.node)) return;

    sim_.schedule_in(cfg_.mac.sifs_ns, EventKind::Timer, m.node,
                     [this, meter, status_poll] {
                         MeterCtx& mm = meters_[static_cast<std::size_t>(meter)];
                         if (mm.failed || channel_->is_transmitting(mm.node)) return;
                         Frame* f = status_poll ? nullptr : head_frame(mm);
                         if (f && !mm.joining) {
                             ++record_of(f->id).attempts;
                             start_unicast(mm.node, kCollectorNode, FrameKind::Data,
                                           f->size_bytes, meter, f->id, 0);
                         } else {
                             start_unicast(mm.node, kCollectorNode, FrameKind::Null,
                                           cfg_.mac.control_bytes, meter, 0, 0);
                         }
                     });
}

void Engine::on_poll_timeout(int meter, bool status_poll) {
    coll_.poll_timeout_timer = 0;
    (void)status_poll;
    if (coll_.current_polled != meter) return;
    MeterCtx& m = meters_[static_cast<std::size_t>(meter)];
    if (channel_->has_active_tx_between(m.node, kCollectorNode))
        return;  // a long response is still in flight; its end advances the cycle
    coll_.current_polled = -1;
    record_miss(meter);
    advance_poll();
}

void Engine::record_miss(int meter) {
    MeterCtx& m = meters_[static_cast<std::size_t>(meter)];
    int& misses = coll_.miss_count[static_cast<std::size_t>(meter)];
    if (misses == 0) m.first_miss_ns = sim_.now();
    ++misses;
    if (misses == silent_threshold() && !coll_.flagged.count(meter)) {
        coll_.flagged.insert(meter);
        const TimeNs reference = m.failed && m.fail_time_ns >= 0 ? m.fail_time_ns
                                                                 : m.first_miss_ns;
        metrics_.on_flagged(meter, sim_.now(), sim_.now() - reference);
    }
}

void Engine::record_response_ok(int meter) {
    coll_.miss_count[static_cast<std::size_t>(meter)] = 0;
    meters_[static_cast<std::size_t>(meter)].first_miss_ns = -1;
    if (coll_.flagged.erase(meter) > 0)
        unflag_events_.push_back({meter, sim_.now()});
}

void Engine::on_response_end(const TxCtx& ctx, Outcome out) {
    if (coll_.poll_timeout_timer) {
        sim_.cancel(coll_.poll_timeout_timer);
        coll_.poll_timeout_timer = 0;
    }
    const int meter = ctx.meter;
    coll_.current_polled = -1;
    MeterCtx& m = meters_[static_cast<std::size_t>(meter)];

    if (out == Outcome::Delivered) {
        ++coll_.cycle_responses;
        record_response_ok(meter);
        if (ctx.kind == FrameKind::Data) {
            metrics_.on_attempt(meter, sim_.now(), AttemptOutcome::Success);
            Frame* f = head_frame(m);
            if (f && f->id == ctx.frame_id) complete_frame(m, *f, sim_.now());
        }
    } else if (ctx.kind == FrameKind::Data) {
        metrics_.on_attempt(meter, sim_.now(),
                            out == Outcome::BelowSensitivity
                                ? AttemptOutcome::BelowSensitivity
                                : AttemptOutcome::Collision);
        record_miss(meter);
    } else {
        record_miss(meter);
    }
    advance_poll();
}

void Engine::finish_cycle() {
    CycleRecord rec;
    rec.index = coll_.cycle_index++;
    rec.start_ns = coll_.cycle_start_ns;
    rec.length_ns = sim_.now() - coll_.cycle_start_ns;
    rec.polled = coll_.cycle_polled;
    rec.responses = coll_.cycle_responses;
    rec.probed_group = coll_.cycle_probed_group;
    rec.detected = coll_.cycle_detected;
    cycles_.push_back(rec);
    metrics_.on_cycle(rec);

    if (cfg_.protocol == Protocol::Pcf) {
        const TimeNs next =
            std::max(coll_.cycle_start_ns + cfg_.pcf.beacon_interval_ns, sim_.now());
        sim_.schedule(next, EventKind::Beacon, kCollectorNode,
                      [this] { start_pcf_cycle(); });
    } else {
        sim_.schedule(sim_.now(), EventKind::Probe, kCollectorNode,
                      [this] { start_ppmac_cycle(); });
    }
}

void Engine::start_ppmac_cycle() {
    coll_.cycle_start_ns = sim_.now();
    coll_.cycle_polled = 0;
    coll_.cycle_responses = 0;
    coll_.status_poll_stage = false;
    coll_.cycle_pending.clear();
    const int group = static_cast<int>(coll_.cycle_index % group_count());
    coll_.cycle_probed_group = group;
    coll_.cycle_detected = 0;

    if (channel_->is_transmitting(kCollectorNode) ||
        channel_->carrier_busy(kCollectorNode)) {
        sim_.schedule_in(cfg_.mac.slot_ns, EventKind::Probe, kCollectorNode,
                         [this] { start_ppmac_cycle(); });
        return;
    }
    const TimeNs air = airtime(kCollectorNode, kCollectorNode, cfg_.mac.mgmt_bytes);
    const Channel::TxId id =
        channel_->begin_transmission(kCollectorNode, kNoNode, sim_.now(), sim_.now() + air);
    sim_.schedule_in(air, EventKind::TxEnd, kCollectorNode,
                     [this, id, group] { after_probe(id, group); });
}

void Engine::after_probe(Channel::TxId id, int group) {
    const Channel::BroadcastEnd bend = channel_->end_broadcast(id);
    std::vector<int> responders;
    for (const auto& m : meters_) {
        if (m.group != group || !m.associated || m.failed) continue;
        if (!m.backlogged()) continue;
        if (channel_->broadcast_outcome(bend, m.node) != Outcome::Delivered) continue;
        responders.push_back(m.index);
    }
    const TimeNs slot = cfg_.ppmac.probe_ack_slot_ns();
    const TimeNs slot_start = sim_.now() + cfg_.mac.sifs_ns;
    const TimeNs slot_end = slot_start + slot;
    metrics_.add_busy_interval(std::min(slot_start, cfg_.duration_ns),
                               std::min(slot_end, cfg_.duration_ns));
    sim_.schedule(slot_end, EventKind::Probe, kCollectorNode,
                  [this, group, responders = std::move(responders)]() mutable {
                      after_ack_slot(group, std::move(responders));
                  });
}

void Engine::after_ack_slot(int group, std::vector<int> responders) {
    GroupCodebook& cb = codebooks_[static_cast<std::size_t>(group)];
    if (cb.dirty) {
        cb.roots.clear();
        cb.meters.clear();
        cb.sequences.clear();
        std::vector<std::pair<int, int>> pairs;  // (root, meter)
        for (const auto& m : meters_)
            if (m.group == group && m.zc_root > 0 &&
                coll_.registered[static_cast<std::size_t>(m.index)])
                pairs.emplace_back(m.zc_root, m.index);
        std::sort(pairs.begin(), pairs.end());
        for (const auto& [root, meter] : pairs) {
            cb.roots.push_back(root);
            cb.meters.push_back(meter);
            cb.sequences.push_back(zc_generate(root, cfg_.ppmac.zc_length));
        }
        cb.dirty = false;
    }

    std::set<int> detected_meters;
    if (!cb.sequences.empty() && !responders.empty()) {
        std::vector<int> active;
        for (int meter : responders) {
            const int root = meters_[static_cast<std::size_t>(meter)].zc_root;
            const auto it = std::lower_bound(cb.roots.begin(), cb.roots.end(), root);
            active.push_back(static_cast<int>(it - cb.roots.begin()));
        }
        const auto received = superpose_probe_acks(cb.sequences, active,
                                                   cfg_.ppmac.noise_sigma, zc_noise_rng_);
        const auto detected = detect_responders(received, cb.sequences,
                                                cfg_.ppmac.detection_threshold);
        for (int idx : detected)
            detected_meters.insert(cb.meters[static_cast<std::size_t>(idx)]);
    }

    coll_.cycle_detected = static_cast<int>(detected_meters.size());
    for (int meter : detected_meters)
        if (!coll_.flagged.count(meter)) coll_.cycle_pending.push_back(meter);
    advance_poll();
}

// ---------------------------------------------------------------------------
// qdcf phases
// ---------------------------------------------------------------------------

void Engine::flush_phase_record() {
    if (qdcf_phase_index_ >= 0) phases_.push_back(current_phase_);
}

void Engine::start_qdcf_phase(long index) {
    flush_phase_record();
    qdcf_phase_index_ = index;
    current_phase_ = QdcfPhaseRecord{index, sim_.now(), 0, 0};

    // The (Q, T) broadcast reaches every meter by assumption (the downlink
    // covers the cell); it costs no airtime so the uplink contention is the
    // only phenomenon under study.
    for (auto& m : meters_) {
        if (!m.associated || m.failed || !m.backlogged()) continue;
        TimeNs next_allowed = 0;
        if (m.st == AccessState::Blocked || m.st == AccessState::Idle) {
            if (gate_allows(m, &next_allowed)) {
                try_contend(m);
            } else {
                m.st = AccessState::Blocked;
                arm_wake(m, next_allowed);
            }
        } else if (m.st == AccessState::Counting) {
            if (!gate_allows(m, &next_allowed)) {
                freeze_countdown(m);
                arm_wake(m, next_allowed);
            }
        }
    }

    const TimeNs next = (index + 1) * cfg_.qdcf.phase_length_ns;
    if (next <= cfg_.duration_ns)
        sim_.schedule(next, EventKind::Timer, kCollectorNode,
                      [this, index] { start_qdcf_phase(index + 1); });
}

// ---------------------------------------------------------------------------
// faults and joins
// ---------------------------------------------------------------------------

void Engine::on_fail(int meter) {
    MeterCtx& m = meters_[static_cast<std::size_t>(meter)];
    m.failed = true;
    m.fail_time_ns = sim_.now();
    if (m.countdown_timer) {
        sim_.cancel(m.countdown_timer);
        m.countdown_timer = 0;
    }
    if (m.response_timer) {
        sim_.cancel(m.response_timer);
        m.response_timer = 0;
    }
    if (m.wake_timer) {
        sim_.cancel(m.wake_timer);
        m.wake_timer = 0;
    }
    m.st = AccessState::Idle;
    m.awaiting = Awaiting::Nothing;
}

void Engine::on_recover(int meter) {
    MeterCtx& m = meters_[static_cast<std::size_t>(meter)];
    m.failed = false;
    m.fail_time_ns = -1;
    if (m.joining) {
        m.cw = edca_classify(cfg_.mac, m.join_frame.priority).cw_min;
        m.attempts_for_head = 0;
        begin_attempt(m);
        return;
    }
    if (contention_protocol() && m.backlogged()) start_frame(m);
}

void Engine::start_join(int meter) {
    MeterCtx& m = meters_[static_cast<std::size_t>(meter)];
    if (m.associated || m.join_rejected) return;
    m.joining = true;
    m.join_frame = Frame{0,          m.node,        kCollectorNode,
                         FrameKind::JoinReq, Priority::High, cfg_.mac.mgmt_bytes,
                         sim_.now()};
    ensure_listener(m);
    m.cw = edca_classify(cfg_.mac, Priority::High).cw_min;
    m.attempts_for_head = 0;
    if (!m.failed) begin_attempt(m);
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

RunResult Engine::run() {
    cfg_.validate();
    setup();
    sim_.run_until(cfg_.duration_ns);
    channel_->flush_busy(cfg_.duration_ns);
    if (cfg_.protocol == Protocol::Qdcf) flush_phase_record();

    long queued = 0;
    for (const auto& m : meters_)
        queued += static_cast<long>(m.queue_high.size() + m.queue_low.size());

    RunResult result;
    result.report = metrics_.finalize(cfg_.duration_ns, queued);
    result.frames = std::move(frames_);
    result.cycles = std::move(cycles_);
    result.joins = std::move(join_events_);
    result.unflags = std::move(unflag_events_);
    result.qdcf_phases = std::move(phases_);
    result.lcfs_checks = lcfs_checks_;
    return result;
}

}  // namespace

RunResult run_simulation(const SimConfig& cfg) {
    Engine engine(cfg);
    return engine.run();
}

}  // namespace smn
