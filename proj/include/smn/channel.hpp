#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "smn/radiolink.hpp"
#include "smn/simengine.hpp"

namespace smn {

enum class SensingMode { PairwiseRange, AggregatePower };

enum class Outcome : std::uint8_t { Delivered, Collided, BelowSensitivity };

const char* outcome_name(Outcome o);

struct ChannelConfig {
    RadioParams radio;
    SensingMode sensing_mode = SensingMode::PairwiseRange;
    // Fixed PHY rate for frame airtimes; 0 selects the per-distance
    // achievable BPSK rate between the endpoints.
    double fixed_rate_bps = 1e5;
    TimeNs phy_header_ns = 0;
};

// Receives local busy/idle edges of the meter's carrier-sense view.
class MediumListener {
public:
    virtual void on_medium_busy() = 0;
    virtual void on_medium_idle() = 0;

protected:
    ~MediumListener() = default;
};

// Shared-medium state: concurrent transmission tracking, per-node carrier
// sensing, and SINR-based reception outcomes.  Node 0 is the collector at
// the origin; node i (>=1) is meter i-1.  Mutated only by the simulation
// loop.
class Channel {
public:
    using TxId = std::uint64_t;

    Channel(ChannelConfig cfg, const std::vector<MeterPosition>& meters);

    int node_count() const { return static_cast<int>(pos_.size()); }
    const ChannelConfig& config() const { return cfg_; }
    double carrier_sense_range() const { return sense_range_m_; }

    double distance_m(NodeId a, NodeId b) const;
    // Received power with the distance clamped to the 1 m model floor, so
    // randomly colocated meters stay inside the path-loss domain.
    double rx_power_w(NodeId tx, NodeId rx) const;
    TimeNs airtime_ns(NodeId tx, NodeId rx, int size_bytes) const;

    void register_listener(NodeId node, MediumListener* listener);
    void unregister_listener(NodeId node);
    bool carrier_busy(NodeId node) const;

    bool is_transmitting(NodeId node) const;
    bool has_active_tx_between(NodeId tx, NodeId rx) const;
    bool node_transmitted_during(NodeId node, TimeNs from_ns, TimeNs to_ns) const;
    // True when `node` hears `tx` at or above the energy-detection threshold.
    bool senses(NodeId node, NodeId tx) const;

    // rx == kNoNode starts a broadcast.  One active transmission per node.
    TxId begin_transmission(NodeId tx, NodeId rx, TimeNs start_ns, TimeNs end_ns);

    // Whole-frame SINR rule: Delivered iff the SINR stayed at or above the
    // threshold throughout; BelowSensitivity iff the interference-free SNR
    // is already under it; Collided otherwise (including a receiver that
    // transmitted during the frame).
    Outcome end_transmission(TxId id);

    struct BroadcastEnd {
        NodeId tx = kNoNode;
        TimeNs start_ns = 0;
        TimeNs end_ns = 0;
        std::vector<NodeId> overlapping_txs;  // foreign transmitters seen
    };
    BroadcastEnd end_broadcast(TxId id);
    // Per-recipient outcome; interference is the conservative sum over every
    // transmitter that overlapped the broadcast anywhere in time.
    Outcome broadcast_outcome(const BroadcastEnd& b, NodeId rx) const;

    // Called with each maximal busy interval of the medium (union over all
    // transmissions); feeds airtime-utilization accounting.
    void set_busy_interval_sink(std::function<void(TimeNs, TimeNs)> sink);
    void flush_busy(TimeNs end_ns);

private:
    struct Active {
        TxId id;
        NodeId tx, rx;
        TimeNs start_ns, end_ns;
        double signal_w = 0.0;            // at rx (unicast only)
        double interference_w = 0.0;      // current aggregate at rx
        double peak_interference_w = 0.0;
        bool rx_deaf = false;
        std::vector<NodeId> overlapping_txs;  // broadcast only
    };

    struct Vec2 {
        double x, y;
    };

    std::size_t find_active(TxId id) const;
    void update_listener_on_begin(NodeId tx);
    void update_listener_on_end(NodeId tx);
    void busy_count_changed(TimeNs now, int delta);

    ChannelConfig cfg_;
    std::vector<Vec2> pos_;
    double sense_range_m_ = 0.0;
    double sense_threshold_w_ = 0.0;
    double noise_w_ = 0.0;
    double sinr_threshold_linear_ = 0.0;

    std::vector<Active> active_;
    TxId next_id_ = 1;

    // per-node transmit bookkeeping
    std::vector<std::uint8_t> transmitting_;
    std::vector<TimeNs> tx_started_;
    std::vector<TimeNs> last_tx_end_;

    // carrier-sense views of registered listeners
    struct SenseState {
        MediumListener* listener = nullptr;
        int count = 0;        // pairwise: sensed transmitter count
        double power_w = 0.0; // aggregate mode
    };
    std::map<NodeId, SenseState> listeners_;

    mutable std::vector<double> rate_to_collector_;  // lazy per-meter cache

    std::function<void(TimeNs, TimeNs)> busy_sink_;
    int global_active_ = 0;
    TimeNs busy_open_ns_ = 0;
};

}  // namespace smn
