#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <unordered_set>
#include <vector>

#include "smn/rng.hpp"

namespace smn {

// Simulated time in integer nanoseconds; exact for the microsecond-scale
// MAC intervals and immune to floating-point event-order nondeterminism.
using TimeNs = std::int64_t;

// Node identifier inside one simulation; 0 is the collector by convention,
// meters are 1..N.
using NodeId = int;

constexpr NodeId kNoNode = -1;

enum class EventKind : std::uint8_t {
    Timer,
    TxStart,
    TxEnd,
    FrameArrival,
    Poll,
    Probe,
    Beacon,
    Join,
    Fail,
};

struct SimEvent {
    TimeNs time_ns = 0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::Timer;
    NodeId target = kNoNode;
};

// Deterministic discrete-event loop.  Events dispatch in strict lexicographic
// (time_ns, seq) order; seq is assigned in schedule-call order so ties break
// deterministically.
class Simulator {
public:
    TimeNs now() const { return clock_; }

    // Returns the event's seq (usable with cancel).  Throws PastEvent when
    // time_ns < now().
    std::uint64_t schedule(TimeNs time_ns, EventKind kind, NodeId target,
                           std::function<void()> action);
    std::uint64_t schedule_in(TimeNs delay_ns, EventKind kind, NodeId target,
                              std::function<void()> action);

    // Lazy cancellation; a canceled event is skipped at dispatch time.
    void cancel(std::uint64_t seq);

    // Dispatches until the queue is empty or the next event lies beyond
    // t_end_ns; the clock equals t_end_ns on return.
    void run_until(TimeNs t_end_ns);

    std::uint64_t dispatched_count() const { return dispatched_; }

private:
    struct Entry {
        SimEvent event;
        std::function<void()> action;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.event.time_ns != b.event.time_ns)
                return a.event.time_ns > b.event.time_ns;
            return a.event.seq > b.event.seq;
        }
    };

    TimeNs clock_ = 0;
    std::uint64_t next_seq_ = 1;
    std::uint64_t dispatched_ = 0;
    std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
    std::unordered_set<std::uint64_t> canceled_;
};

// Meter placement in collector-centered polar coordinates.
struct MeterPosition {
    double r_m = 0.0;
    double theta_rad = 0.0;
};

struct CellTopology {
    double cell_radius_m = 0.0;
    std::vector<MeterPosition> positions;

    std::size_t meter_count() const { return positions.size(); }
};

// Samples meter positions uniformly over the disk: r = R*sqrt(u) induces
// the radial density f(r) = 2r/R^2.
CellTopology sample_topology_count(double cell_radius_m, std::size_t meter_count,
                                   Rng& stream);

// meter_count = round(density * pi * R^2)
CellTopology sample_topology_density(double cell_radius_m, double density_per_m2,
                                     Rng& stream);

}  // namespace smn
