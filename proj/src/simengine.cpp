#include "smn/simengine.hpp"

#include <cmath>

#include "smn/errors.hpp"

namespace smn {

std::uint64_t Simulator::schedule(TimeNs time_ns, EventKind kind, NodeId target,
                                  std::function<void()> action) {
    if (time_ns < clock_) throw PastEvent("schedule: event time before current clock");
    const std::uint64_t seq = next_seq_++;
    queue_.push(Entry{SimEvent{time_ns, seq, kind, target}, std::move(action)});
    return seq;
}

std::uint64_t Simulator::schedule_in(TimeNs delay_ns, EventKind kind, NodeId target,
                                     std::function<void()> action) {
    return schedule(clock_ + delay_ns, kind, target, std::move(action));
}

void Simulator::cancel(std::uint64_t seq) { canceled_.insert(seq); }

void Simulator::run_until(TimeNs t_end_ns) {
    if (t_end_ns < clock_) throw DomainError("run_until: t_end before current clock");
    while (!queue_.empty()) {
        if (queue_.top().event.time_ns > t_end_ns) break;
        Entry entry = queue_.top();
        queue_.pop();
        if (canceled_.erase(entry.event.seq) > 0) continue;
        clock_ = entry.event.time_ns;
        ++dispatched_;
        entry.action();
    }
    clock_ = t_end_ns;
}

CellTopology sample_topology_count(double cell_radius_m, std::size_t meter_count,
                                   Rng& stream) {
    if (!(cell_radius_m >= 1.0))
        throw DomainError("sample_topology: cell radius must be >= 1 m");
    CellTopology topo;
    topo.cell_radius_m = cell_radius_m;
    topo.positions.reserve(meter_count);
    for (std::size_t i = 0; i < meter_count; ++i) {
        const double u = stream.uniform01();
        const double v = stream.uniform01();
        topo.positions.push_back(
            {cell_radius_m * std::sqrt(u), 6.283185307179586 * v});
    }
    return topo;
}

CellTopology sample_topology_density(double cell_radius_m, double density_per_m2,
                                     Rng& stream) {
    if (!(density_per_m2 > 0))
        throw DomainError("sample_topology: density must be > 0");
    const double expected =
        density_per_m2 * 3.141592653589793 * cell_radius_m * cell_radius_m;
    const auto count = static_cast<std::size_t>(std::llround(expected));
    return sample_topology_count(cell_radius_m, count, stream);
}

}  // namespace smn
