#include "smn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "smn/errors.hpp"

namespace smn {

double jain_index(const std::vector<double>& values) {
    if (values.empty()) throw AllZero("jain_index: no values");
    double sum = 0.0, sum_sq = 0.0;
    for (const double v : values) {
        if (v < 0.0) throw DomainError("jain_index: values must be nonnegative");
        sum += v;
        sum_sq += v * v;
    }
    if (sum_sq == 0.0) throw AllZero("jain_index: all values are zero");
    return sum * sum / (static_cast<double>(values.size()) * sum_sq);
}

void Metrics::set_meter_count(int n) {
    meter_count_ = n;
    delivered_per_meter_.assign(static_cast<std::size_t>(n), 0);
    generated_per_meter_.assign(static_cast<std::size_t>(n), 0);
    payload_bits_per_meter_.assign(static_cast<std::size_t>(n), 0);
}

void Metrics::check_order(TimeNs t) {
    if (t < last_event_ns_) throw OutOfOrder("metrics: event timestamps regressed");
    last_event_ns_ = t;
}

void Metrics::on_generated(int meter, Priority, TimeNs t) {
    check_order(t);
    ++generated_;
    ++generated_per_meter_.at(static_cast<std::size_t>(meter));
}

void Metrics::on_attempt(int meter, TimeNs t, AttemptOutcome outcome) {
    (void)meter;
    check_order(t);
    ++attempts_;
    if (outcome == AttemptOutcome::Collision) ++collisions_;
    if (outcome == AttemptOutcome::BelowSensitivity) ++below_;
}

void Metrics::on_completed(int meter, Priority cls, TimeNs enqueue_ns,
                           TimeNs complete_ns, int payload_bytes) {
    check_order(complete_ns);
    ++delivered_;
    const TimeNs delay = complete_ns - enqueue_ns;
    delays_all_.push_back(delay);
    (cls == Priority::High ? delays_high_ : delays_low_).push_back(delay);
    ++delivered_per_meter_.at(static_cast<std::size_t>(meter));
    payload_bits_per_meter_.at(static_cast<std::size_t>(meter)) +=
        8LL * payload_bytes;
}

void Metrics::on_dropped(int meter, Priority, TimeNs t) {
    (void)meter;
    check_order(t);
    ++dropped_;
}

void Metrics::on_cycle(const CycleRecord& cycle) {
    check_order(cycle.start_ns + cycle.length_ns);
    cycle_lengths_.push_back(cycle.length_ns);
}

void Metrics::on_flagged(int meter, TimeNs t, TimeNs latency_ns) {
    check_order(t);
    flags_.push_back({meter, t, latency_ns});
}

void Metrics::add_busy_interval(TimeNs from_ns, TimeNs to_ns) {
    busy_ns_ += to_ns - from_ns;
}

namespace {

DelayStats delay_stats(std::vector<TimeNs> delays) {
    std::sort(delays.begin(), delays.end());
    const auto n = delays.size();
    auto nearest_rank = [&](double q) {
        const auto rank = static_cast<std::size_t>(
            std::ceil(q * static_cast<double>(n)));
        return delays[std::min(n - 1, std::max<std::size_t>(rank, 1) - 1)];
    };
    DelayStats st;
    st.count = static_cast<long>(n);
    st.mean_ns = std::accumulate(delays.begin(), delays.end(), 0.0) /
                 static_cast<double>(n);
    st.p50_ns = nearest_rank(0.50);
    st.p95_ns = nearest_rank(0.95);
    st.p99_ns = nearest_rank(0.99);
    st.max_ns = delays.back();
    return st;
}

}  // namespace

MetricsReport Metrics::finalize(TimeNs duration_ns, long queued) const {
    MetricsReport r;
    r.generated = generated_;
    r.delivered = delivered_;
    r.dropped = dropped_;
    r.queued = queued;
    if (delivered_ + dropped_ + queued != generated_)
        throw InvariantViolation(
            "metrics: delivered + dropped + queued != generated");

    r.attempts = attempts_;
    r.collisions = collisions_;
    r.below_sensitivity = below_;
    r.collision_ratio =
        attempts_ > 0 ? static_cast<double>(collisions_) / attempts_ : 0.0;

    if (!delays_all_.empty()) r.delay_all = delay_stats(delays_all_);
    if (!delays_high_.empty()) r.delay_high = delay_stats(delays_high_);
    if (!delays_low_.empty()) r.delay_low = delay_stats(delays_low_);

    r.delivered_per_meter = delivered_per_meter_;
    r.throughput_per_meter_bps.resize(delivered_per_meter_.size(), 0.0);
    double total_bits = 0.0;
    for (std::size_t i = 0; i < payload_bits_per_meter_.size(); ++i) {
        total_bits += static_cast<double>(payload_bits_per_meter_[i]);
        if (duration_ns > 0)
            r.throughput_per_meter_bps[i] =
                static_cast<double>(payload_bits_per_meter_[i]) * 1e9 /
                static_cast<double>(duration_ns);
    }
    if (duration_ns > 0) {
        r.throughput_bps = total_bits * 1e9 / static_cast<double>(duration_ns);
        r.airtime_utilization =
            static_cast<double>(busy_ns_) / static_cast<double>(duration_ns);
    }

    // fairness over meters that offered any traffic
    std::vector<double> counts;
    for (std::size_t i = 0; i < delivered_per_meter_.size(); ++i)
        if (generated_per_meter_[i] > 0)
            counts.push_back(static_cast<double>(delivered_per_meter_[i]));
    if (!counts.empty()) {
        try {
            r.jain_index = jain_index(counts);
        } catch (const AllZero&) {
            r.jain_index.reset();
        }
    }

    if (!cycle_lengths_.empty()) {
        CycleStats cs;
        cs.count = static_cast<long>(cycle_lengths_.size());
        cs.min_ns = *std::min_element(cycle_lengths_.begin(), cycle_lengths_.end());
        cs.max_ns = *std::max_element(cycle_lengths_.begin(), cycle_lengths_.end());
        cs.mean_ns = std::accumulate(cycle_lengths_.begin(), cycle_lengths_.end(), 0.0) /
                     static_cast<double>(cycle_lengths_.size());
        r.cycles = cs;
    }
    r.silent_flags = flags_;
    return r;
}

}  // namespace smn
