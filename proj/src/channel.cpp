#include "smn/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "smn/errors.hpp"

namespace smn {

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Delivered: return "delivered";
        case Outcome::Collided: return "collided";
        case Outcome::BelowSensitivity: return "below-sensitivity";
    }
    return "?";
}

Channel::Channel(ChannelConfig cfg, const std::vector<MeterPosition>& meters)
    : cfg_(cfg) {
    cfg_.radio.validate();
    pos_.reserve(meters.size() + 1);
    pos_.push_back({0.0, 0.0});  // collector
    for (const auto& m : meters)
        pos_.push_back({m.r_m * std::cos(m.theta_rad), m.r_m * std::sin(m.theta_rad)});

    sense_range_m_ = carrier_sense_range_m(cfg_.radio);
    sense_threshold_w_ = db_to_linear(cfg_.radio.carrier_sense_threshold_dbw);
    noise_w_ = noise_power_w(cfg_.radio);
    sinr_threshold_linear_ = db_to_linear(cfg_.radio.sinr_threshold_db);

    transmitting_.assign(pos_.size(), 0);
    tx_started_.assign(pos_.size(), 0);
    last_tx_end_.assign(pos_.size(), std::numeric_limits<TimeNs>::min());
    rate_to_collector_.assign(pos_.size(), 0.0);
}

double Channel::distance_m(NodeId a, NodeId b) const {
    if (a < 0 || b < 0 || a >= node_count() || b >= node_count())
        throw UnknownNode("channel: node id out of range");
    const double dx = pos_[static_cast<std::size_t>(a)].x - pos_[static_cast<std::size_t>(b)].x;
    const double dy = pos_[static_cast<std::size_t>(a)].y - pos_[static_cast<std::size_t>(b)].y;
    return std::sqrt(dx * dx + dy * dy);
}

double Channel::rx_power_w(NodeId tx, NodeId rx) const {
    const double d = std::max(1.0, distance_m(tx, rx));
    return db_to_linear(rx_power_dbw(cfg_.radio, d));
}

TimeNs Channel::airtime_ns(NodeId tx, NodeId rx, int size_bytes) const {
    double rate = cfg_.fixed_rate_bps;
    if (rate <= 0.0) {
        // per-distance BPSK rate; cache the meter<->collector pairs
        if (tx == 0 || rx == 0) {
            const NodeId meter = (tx == 0) ? rx : tx;
            double& cached = rate_to_collector_[static_cast<std::size_t>(meter)];
            if (cached == 0.0)
                cached = achievable_rate_bps(cfg_.radio,
                                             std::max(1.0, distance_m(tx, rx)));
            rate = cached;
        } else {
            rate = achievable_rate_bps(cfg_.radio, std::max(1.0, distance_m(tx, rx)));
        }
        if (rate <= 0.0)
            throw DomainError("airtime: achievable rate is zero at this distance");
    }
    const double bits = 8.0 * size_bytes;
    return cfg_.phy_header_ns + static_cast<TimeNs>(std::llround(bits * 1e9 / rate));
}

void Channel::register_listener(NodeId node, MediumListener* listener) {
    if (node < 0 || node >= node_count()) throw UnknownNode("register_listener");
    SenseState st;
    st.listener = listener;
    for (const auto& a : active_) {
        if (a.tx == node) continue;
        if (cfg_.sensing_mode == SensingMode::PairwiseRange) {
            if (distance_m(a.tx, node) <= sense_range_m_) ++st.count;
        } else {
            st.power_w += rx_power_w(a.tx, node);
        }
    }
    listeners_[node] = st;
}

void Channel::unregister_listener(NodeId node) { listeners_.erase(node); }

bool Channel::carrier_busy(NodeId node) const {
    if (node < 0 || node >= node_count()) throw UnknownNode("carrier_busy");
    if (cfg_.sensing_mode == SensingMode::PairwiseRange) {
        for (const auto& a : active_)
            if (a.tx != node && distance_m(a.tx, node) <= sense_range_m_) return true;
        return false;
    }
    double sum = 0.0;
    for (const auto& a : active_)
        if (a.tx != node) sum += rx_power_w(a.tx, node);
    return sum >= sense_threshold_w_;
}

bool Channel::is_transmitting(NodeId node) const {
    return transmitting_[static_cast<std::size_t>(node)] != 0;
}

bool Channel::has_active_tx_between(NodeId tx, NodeId rx) const {
    for (const auto& a : active_)
        if (a.tx == tx && a.rx == rx) return true;
    return false;
}

bool Channel::node_transmitted_during(NodeId node, TimeNs from_ns,
                                      TimeNs to_ns) const {
    const auto n = static_cast<std::size_t>(node);
    if (transmitting_[n] && tx_started_[n] < to_ns) return true;
    return last_tx_end_[n] > from_ns;
}

bool Channel::senses(NodeId node, NodeId tx) const {
    if (node == tx) return false;
    if (cfg_.sensing_mode == SensingMode::PairwiseRange)
        return distance_m(tx, node) <= sense_range_m_;
    return rx_power_w(tx, node) >= sense_threshold_w_;
}

void Channel::busy_count_changed(TimeNs now, int delta) {
    const int before = global_active_;
    global_active_ += delta;
    if (before == 0 && global_active_ == 1) {
        busy_open_ns_ = now;
    } else if (before == 1 && global_active_ == 0 && busy_sink_) {
        busy_sink_(busy_open_ns_, now);
    }
}

Channel::TxId Channel::begin_transmission(NodeId tx, NodeId rx, TimeNs start_ns,
                                          TimeNs end_ns) {
    if (tx < 0 || tx >= node_count()) throw UnknownNode("begin_transmission: tx");
    if (rx != kNoNode && (rx < 0 || rx >= node_count()))
        throw UnknownNode("begin_transmission: rx");
    if (end_ns <= start_ns)
        throw DomainError("begin_transmission: end must follow start");
    if (transmitting_[static_cast<std::size_t>(tx)])
        throw InvariantViolation("begin_transmission: node already transmitting");

    Active a;
    a.id = next_id_++;
    a.tx = tx;
    a.rx = rx;
    a.start_ns = start_ns;
    a.end_ns = end_ns;
    if (rx != kNoNode) {
        a.signal_w = rx_power_w(tx, rx);
        a.rx_deaf = is_transmitting(rx);
        for (const auto& other : active_) {
            if (other.tx == rx) continue;  // the deaf case above
            a.interference_w += rx_power_w(other.tx, rx);
        }
        a.peak_interference_w = a.interference_w;
    } else {
        for (const auto& other : active_) a.overlapping_txs.push_back(other.tx);
    }

    // the new transmitter interferes with every in-flight reception
    for (auto& other : active_) {
        if (other.rx == kNoNode) {
            other.overlapping_txs.push_back(tx);
            continue;
        }
        if (other.rx == tx) {
            other.rx_deaf = true;
            continue;
        }
        other.interference_w += rx_power_w(tx, other.rx);
        other.peak_interference_w =
            std::max(other.peak_interference_w, other.interference_w);
    }

    transmitting_[static_cast<std::size_t>(tx)] = 1;
    tx_started_[static_cast<std::size_t>(tx)] = start_ns;
    active_.push_back(std::move(a));
    busy_count_changed(start_ns, +1);
    update_listener_on_begin(tx);
    return active_.back().id;
}

std::size_t Channel::find_active(TxId id) const {
    for (std::size_t i = 0; i < active_.size(); ++i)
        if (active_[i].id == id) return i;
    throw InvariantViolation("channel: unknown transmission id");
}

namespace {

Outcome classify(double signal_w, double noise_w, double peak_interference_w,
                 bool deaf, double threshold_linear) {
    if (signal_w / noise_w < threshold_linear) return Outcome::BelowSensitivity;
    if (deaf) return Outcome::Collided;
    if (signal_w / (noise_w + peak_interference_w) < threshold_linear)
        return Outcome::Collided;
    return Outcome::Delivered;
}

}  // namespace

Outcome Channel::end_transmission(TxId id) {
    const std::size_t idx = find_active(id);
    Active done = active_[idx];
    if (done.rx == kNoNode)
        throw InvariantViolation("end_transmission: use end_broadcast");
    active_.erase(active_.begin() + static_cast<std::ptrdiff_t>(idx));

    transmitting_[static_cast<std::size_t>(done.tx)] = 0;
    last_tx_end_[static_cast<std::size_t>(done.tx)] = done.end_ns;

    for (auto& other : active_) {
        if (other.rx == kNoNode || other.rx == done.tx) continue;
        other.interference_w -= rx_power_w(done.tx, other.rx);
    }

    busy_count_changed(done.end_ns, -1);
    update_listener_on_end(done.tx);
    return classify(done.signal_w, noise_w_, done.peak_interference_w, done.rx_deaf,
                    sinr_threshold_linear_);
}

Channel::BroadcastEnd Channel::end_broadcast(TxId id) {
    const std::size_t idx = find_active(id);
    Active done = active_[idx];
    if (done.rx != kNoNode)
        throw InvariantViolation("end_broadcast: not a broadcast");
    active_.erase(active_.begin() + static_cast<std::ptrdiff_t>(idx));

    transmitting_[static_cast<std::size_t>(done.tx)] = 0;
    last_tx_end_[static_cast<std::size_t>(done.tx)] = done.end_ns;

    busy_count_changed(done.end_ns, -1);
    update_listener_on_end(done.tx);

    BroadcastEnd out;
    out.tx = done.tx;
    out.start_ns = done.start_ns;
    out.end_ns = done.end_ns;
    out.overlapping_txs = std::move(done.overlapping_txs);
    return out;
}

Outcome Channel::broadcast_outcome(const BroadcastEnd& b, NodeId rx) const {
    const double signal_w = rx_power_w(b.tx, rx);
    const bool deaf = node_transmitted_during(rx, b.start_ns, b.end_ns);
    double interference_w = 0.0;
    for (const NodeId other : b.overlapping_txs) {
        if (other == rx) continue;
        interference_w += rx_power_w(other, rx);
    }
    return classify(signal_w, noise_w_, interference_w, deaf,
                    sinr_threshold_linear_);
}

void Channel::update_listener_on_begin(NodeId tx) {
    for (auto& [node, st] : listeners_) {
        if (node == tx) continue;
        if (cfg_.sensing_mode == SensingMode::PairwiseRange) {
            if (distance_m(tx, node) > sense_range_m_) continue;
            if (++st.count == 1 && st.listener) st.listener->on_medium_busy();
        } else {
            const double before = st.power_w;
            st.power_w += rx_power_w(tx, node);
            if (before < sense_threshold_w_ && st.power_w >= sense_threshold_w_ &&
                st.listener)
                st.listener->on_medium_busy();
        }
    }
}

void Channel::update_listener_on_end(NodeId tx) {
    for (auto& [node, st] : listeners_) {
        if (node == tx) continue;
        if (cfg_.sensing_mode == SensingMode::PairwiseRange) {
            if (distance_m(tx, node) > sense_range_m_) continue;
            if (--st.count == 0 && st.listener) st.listener->on_medium_idle();
        } else {
            const double before = st.power_w;
            st.power_w -= rx_power_w(tx, node);
            if (st.power_w < 1e-300) st.power_w = 0.0;
            if (before >= sense_threshold_w_ && st.power_w < sense_threshold_w_ &&
                st.listener)
                st.listener->on_medium_idle();
        }
    }
}

void Channel::set_busy_interval_sink(std::function<void(TimeNs, TimeNs)> sink) {
    busy_sink_ = std::move(sink);
}

void Channel::flush_busy(TimeNs end_ns) {
    if (global_active_ > 0 && busy_sink_) {
        busy_sink_(busy_open_ns_, end_ns);
        busy_open_ns_ = end_ns;
    }
}

}  // namespace smn
