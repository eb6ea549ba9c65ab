#include "smn/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "smn/errors.hpp"

namespace smn {

namespace {

using nlohmann::json;

TimeNs seconds_to_ns(double s) { return static_cast<TimeNs>(std::llround(s * 1e9)); }
TimeNs micros_to_ns(double us) { return static_cast<TimeNs>(std::llround(us * 1e3)); }

// Strict object reader: every key must be consumed, unknown keys reject the
// whole file.
class ObjReader {
public:
    ObjReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    bool has(const char* key) const { return j_.contains(key); }

    double number(const char* key) {
        require(key);
        return as_number(key);
    }
    double number_or(const char* key, double def) {
        if (!has(key)) return def;
        return as_number(key);
    }
    long long integer(const char* key) {
        require(key);
        return as_integer(key);
    }
    long long integer_or(const char* key, long long def) {
        if (!has(key)) return def;
        return as_integer(key);
    }
    bool boolean_or(const char* key, bool def) {
        if (!has(key)) return def;
        consume(key);
        const json& v = j_.at(key);
        if (!v.is_boolean()) throw ConfigError(item_path(key) + ": expected a boolean");
        return v.get<bool>();
    }
    std::string string(const char* key) {
        require(key);
        return as_string(key);
    }
    std::string string_or(const char* key, const std::string& def) {
        if (!has(key)) return def;
        return as_string(key);
    }
    const json& raw(const char* key) {
        require(key);
        consume(key);
        return j_.at(key);
    }
    const json* raw_opt(const char* key) {
        if (!has(key)) return nullptr;
        consume(key);
        return &j_.at(key);
    }

    std::string item_path(const char* key) const { return path_ + "." + key; }

    void done() const {
        for (const auto& item : j_.items())
            if (!consumed_.count(item.key()))
                throw ConfigError(path_ + ": unknown key '" + item.key() + "'");
    }

private:
    void require(const char* key) {
        if (!has(key)) throw ConfigError(path_ + ": missing required key '" + key + "'");
    }
    void consume(const char* key) { consumed_.insert(key); }
    double as_number(const char* key) {
        consume(key);
        const json& v = j_.at(key);
        if (!v.is_number()) throw ConfigError(item_path(key) + ": expected a number");
        return v.get<double>();
    }
    long long as_integer(const char* key) {
        consume(key);
        const json& v = j_.at(key);
        if (!v.is_number_integer())
            throw ConfigError(item_path(key) + ": expected an integer");
        return v.get<long long>();
    }
    std::string as_string(const char* key) {
        consume(key);
        const json& v = j_.at(key);
        if (!v.is_string()) throw ConfigError(item_path(key) + ": expected a string");
        return v.get<std::string>();
    }

    const json& j_;
    std::string path_;
    std::set<std::string> consumed_;
};

RadioParams parse_radio(const json& j, const std::string& path) {
    ObjReader r(j, path);
    RadioParams p;
    p.bandwidth_hz = r.number_or("bandwidth_hz", p.bandwidth_hz);
    if (r.has("tx_power_dbw") && r.has("tx_power_dbm"))
        throw ConfigError(path + ": give tx power in dBW or dBm, not both");
    if (r.has("tx_power_dbm"))
        p.tx_power_dbw = dbm_to_dbw(r.number("tx_power_dbm"));
    else
        p.tx_power_dbw = r.number_or("tx_power_dbw", p.tx_power_dbw);
    p.antenna_gain_db = r.number_or("antenna_gain_db", p.antenna_gain_db);
    p.temperature_k = r.number_or("temperature_k", p.temperature_k);
    p.boltzmann_j_per_k = r.number_or("boltzmann_j_per_k", p.boltzmann_j_per_k);
    p.sinr_threshold_db = r.number_or("sinr_threshold_db", p.sinr_threshold_db);
    p.carrier_sense_threshold_dbw =
        r.number_or("carrier_sense_threshold_dbw", p.carrier_sense_threshold_dbw);
    p.pathloss_intercept_db = r.number_or("pathloss_intercept_db", p.pathloss_intercept_db);
    p.pathloss_slope_db_per_decade =
        r.number_or("pathloss_slope_db_per_decade", p.pathloss_slope_db_per_decade);
    r.done();
    p.validate();
    return p;
}

MeterPosition parse_position(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError(path + ": positions are [radius_m, theta_rad] pairs");
    return {v[0].get<double>(), v[1].get<double>()};
}

MacTimingParams parse_mac(const json& j, const std::string& path, Protocol protocol) {
    ObjReader r(j, path);
    MacTimingParams m;
    m.slot_ns = micros_to_ns(r.number_or("slot_us", 52));
    m.sifs_ns = micros_to_ns(r.number_or("sifs_us", 160));
    m.difs_ns = r.has("difs_us") ? micros_to_ns(r.number("difs_us"))
                                 : m.sifs_ns + 2 * m.slot_ns;
    const int cw_min = static_cast<int>(r.integer_or("cw_min", 15));
    m.cw_min_low = cw_min;
    m.cw_max = static_cast<int>(r.integer_or("cw_max", 1023));
    m.retry_limit = static_cast<int>(r.integer_or("retry_limit", 7));
    m.rts_cts_enabled = r.boolean_or("rts_cts", false);
    m.rts_threshold_bytes = static_cast<int>(r.integer_or("rts_threshold_bytes", 0));
    m.phy_header_ns = micros_to_ns(r.number_or("phy_header_us", 0));
    m.ack_timeout_ns = micros_to_ns(r.number_or("ack_timeout_us", 0));
    m.control_bytes = static_cast<int>(r.integer_or("control_bytes", 14));
    m.mgmt_bytes = static_cast<int>(r.integer_or("mgmt_bytes", 20));
    if (protocol == Protocol::Edca) {
        m.cw_min_high = static_cast<int>(r.integer_or("cw_min_high", 7));
        m.aifs_high_ns = r.has("aifs_high_us") ? micros_to_ns(r.number("aifs_high_us"))
                                               : m.difs_ns;
        m.aifs_low_ns = r.has("aifs_low_us") ? micros_to_ns(r.number("aifs_low_us"))
                                             : m.difs_ns + 2 * m.slot_ns;
    } else {
        // single-class access: every frame contends with (DIFS, cw_min)
        m.cw_min_high = cw_min;
        m.aifs_high_ns = m.difs_ns;
        m.aifs_low_ns = m.difs_ns;
    }
    r.done();
    m.validate();
    return m;
}

Priority parse_priority(const std::string& s, const std::string& path) {
    if (s == "high") return Priority::High;
    if (s == "low") return Priority::Low;
    throw ConfigError(path + ": priority must be 'high' or 'low'");
}

TrafficBinding parse_traffic_block(const json& j, const std::string& path) {
    ObjReader r(j, path);
    TrafficBinding b;
    if (r.has("preset")) {
        b.spec = traffic_preset(r.string("preset"));
        if (r.has("period_s")) b.spec.period_ns = seconds_to_ns(r.number("period_s"));
        if (r.has("rate_per_s")) b.spec.rate_per_s = r.number("rate_per_s");
        if (r.has("payload_bytes"))
            b.spec.payload_bytes = static_cast<int>(r.integer("payload_bytes"));
        if (r.has("priority"))
            b.spec.priority = parse_priority(r.string("priority"), path);
    } else {
        const std::string kind = r.string("kind");
        if (kind == "periodic") {
            b.spec.kind = TrafficKind::Periodic;
            b.spec.period_ns = seconds_to_ns(r.number("period_s"));
        } else if (kind == "poisson") {
            b.spec.kind = TrafficKind::Poisson;
            b.spec.rate_per_s = r.number("rate_per_s");
        } else {
            throw ConfigError(path + ": kind must be 'periodic' or 'poisson'");
        }
        b.spec.payload_bytes = static_cast<int>(r.integer("payload_bytes"));
        b.spec.priority = parse_priority(r.string_or("priority", "low"), path);
        b.spec.name = r.string_or("name", kind);
    }
    if (r.has("jitter_s")) b.spec.jitter_ns = seconds_to_ns(r.number("jitter_s"));
    if (r.has("start_offset_s"))
        b.spec.start_offset_ns = seconds_to_ns(r.number("start_offset_s"));

    if (r.has("group") && r.has("meters"))
        throw ConfigError(path + ": give 'meters' or 'group', not both");
    if (r.has("group")) {
        b.target = TrafficBinding::Target::Group;
        b.group = static_cast<int>(r.integer("group"));
    } else if (r.has("meters")) {
        const json& sel = r.raw("meters");
        if (sel.is_string() && sel.get<std::string>() == "all") {
            b.target = TrafficBinding::Target::All;
        } else if (sel.is_array()) {
            b.target = TrafficBinding::Target::Meters;
            for (const auto& v : sel) {
                if (!v.is_number_integer())
                    throw ConfigError(path + ".meters: expected meter indices");
                b.meters.push_back(v.get<int>());
            }
        } else {
            throw ConfigError(path + ".meters: expected \"all\" or an index array");
        }
    }
    r.done();
    b.spec.validate();
    return b;
}

}  // namespace

Scenario parse_scenario_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
    }
    ObjReader root(j, "scenario");
    Scenario s;

    if (const json* radio = root.raw_opt("radio"))
        s.radio = parse_radio(*radio, "scenario.radio");

    const std::string sensing = root.string_or("sensing_mode", "pairwise-range");
    if (sensing == "pairwise-range")
        s.sensing_mode = SensingMode::PairwiseRange;
    else if (sensing == "aggregate-power")
        s.sensing_mode = SensingMode::AggregatePower;
    else
        throw ConfigError("scenario.sensing_mode: unknown mode '" + sensing + "'");

    if (const json* rate = root.raw_opt("phy_rate")) {
        ObjReader r(*rate, "scenario.phy_rate");
        const std::string mode = r.string("mode");
        if (mode == "fixed") {
            s.fixed_rate_bps = r.number_or("bps", 1e5);
            if (!(s.fixed_rate_bps > 0))
                throw ConfigError("scenario.phy_rate.bps must be > 0");
        } else if (mode == "distance") {
            s.fixed_rate_bps = 0.0;
        } else {
            throw ConfigError("scenario.phy_rate.mode must be 'fixed' or 'distance'");
        }
        r.done();
    }

    {
        ObjReader topo(root.raw("topology"), "scenario.topology");
        s.cell_radius_m = topo.number_or("cell_radius_m", 1200.0);
        int ways = 0;
        if (topo.has("meter_density_per_km2")) {
            s.topo_spec = Scenario::TopoSpec::Density;
            s.density_per_km2 = topo.number("meter_density_per_km2");
            if (!(s.density_per_km2 > 0))
                throw ConfigError("scenario.topology.meter_density_per_km2 must be > 0");
            ++ways;
        }
        if (topo.has("meter_count")) {
            s.topo_spec = Scenario::TopoSpec::Count;
            s.meter_count = static_cast<int>(topo.integer("meter_count"));
            if (s.meter_count < 0)
                throw ConfigError("scenario.topology.meter_count must be >= 0");
            ++ways;
        }
        if (topo.has("positions")) {
            s.topo_spec = Scenario::TopoSpec::Positions;
            const json& arr = topo.raw("positions");
            if (!arr.is_array())
                throw ConfigError("scenario.topology.positions: expected an array");
            for (const auto& v : arr)
                s.explicit_positions.push_back(
                    parse_position(v, "scenario.topology.positions"));
            ++ways;
        }
        if (ways != 1)
            throw ConfigError(
                "scenario.topology: give exactly one of meter_density_per_km2, "
                "meter_count, positions");
        topo.done();
    }

    {
        ObjReader proto(root.raw("protocol"), "scenario.protocol");
        const std::string type = proto.string("type");
        if (type == "dcf") s.protocol = Protocol::Dcf;
        else if (type == "edca") s.protocol = Protocol::Edca;
        else if (type == "pcf") s.protocol = Protocol::Pcf;
        else if (type == "qdcf") s.protocol = Protocol::Qdcf;
        else if (type == "ppmac") s.protocol = Protocol::Ppmac;
        else throw ConfigError("scenario.protocol.type: unknown protocol '" + type + "'");

        if (const json* mac = proto.raw_opt("mac"))
            s.mac = parse_mac(*mac, "scenario.protocol.mac", s.protocol);
        else
            s.mac = parse_mac(json::object(), "scenario.protocol.mac", s.protocol);

        if (const json* pcf = proto.raw_opt("pcf")) {
            if (s.protocol != Protocol::Pcf)
                throw ConfigError("scenario.protocol.pcf: only valid for type 'pcf'");
            ObjReader r(*pcf, "scenario.protocol.pcf");
            const std::string order = r.string_or("poll_order", "round-robin");
            if (order == "round-robin") s.pcf.poll_order = PollOrder::RoundRobin;
            else if (order == "lcfs") s.pcf.poll_order = PollOrder::Lcfs;
            else throw ConfigError("scenario.protocol.pcf.poll_order: unknown order");
            s.pcf.beacon_interval_ns = seconds_to_ns(r.number_or("beacon_interval_s", 0));
            s.pcf.response_timeout_ns = micros_to_ns(r.number_or("response_timeout_us", 0));
            s.pcf.silent_miss_threshold =
                static_cast<int>(r.integer_or("silent_miss_threshold", 3));
            r.done();
            s.pcf.validate();
        }
        if (const json* qd = proto.raw_opt("qdcf")) {
            if (s.protocol != Protocol::Qdcf)
                throw ConfigError("scenario.protocol.qdcf: only valid for type 'qdcf'");
            ObjReader r(*qd, "scenario.protocol.qdcf");
            s.qdcf.contention_factor_q = r.number_or("q", 1.0);
            s.qdcf.prohibit_time_ns = seconds_to_ns(r.number_or("t_s", 0));
            s.qdcf.group_count = static_cast<int>(r.integer_or("group_count", 1));
            const std::string mode = r.string_or("group_mode", "shared-params");
            if (mode == "shared-params") s.qdcf.group_mode = QdcfGroupMode::SharedParams;
            else if (mode == "per-group-params")
                s.qdcf.group_mode = QdcfGroupMode::PerGroupParams;
            else if (mode == "group-by-group")
                s.qdcf.group_mode = QdcfGroupMode::GroupByGroup;
            else throw ConfigError("scenario.protocol.qdcf.group_mode: unknown mode");
            s.qdcf.phase_length_ns = seconds_to_ns(r.number_or("phase_s", 0.5));
            if (const json* qs = r.raw_opt("per_group_q"))
                for (const auto& v : *qs) s.qdcf.per_group_q.push_back(v.get<double>());
            if (const json* ts = r.raw_opt("per_group_t_s"))
                for (const auto& v : *ts)
                    s.qdcf.per_group_t_ns.push_back(seconds_to_ns(v.get<double>()));
            r.done();
            s.qdcf.validate();
        }
        if (const json* pp = proto.raw_opt("ppmac")) {
            if (s.protocol != Protocol::Ppmac)
                throw ConfigError("scenario.protocol.ppmac: only valid for type 'ppmac'");
            ObjReader r(*pp, "scenario.protocol.ppmac");
            s.ppmac.group_count = static_cast<int>(r.integer_or("group_count", 1));
            s.ppmac.zc_length = static_cast<int>(r.integer("zc_length"));
            s.ppmac.chip_ns = micros_to_ns(r.number_or("chip_us", 10));
            s.ppmac.detection_threshold = r.number_or("detection_threshold", 0.5);
            s.ppmac.noise_sigma = r.number_or("noise_sigma", 0.0);
            s.ppmac.response_timeout_ns = micros_to_ns(r.number_or("response_timeout_us", 0));
            s.ppmac.silent_miss_threshold =
                static_cast<int>(r.integer_or("silent_miss_threshold", 3));
            r.done();
            s.ppmac.validate();
        } else if (s.protocol == Protocol::Ppmac) {
            throw ConfigError("scenario.protocol: ppmac requires a 'ppmac' block");
        }
        proto.done();
    }

    if (const json* tr = root.raw_opt("traffic")) {
        if (!tr->is_array()) throw ConfigError("scenario.traffic: expected an array");
        int i = 0;
        for (const auto& block : *tr)
            s.traffic.push_back(parse_traffic_block(
                block, "scenario.traffic[" + std::to_string(i++) + "]"));
    }

    if (const json* faults = root.raw_opt("faults")) {
        if (!faults->is_array()) throw ConfigError("scenario.faults: expected an array");
        int i = 0;
        for (const auto& f : *faults) {
            ObjReader r(f, "scenario.faults[" + std::to_string(i++) + "]");
            FaultScript fs;
            fs.meter = static_cast<int>(r.integer("meter"));
            fs.fail_at_ns = seconds_to_ns(r.number("fail_at_s"));
            if (r.has("recover_at_s"))
                fs.recover_at_ns = seconds_to_ns(r.number("recover_at_s"));
            r.done();
            s.faults.push_back(fs);
        }
    }

    if (const json* joins = root.raw_opt("joins")) {
        if (!joins->is_array()) throw ConfigError("scenario.joins: expected an array");
        int i = 0;
        for (const auto& jn : *joins) {
            ObjReader r(jn, "scenario.joins[" + std::to_string(i) + "]");
            JoinScript js;
            js.meter = static_cast<int>(r.integer("meter"));
            js.join_at_ns = seconds_to_ns(r.number("join_at_s"));
            s.join_positions.push_back(
                parse_position(r.raw("position"),
                               "scenario.joins[" + std::to_string(i) + "].position"));
            r.done();
            s.joins.push_back(js);
            ++i;
        }
    }

    s.duration_ns = seconds_to_ns(root.number("duration_s"));
    if (s.duration_ns < 0) throw ConfigError("scenario.duration_s must be >= 0");
    s.seed = static_cast<std::uint64_t>(root.integer_or("seed", 1));
    root.done();
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("scenario: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

AnalyzeConfig parse_analyze_config_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    ObjReader root(j, "config");
    AnalyzeConfig c;
    if (const json* radio = root.raw_opt("radio"))
        c.radio = parse_radio(*radio, "config.radio");
    c.density_per_km2 = root.number_or("meter_density_per_km2", 1000.0);
    if (!(c.density_per_km2 > 0))
        throw ConfigError("config.meter_density_per_km2 must be > 0");
    root.done();
    return c;
}

AnalyzeConfig load_analyze_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_analyze_config_text(buf.str());
}

SimConfig build_sim_config(const Scenario& s) {
    SimConfig cfg;
    cfg.radio = s.radio;
    cfg.sensing_mode = s.sensing_mode;
    cfg.fixed_rate_bps = s.fixed_rate_bps;
    cfg.protocol = s.protocol;
    cfg.mac = s.mac;
    cfg.pcf = s.pcf;
    cfg.qdcf = s.qdcf;
    cfg.ppmac = s.ppmac;
    cfg.traffic = s.traffic;
    cfg.faults = s.faults;
    cfg.joins = s.joins;
    cfg.duration_ns = s.duration_ns;
    cfg.master_seed = s.seed;

    RandomStreams streams{s.seed};
    Rng topo_stream = streams.derive(StreamDomain::Topology);
    switch (s.topo_spec) {
        case Scenario::TopoSpec::Positions:
            cfg.topology.cell_radius_m = s.cell_radius_m;
            cfg.topology.positions = s.explicit_positions;
            break;
        case Scenario::TopoSpec::Count:
            cfg.topology = sample_topology_count(
                s.cell_radius_m, static_cast<std::size_t>(s.meter_count), topo_stream);
            break;
        case Scenario::TopoSpec::Density:
            cfg.topology = sample_topology_density(
                s.cell_radius_m, s.density_per_km2 * 1e-6, topo_stream);
            break;
    }
    for (const auto& p : cfg.topology.positions)
        if (p.r_m > s.cell_radius_m)
            throw ConfigError("topology: meter radius exceeds the cell radius");
    cfg.topology.cell_radius_m = s.cell_radius_m;

    // join-scripted meters occupy the indices after the base topology,
    // in list order
    const int base = static_cast<int>(cfg.topology.positions.size());
    for (std::size_t k = 0; k < s.joins.size(); ++k) {
        if (s.joins[k].meter != base + static_cast<int>(k))
            throw ConfigError(
                "joins: meter indices must continue the topology (base + order)");
        cfg.topology.positions.push_back(s.join_positions[k]);
    }
    return cfg;
}

}  // namespace smn
