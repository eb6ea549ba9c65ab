#include "smn/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "smn/errors.hpp"
#include "smn/version.hpp"

namespace smn {

std::string format_g9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string file_comment(std::uint64_t seed) {
    std::ostringstream out;
    out << "# " << kToolName << " " << kToolVersion << " seed=" << seed << "\n";
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file '" + path + "'");
    out << content;
    if (!out) throw Error("failed writing '" + path + "'");
}

std::string link_csv(std::uint64_t seed, const std::vector<LinkRow>& rows) {
    std::ostringstream out;
    out << file_comment(seed);
    out << "distance_m,path_loss_db,prx_dbw,snr_db,rate_bps\n";
    for (const auto& r : rows) {
        out << format_g9(r.distance_m) << ',' << format_g9(r.path_loss_db) << ','
            << format_g9(r.prx_dbw) << ',' << format_g9(r.snr_db) << ','
            << format_g9(r.rate_bps) << '\n';
    }
    return out.str();
}

std::string hidden_csv(std::uint64_t seed, const std::vector<HiddenSweepRow>& rows) {
    std::ostringstream out;
    out << file_comment(seed);
    out << "cell_radius_m,carrier_sense_range_m,mean_hidden_nodes\n";
    for (const auto& r : rows) {
        out << format_g9(r.cell_radius_m) << ',' << format_g9(r.carrier_sense_range_m)
            << ',' << format_g9(r.mean_hidden_nodes) << '\n';
    }
    return out.str();
}

std::string frames_csv(std::uint64_t seed, const std::vector<FrameRecord>& frames) {
    std::ostringstream out;
    out << file_comment(seed);
    out << "meter,class,enqueue_ns,outcome,delay_ns,retries\n";
    for (const auto& f : frames) {
        out << f.meter << ',' << priority_name(f.priority) << ',' << f.enqueue_ns << ','
            << frame_fate_name(f.fate) << ',';
        if (f.fate == FrameFate::Delivered) out << f.delay_ns;
        out << ',' << std::max(0, f.attempts - 1) << '\n';
    }
    return out.str();
}

std::string cycles_csv(std::uint64_t seed, const std::vector<CycleRecord>& cycles) {
    std::ostringstream out;
    out << file_comment(seed);
    out << "index,start_ns,length_ns,polled,responses,probed_group,detected\n";
    for (const auto& c : cycles) {
        out << c.index << ',' << c.start_ns << ',' << c.length_ns << ',' << c.polled
            << ',' << c.responses << ',';
        if (c.probed_group >= 0) out << c.probed_group;
        out << ',';
        if (c.detected >= 0) out << c.detected;
        out << '\n';
    }
    return out.str();
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json delay_to_json(const std::optional<DelayStats>& d) {
    if (!d) return nullptr;
    ordered_json j;
    j["count"] = d->count;
    j["mean_ns"] = d->mean_ns;
    j["p50_ns"] = d->p50_ns;
    j["p95_ns"] = d->p95_ns;
    j["p99_ns"] = d->p99_ns;
    j["max_ns"] = d->max_ns;
    return j;
}

}  // namespace

std::string summary_json(const SummaryMeta& meta, const MetricsReport& r) {
    ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["seed"] = meta.seed;
    j["protocol"] = meta.protocol;
    j["duration_ns"] = meta.duration_ns;
    j["meter_count"] = meta.meter_count;
    j["generated"] = r.generated;
    j["delivered"] = r.delivered;
    j["dropped"] = r.dropped;
    j["queued"] = r.queued;
    j["attempts"] = r.attempts;
    j["collisions"] = r.collisions;
    j["below_sensitivity"] = r.below_sensitivity;
    j["collision_ratio"] = r.collision_ratio;
    j["delay_all"] = delay_to_json(r.delay_all);
    j["delay_high"] = delay_to_json(r.delay_high);
    j["delay_low"] = delay_to_json(r.delay_low);
    if (r.jain_index)
        j["jain_index"] = *r.jain_index;
    else
        j["jain_index"] = nullptr;
    j["throughput_bps"] = r.throughput_bps;
    j["airtime_utilization"] = r.airtime_utilization;
    if (r.cycles) {
        ordered_json c;
        c["count"] = r.cycles->count;
        c["min_ns"] = r.cycles->min_ns;
        c["mean_ns"] = r.cycles->mean_ns;
        c["max_ns"] = r.cycles->max_ns;
        j["cycles"] = c;
    } else {
        j["cycles"] = nullptr;
    }
    ordered_json flags = ordered_json::array();
    for (const auto& f : r.silent_flags) {
        ordered_json e;
        e["meter"] = f.meter;
        e["flag_time_ns"] = f.flag_time_ns;
        e["latency_ns"] = f.latency_ns;
        flags.push_back(e);
    }
    j["silent_flags"] = flags;
    j["delivered_per_meter"] = r.delivered_per_meter;
    return j.dump(2) + "\n";
}

std::string sweep_csv(std::uint64_t seed, const std::string& param_path,
                      const std::vector<std::string>& values,
                      const std::vector<MetricsReport>& reports) {
    std::ostringstream out;
    out << file_comment(seed);
    out << param_path
        << ",generated,delivered,dropped,queued,attempts,collisions"
           ",below_sensitivity,collision_ratio"
           ",delay_mean_ns,delay_p50_ns,delay_p95_ns,delay_p99_ns,delay_max_ns"
           ",delay_high_mean_ns,delay_low_mean_ns,jain_index,throughput_bps"
           ",airtime_utilization,cycle_count,cycle_min_ns,cycle_mean_ns,cycle_max_ns"
           ",flagged\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const MetricsReport& r = reports[i];
        out << values[i] << ',' << r.generated << ',' << r.delivered << ','
            << r.dropped << ',' << r.queued << ',' << r.attempts << ','
            << r.collisions << ',' << r.below_sensitivity << ','
            << format_g9(r.collision_ratio);
        if (r.delay_all) {
            out << ',' << format_g9(r.delay_all->mean_ns) << ',' << r.delay_all->p50_ns
                << ',' << r.delay_all->p95_ns << ',' << r.delay_all->p99_ns << ','
                << r.delay_all->max_ns;
        } else {
            out << ",,,,,";
        }
        out << ',' << (r.delay_high ? format_g9(r.delay_high->mean_ns) : "");
        out << ',' << (r.delay_low ? format_g9(r.delay_low->mean_ns) : "");
        out << ',' << (r.jain_index ? format_g9(*r.jain_index) : "");
        out << ',' << format_g9(r.throughput_bps) << ','
            << format_g9(r.airtime_utilization);
        if (r.cycles) {
            out << ',' << r.cycles->count << ',' << r.cycles->min_ns << ','
                << format_g9(r.cycles->mean_ns) << ',' << r.cycles->max_ns;
        } else {
            out << ",,,,";
        }
        out << ',' << r.silent_flags.size() << '\n';
    }
    return out.str();
}

}  // namespace smn
