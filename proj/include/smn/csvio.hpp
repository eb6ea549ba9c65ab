#pragma once

#include <string>
#include <vector>

#include "smn/hiddennode.hpp"
#include "smn/macproto.hpp"
#include "smn/metrics.hpp"

namespace smn {

// %.9g — 9 significant digits keeps outputs bit-stable across runs on one
// platform; the '.' decimal separator is locale-independent here.
std::string format_g9(double v);

// "# smnsim <version> seed=<seed>\n"
std::string file_comment(std::uint64_t seed);

void write_text_file(const std::string& path, const std::string& content);

struct LinkRow {
    double distance_m, path_loss_db, prx_dbw, snr_db, rate_bps;
};
std::string link_csv(std::uint64_t seed, const std::vector<LinkRow>& rows);

std::string hidden_csv(std::uint64_t seed, const std::vector<HiddenSweepRow>& rows);

std::string frames_csv(std::uint64_t seed, const std::vector<FrameRecord>& frames);

std::string cycles_csv(std::uint64_t seed, const std::vector<CycleRecord>& cycles);

struct SummaryMeta {
    std::uint64_t seed = 0;
    std::string protocol;
    TimeNs duration_ns = 0;
    int meter_count = 0;
};
std::string summary_json(const SummaryMeta& meta, const MetricsReport& report);

// One flattened report row per swept value, in input order.
std::string sweep_csv(std::uint64_t seed, const std::string& param_path,
                      const std::vector<std::string>& values,
                      const std::vector<MetricsReport>& reports);

}  // namespace smn
