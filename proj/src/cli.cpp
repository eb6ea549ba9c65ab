#include "smn/cli.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "smn/csvio.hpp"
#include "smn/errors.hpp"
#include "smn/scenario.hpp"

namespace smn {

namespace {

int run_guarded(const std::function<void()>& body) {
    try {
        body();
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvariantViolation;
    }
}

void check_grid(double r_min, double r_max, int steps) {
    if (steps < 2) throw ConfigError("grid: steps must be >= 2");
    if (!(r_min >= 1.0) || !(r_min < r_max))
        throw ConfigError("grid: need 1 <= r_min < r_max");
}

AnalyzeConfig load_config(const std::optional<std::string>& path) {
    if (path) return load_analyze_config_file(*path);
    return AnalyzeConfig{};
}

}  // namespace

double parse_duration_seconds(const std::string& text) {
    double scale = 1.0;
    std::string num = text;
    auto ends_with = [&](const char* suffix) {
        const std::size_t n = std::string(suffix).size();
        return num.size() > n && num.compare(num.size() - n, n, suffix) == 0;
    };
    if (ends_with("ms")) {
        scale = 1e-3;
        num.resize(num.size() - 2);
    } else if (ends_with("min")) {
        scale = 60.0;
        num.resize(num.size() - 3);
    } else if (ends_with("h")) {
        scale = 3600.0;
        num.resize(num.size() - 1);
    } else if (ends_with("s")) {
        num.resize(num.size() - 1);
    }
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(num, &used);
    } catch (const std::exception&) {
        throw ConfigError("duration: cannot parse '" + text + "'");
    }
    if (used != num.size() || !(value >= 0))
        throw ConfigError("duration: cannot parse '" + text + "'");
    return value * scale;
}

int cmd_analyze_link(const LinkArgs& args) {
    return run_guarded([&] {
        const AnalyzeConfig cfg = load_config(args.config_path);
        check_grid(args.r_min_m, args.r_max_m, args.steps);
        const double noise_w = noise_power_w(cfg.radio);
        std::vector<LinkRow> rows;
        rows.reserve(static_cast<std::size_t>(args.steps));
        for (int i = 0; i < args.steps; ++i) {
            const double r = args.r_min_m + (args.r_max_m - args.r_min_m) *
                                                static_cast<double>(i) /
                                                (args.steps - 1);
            LinkRow row;
            row.distance_m = r;
            row.path_loss_db = path_loss_db(cfg.radio, r);
            row.prx_dbw = rx_power_dbw(cfg.radio, r);
            row.snr_db = row.prx_dbw - linear_to_db(noise_w);
            row.rate_bps = achievable_rate_bps(cfg.radio, r);
            rows.push_back(row);
        }
        write_text_file(args.out_path, link_csv(0, rows));
    });
}

int cmd_analyze_hidden(const HiddenArgs& args) {
    return run_guarded([&] {
        const AnalyzeConfig cfg = load_config(args.config_path);
        check_grid(args.r_min_m, args.r_max_m, args.steps);
        const auto rows = sweep_hidden_vs_radius(cfg.radio, cfg.density_per_km2 * 1e-6,
                                                 args.r_min_m, args.r_max_m, args.steps);
        write_text_file(args.out_path, hidden_csv(0, rows));
    });
}

namespace {

void write_run_outputs(const std::string& prefix, const Scenario& scenario,
                       const SimConfig& cfg, const RunResult& result) {
    SummaryMeta meta;
    meta.seed = cfg.master_seed;
    meta.protocol = protocol_name(cfg.protocol);
    meta.duration_ns = cfg.duration_ns;
    meta.meter_count = static_cast<int>(cfg.topology.meter_count());
    write_text_file(prefix + ".summary.json", summary_json(meta, result.report));
    write_text_file(prefix + ".frames.csv",
                    frames_csv(cfg.master_seed, result.frames));
    if (scenario.protocol == Protocol::Pcf || scenario.protocol == Protocol::Ppmac)
        write_text_file(prefix + ".cycles.csv",
                        cycles_csv(cfg.master_seed, result.cycles));
}

}  // namespace

int cmd_simulate(const SimulateArgs& args) {
    return run_guarded([&] {
        Scenario scenario = load_scenario_file(args.scenario_path);
        if (args.seed) scenario.seed = *args.seed;
        if (args.duration_s)
            scenario.duration_ns =
                static_cast<TimeNs>(std::llround(*args.duration_s * 1e9));
        const SimConfig cfg = build_sim_config(scenario);
        const RunResult result = run_simulation(cfg);
        write_run_outputs(args.out_prefix, scenario, cfg, result);
    });
}

int cmd_sweep(const SweepArgs& args) {
    return run_guarded([&] {
        std::ifstream in(args.scenario_path);
        if (!in) throw ConfigError("scenario: cannot open '" + args.scenario_path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        nlohmann::json base;
        try {
            base = nlohmann::json::parse(buf.str());
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
        }

        // resolve the dot path; it must address an existing scalar
        std::vector<std::string> keys;
        std::stringstream path_stream(args.param_path);
        std::string part;
        while (std::getline(path_stream, part, '.')) {
            if (part.empty()) throw ConfigError("sweep: empty segment in param path");
            keys.push_back(part);
        }
        if (keys.empty()) throw ConfigError("sweep: empty param path");
        nlohmann::json* leaf = &base;
        for (const auto& key : keys) {
            if (!leaf->is_object() || !leaf->contains(key))
                throw ConfigError("sweep: unknown param path '" + args.param_path + "'");
            leaf = &(*leaf)[key];
        }
        if (!leaf->is_primitive() || leaf->is_null())
            throw ConfigError("sweep: param path must address a scalar field");
        if (args.values.empty()) throw ConfigError("sweep: no values given");

        // parse each run's scenario up front so config errors exit before
        // any simulation starts
        std::vector<Scenario> scenarios;
        for (const auto& value : args.values) {
            nlohmann::json variant = base;
            nlohmann::json* slot = &variant;
            for (const auto& key : keys) slot = &(*slot)[key];
            nlohmann::json parsed_value;
            try {
                parsed_value = nlohmann::json::parse(value);
            } catch (const nlohmann::json::parse_error&) {
                parsed_value = value;  // plain string value
            }
            *slot = parsed_value;
            Scenario s = parse_scenario_text(variant.dump());
            if (args.seed) s.seed = *args.seed;
            scenarios.push_back(std::move(s));
        }

        // independent runs; results joined in input order
        std::vector<std::future<MetricsReport>> futures;
        futures.reserve(scenarios.size());
        for (const auto& s : scenarios) {
            futures.push_back(std::async(std::launch::async, [s] {
                return run_simulation(build_sim_config(s)).report;
            }));
        }
        std::vector<MetricsReport> reports;
        reports.reserve(futures.size());
        for (auto& f : futures) reports.push_back(f.get());

        write_text_file(args.out_path, sweep_csv(scenarios.front().seed,
                                                 args.param_path, args.values, reports));
    });
}

}  // namespace smn
