#pragma once

#include <optional>
#include <string>
#include <vector>

namespace smn {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitInvariantViolation = 3;

struct LinkArgs {
    std::optional<std::string> config_path;
    double r_min_m = 1.0;
    double r_max_m = 6000.0;
    int steps = 120;
    std::string out_path;
};
int cmd_analyze_link(const LinkArgs& args);

struct HiddenArgs {
    std::optional<std::string> config_path;
    double r_min_m = 200.0;
    double r_max_m = 2000.0;
    int steps = 19;
    std::string out_path;
};
int cmd_analyze_hidden(const HiddenArgs& args);

struct SimulateArgs {
    std::string scenario_path;
    std::string out_prefix;
    std::optional<std::uint64_t> seed;
    std::optional<double> duration_s;
};
int cmd_simulate(const SimulateArgs& args);

struct SweepArgs {
    std::string scenario_path;
    std::string param_path;  // dot path into the scenario JSON
    std::vector<std::string> values;
    std::string out_path;
    std::optional<std::uint64_t> seed;
};
int cmd_sweep(const SweepArgs& args);

// "3600", "3600s", "250ms", "15min", "1h" -> seconds
double parse_duration_seconds(const std::string& text);

}  // namespace smn
