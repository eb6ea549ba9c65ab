// smnsim - analytical radio model and MAC protocol simulator for a
// smart-metering neighborhood area network.
//
// Subcommands:
//   analyze link    link budget / BPSK rate curve over distance
//   analyze hidden  expected hidden-node count over cell radius
//   simulate        run one scenario, write metrics files
//   sweep           vary one scenario field across a value list

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smn/cli.hpp"
#include "smn/errors.hpp"
#include "smn/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"smart-metering NAN link analysis and MAC simulation"};
    app.set_version_flag("--version",
                         std::string(smn::kToolName) + " " + smn::kToolVersion);
    app.require_subcommand(1);

    // analyze link | analyze hidden
    auto* analyze = app.add_subcommand("analyze", "closed-form radio analysis");
    analyze->require_subcommand(1);

    smn::LinkArgs link_args;
    std::string link_config;
    auto* link = analyze->add_subcommand("link", "link budget and rate vs distance");
    link->add_option("--config", link_config, "radio config JSON");
    link->add_option("--r-min", link_args.r_min_m, "smallest distance, m");
    link->add_option("--r-max", link_args.r_max_m, "largest distance, m");
    link->add_option("--steps", link_args.steps, "grid points (>= 2)");
    link->add_option("--out", link_args.out_path, "output CSV path")->required();

    smn::HiddenArgs hidden_args;
    std::string hidden_config;
    auto* hidden = analyze->add_subcommand("hidden", "mean hidden nodes vs cell radius");
    hidden->add_option("--config", hidden_config, "radio config JSON");
    hidden->add_option("--r-min", hidden_args.r_min_m, "smallest cell radius, m");
    hidden->add_option("--r-max", hidden_args.r_max_m, "largest cell radius, m");
    hidden->add_option("--steps", hidden_args.steps, "grid points (>= 2)");
    hidden->add_option("--out", hidden_args.out_path, "output CSV path")->required();

    smn::SimulateArgs sim_args;
    std::string sim_duration;
    std::uint64_t sim_seed = 0;
    auto* simulate = app.add_subcommand("simulate", "run one scenario");
    simulate->add_option("--scenario", sim_args.scenario_path, "scenario JSON")->required();
    simulate->add_option("--out", sim_args.out_prefix, "output file prefix")->required();
    auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "master seed override");
    auto* sim_dur_opt =
        simulate->add_option("--duration", sim_duration, "duration override, e.g. 3600s");

    smn::SweepArgs sweep_args;
    std::string sweep_values;
    std::uint64_t sweep_seed = 0;
    auto* sweep = app.add_subcommand("sweep", "sweep one scenario field");
    sweep->add_option("--scenario", sweep_args.scenario_path, "scenario JSON")->required();
    sweep->add_option("--param", sweep_args.param_path, "dot path, e.g. topology.meter_count")
        ->required();
    sweep->add_option("--values", sweep_values, "comma-separated values")->required();
    sweep->add_option("--out", sweep_args.out_path, "output CSV path")->required();
    auto* sweep_seed_opt = sweep->add_option("--seed", sweep_seed, "master seed override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : smn::kExitConfigError;
    }

    try {
        if (link->parsed()) {
            if (!link_config.empty()) link_args.config_path = link_config;
            return smn::cmd_analyze_link(link_args);
        }
        if (hidden->parsed()) {
            if (!hidden_config.empty()) hidden_args.config_path = hidden_config;
            return smn::cmd_analyze_hidden(hidden_args);
        }
        if (simulate->parsed()) {
            if (*sim_seed_opt) sim_args.seed = sim_seed;
            if (*sim_dur_opt)
                sim_args.duration_s = smn::parse_duration_seconds(sim_duration);
            return smn::cmd_simulate(sim_args);
        }
        if (sweep->parsed()) {
            if (*sweep_seed_opt) sweep_args.seed = sweep_seed;
            std::stringstream ss(sweep_values);
            std::string item;
            while (std::getline(ss, item, ',')) sweep_args.values.push_back(item);
            return smn::cmd_sweep(sweep_args);
        }
    } catch (const smn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return smn::kExitConfigError;
    }
    return smn::kExitConfigError;
}
