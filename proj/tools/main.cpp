// Command-line front end: simulate / sweep / verify.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "eela/engine.hpp"
#include "eela/experiment.hpp"
#include "eela/localization.hpp"
#include "eela/rng.hpp"
#include "eela/scenario.hpp"
#include "eela/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitVerifyFailed = 3;

struct SimulateArgs {
    std::string config;
    std::string policy;
    int sensors = 0;
    double speed = 0.0;
    int replications = 0;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string trace;
};

int run_simulate(const SimulateArgs& args) {
    eela::Scenario sc = eela::load_scenario_file(args.config);
    if (!args.policy.empty()) {
        const auto p = eela::parse_policy(args.policy);
        if (!p) throw eela::ConfigError("unknown policy: " + args.policy);
        sc.policy = *p;
    }
    if (args.sensors > 0) sc.n_sensors = args.sensors;
    if (args.speed > 0.0) {
        if (args.speed != 2.0 && args.speed != 3.0 && args.speed != 4.0) {
            throw eela::ConfigError("--speed must be one of 2, 3, 4");
        }
        sc.current_speed_mps = args.speed;
    }
    if (args.replications > 0) sc.replications = args.replications;
    if (args.seed) sc.seed = *args.seed;
    sc.finalize();

    std::ofstream trace_file;
    std::ostream* trace = nullptr;
    if (!args.trace.empty()) {
        trace_file.open(args.trace);
        if (!trace_file) throw eela::ConfigError("cannot open trace file: " + args.trace);
        trace_file << "time_s\tkind\tnode_id\tpeer_id\tpower_watts\toutcome\n";
        trace = &trace_file;
    }

    const eela::MetricsReport report = eela::run_experiment(sc, trace);

    if (!args.out.empty()) {
        std::ofstream out(args.out);
        if (!out) throw eela::ConfigError("cannot open output file: " + args.out);
        eela::write_report_csv(out, report);
    } else {
        eela::write_report_csv(std::cout, report);
    }
    std::cerr << "policy " << eela::to_string(sc.policy) << ": coverage "
              << report.coverage.mean << ", sensor energy " << report.e_sensor.mean
              << " J, node energy " << report.e_node.mean << " J over " << sc.replications
              << " replications\n";
    return kExitOk;
}

int run_sweep(const std::string& config, const std::string& axis_name, const std::string& out) {
    eela::Scenario sc = eela::load_scenario_file(config);
    const auto axis = eela::parse_sweep_axis(axis_name);
    if (!axis) throw eela::ConfigError("unknown sweep axis: " + axis_name);
    const std::vector<eela::SweepRow> rows = eela::sweep(sc, *axis);
    std::ofstream file(out);
    if (!file) throw eela::ConfigError("cannot open output file: " + out);
    eela::write_sweep_csv(file, rows);
    std::cerr << "wrote " << rows.size() << " rows to " << out << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Underwater acoustic localization simulator"};
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "Run one scenario and report metrics");
    simulate->add_option("--config", sim.config, "Scenario config file")->required();
    simulate->add_option("--policy", sim.policy, "EELA | OLTC | EELA-Min | EELA-Max");
    simulate->add_option("--sensors", sim.sensors, "Override sensor count");
    simulate->add_option("--speed", sim.speed, "Override current speed (2, 3 or 4 m/s)");
    simulate->add_option("--replications", sim.replications, "Override replication count");
    std::int64_t seed_arg = -1;
    simulate->add_option("--seed", seed_arg, "Override master seed");
    simulate->add_option("--out", sim.out, "Write the per-replication CSV report here");
    simulate->add_option("--trace", sim.trace, "Write the event trace (TSV) here");

    std::string sweep_config, sweep_axis, sweep_out;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Sweep an axis and write a CSV report");
    sweep_cmd->add_option("--config", sweep_config, "Scenario config file")->required();
    sweep_cmd->add_option("--axis", sweep_axis, "sensors | speed | policy")->required();
    sweep_cmd->add_option("--out", sweep_out, "Output CSV path")->required();

    CLI::App* verify_cmd =
        app.add_subcommand("verify", "Run the solver and geometry property checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (simulate->parsed()) {
            if (seed_arg >= 0) sim.seed = static_cast<std::uint64_t>(seed_arg);
            return run_simulate(sim);
        }
        if (sweep_cmd->parsed()) {
            return run_sweep(sweep_config, sweep_axis, sweep_out);
        }
        if (verify_cmd->parsed()) {
            return eela::run_verification(std::cout) ? kExitOk : kExitVerifyFailed;
        }
    } catch (const eela::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
