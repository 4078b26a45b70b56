#include "parknet/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace parknet::cli;

    CLI::App app{"parknet: analytic solver and discrete-event simulator for "
                 "networks of finite-capacity parking queues"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve = app.add_subcommand(
        "solve", "estimate per-node arrival and rejection rates from occupancies");
    solve->add_option("topology", solve_args.topology_file, "topology JSON file")->required();
    solve->add_option("occupancy", solve_args.occupancy_file, "CSV of node_id,occupancy")
        ->required();
    solve->add_option("-o,--out", solve_args.out_file, "output table")->required();

    SimulateArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "run the network simulator");
    simulate->add_option("topology", sim_args.topology_file, "topology JSON file")->required();
    simulate->add_option("-o,--out", sim_args.out_file, "output table")->required();
    simulate->add_option("--params", sim_args.params_file,
                         "CSV of node_id,exo_rate[,service_rate[,servers]] overrides");
    simulate->add_option("--service", sim_args.service, "exp | det | empirical")
        ->default_val("exp");
    simulate->add_option("--horizon", sim_args.horizon, "simulated time units")
        ->default_val(1000.0);
    simulate->add_option("--warmup", sim_args.warmup,
                         "metrics discard window (default horizon/5, or 0 with --convergence)");
    simulate->add_option("--seed", sim_args.seed, "base RNG seed")
        ->envname("PARKNET_SEED")
        ->default_val(1);
    simulate->add_option("--replications", sim_args.replications)->default_val(1);
    simulate->add_flag("--convergence", sim_args.convergence,
                       "record the occupancy time series from time zero");
    simulate->add_option("--bucket", sim_args.convergence_bucket,
                         "series sampling interval")
        ->default_val(1.0);

    ValidateArgs val_args;
    auto* validate = app.add_subcommand(
        "validate", "estimate rates from occupancies, re-simulate, report errors");
    validate->add_option("topology", val_args.topology_file, "topology JSON file")->required();
    validate->add_option("occupancy", val_args.occupancy_file, "CSV of node_id,occupancy")
        ->required();
    validate->add_option("-o,--out", val_args.out_file, "output table")->required();
    validate->add_option("--params", val_args.params_file, "CSV parameter overrides");
    validate->add_option("--service", val_args.service, "exp | det | empirical")
        ->default_val("exp");
    validate->add_option("--horizon", val_args.horizon)->default_val(1000.0);
    validate->add_option("--warmup", val_args.warmup);
    validate->add_option("--seed", val_args.seed)
        ->envname("PARKNET_SEED")
        ->default_val(1);
    validate->add_option("--replications", val_args.replications)->default_val(100);

    FitArgs fit_args;
    auto* fit = app.add_subcommand(
        "fit", "per-block service statistics and exponential inter-arrival fit");
    fit->add_option("transactions", fit_args.transactions_file,
                    "CSV of block_id,start_iso8601,paid_minutes")
        ->required();
    fit->add_option("supply", fit_args.supply_file, "CSV of block_id,spaces")->required();
    fit->add_option("-o,--out", fit_args.out_file, "output table")->required();
    fit->add_flag("--lenient", fit_args.lenient,
                  "skip malformed lines instead of failing");

    std::string replay_in, replay_out;
    auto* replay = app.add_subcommand(
        "replay", "re-run the command recorded in a report's embedded manifest");
    replay->add_option("report", replay_in, "previously emitted report file")->required();
    replay->add_option("-o,--out", replay_out, "output table")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    if (solve->parsed()) return cmd_solve(solve_args, std::cerr);
    if (simulate->parsed()) return cmd_simulate(sim_args, std::cerr);
    if (validate->parsed()) return cmd_validate(val_args, std::cerr);
    if (fit->parsed()) return cmd_fit(fit_args, std::cerr);
    if (replay->parsed()) return cmd_replay(replay_in, replay_out, std::cerr);
    return exit_usage;
}
