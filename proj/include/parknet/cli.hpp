#pragma once

#include "parknet/network.hpp"
#include "parknet/simulator.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace parknet::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_parse = 2,
    exit_model = 3,
    exit_simconfig = 4,
};

// Topology file plus the optional per-node empirical service samples that
// ride along with it (inline or via side files).
struct LoadedTopology {
    Topology topology;
    std::map<std::string, std::vector<double>> service_samples;
};

LoadedTopology load_topology(const std::string& path);

// `node_id,occupancy` with optional header. Values must be >= 0; anything
// above the clamp threshold is clamped, matching the load pipeline.
std::map<std::string, double> load_occupancies(const std::string& path);

// Per-node overrides: `node_id,exo_rate[,service_rate[,servers]]`, header
// auto-detected, empty fields leave the topology value untouched.
struct ParamsOverride {
    std::optional<double> exo_rate;
    std::optional<double> service_rate;
    std::optional<int> servers;
};
std::map<std::string, ParamsOverride> load_params(const std::string& path);
Topology apply_params(const Topology& topology,
                      const std::map<std::string, ParamsOverride>& params);

struct SolveArgs {
    std::string topology_file;
    std::string occupancy_file;
    std::string out_file;
};

struct SimulateArgs {
    std::string topology_file;
    std::string params_file; // optional
    std::string out_file;
    std::string service = "exp"; // exp | det | empirical
    double horizon = 1000.0;
    double warmup = -1.0; // < 0 resolves to horizon / 5
    std::uint64_t seed = 1;
    int replications = 1;
    bool convergence = false;
    double convergence_bucket = 1.0;
};

struct ValidateArgs {
    std::string topology_file;
    std::string occupancy_file;
    std::string params_file; // optional
    std::string out_file;
    std::string service = "exp";
    double horizon = 1000.0;
    double warmup = -1.0;
    std::uint64_t seed = 1;
    int replications = 100;
};

struct FitArgs {
    std::string transactions_file;
    std::string supply_file;
    std::string out_file;
    bool lenient = false;
};

// Each command returns a process exit code and reports problems on diag.
int cmd_solve(const SolveArgs& args, std::ostream& diag);
int cmd_simulate(const SimulateArgs& args, std::ostream& diag);
int cmd_validate(const ValidateArgs& args, std::ostream& diag);
int cmd_fit(const FitArgs& args, std::ostream& diag);

// Re-runs the command recorded in a report's embedded manifest, writing the
// regenerated report to out_file.
int cmd_replay(const std::string& report_file, const std::string& out_file,
               std::ostream& diag);

} // namespace parknet::cli
