#include "parknet/cli.hpp"

#include "parknet/data.hpp"
#include "parknet/solver.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

namespace parknet::cli {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string fmt(std::uint64_t v) { return std::to_string(v); }

struct Row {
    std::string node;
    std::string metric;
    std::string value;
    std::string replication;
};

void write_report(const std::string& path, const json& manifest,
                  const std::vector<Row>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParseError("cannot open output file '" + path + "'");
    out << "# manifest: " << manifest.dump() << "\n";
    out << "node,metric,value,replication\n";
    for (const auto& r : rows)
        out << r.node << ',' << r.metric << ',' << r.value << ',' << r.replication << "\n";
    if (!out)
        throw ParseError("failed writing output file '" + path + "'");
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open '" + path + "'");
    return in;
}

double require_positive(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_number())
        throw ParseError("topology: missing numeric '" + std::string(key) + "' in " + where);
    return j[key].get<double>();
}

std::vector<double> read_sample_file(const std::string& path) {
    auto in = open_input(path);
    std::vector<double> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        double v = 0.0;
        auto [p, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
        if (ec != std::errc{} || p != line.data() + line.size())
            throw ParseError("sample file '" + path + "' line " + std::to_string(line_no) +
                             ": not a number");
        samples.push_back(v);
    }
    return samples;
}

} // namespace

LoadedTopology load_topology(const std::string& path) {
    auto in = open_input(path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("topology '" + path + "': " + e.what());
    }
    if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array())
        throw ParseError("topology '" + path + "': expected an object with a 'nodes' array");

    LoadedTopology lt;
    std::vector<std::pair<std::string, QueueSpec>> nodes;
    for (const auto& n : doc["nodes"]) {
        if (!n.contains("id") || !n["id"].is_string())
            throw ParseError("topology: node without string 'id'");
        const std::string id = n["id"].get<std::string>();
        QueueSpec q;
        if (!n.contains("servers") || !n["servers"].is_number_integer())
            throw ParseError("topology: 'servers' must be an integer at node '" + id + "'");
        q.servers = n["servers"].get<int>();
        q.service_rate = require_positive(n, "service_rate", "node '" + id + "'");
        q.exo_arrival_rate = n.value("exo_rate", 0.0);
        nodes.emplace_back(id, q);
        if (n.contains("service_samples")) {
            if (!n["service_samples"].is_array())
                throw ParseError("topology: 'service_samples' must be an array at node '" + id + "'");
            lt.service_samples[id] = n["service_samples"].get<std::vector<double>>();
        } else if (n.contains("service_samples_file")) {
            lt.service_samples[id] =
                read_sample_file(n["service_samples_file"].get<std::string>());
        }
    }

    std::vector<std::tuple<std::string, std::string, double>> edges;
    if (doc.contains("edges")) {
        if (!doc["edges"].is_array())
            throw ParseError("topology '" + path + "': 'edges' must be an array");
        for (const auto& e : doc["edges"]) {
            if (!e.contains("from") || !e.contains("to"))
                throw ParseError("topology: edge without 'from'/'to'");
            edges.emplace_back(e["from"].get<std::string>(), e["to"].get<std::string>(),
                               require_positive(e, "travel_time", "edge"));
        }
    }
    lt.topology = Topology(std::move(nodes), std::move(edges));
    return lt;
}

std::map<std::string, double> load_occupancies(const std::string& path) {
    auto in = open_input(path);
    std::map<std::string, double> out;
    std::string line;
    std::size_t line_no = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError("occupancy '" + path + "' line " + std::to_string(line_no) +
                             ": expected 'node_id,occupancy'");
        const std::string id = line.substr(0, comma);
        const std::string rest = line.substr(comma + 1);
        double u = 0.0;
        auto [p, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), u);
        if (ec != std::errc{} || p != rest.data() + rest.size()) {
            if (first_content) {
                first_content = false; // header
                continue;
            }
            throw ParseError("occupancy '" + path + "' line " + std::to_string(line_no) +
                             ": bad value '" + rest + "'");
        }
        first_content = false;
        if (u < 0.0)
            throw ParseError("occupancy '" + path + "' line " + std::to_string(line_no) +
                             ": negative occupancy");
        out[id] = std::min(u, kLoadClamp);
    }
    if (out.empty())
        throw ParseError("occupancy '" + path + "': no records");
    return out;
}

std::map<std::string, ParamsOverride> load_params(const std::string& path) {
    auto in = open_input(path);
    std::map<std::string, ParamsOverride> out;
    std::string line;
    std::size_t line_no = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() < 2 || fields.size() > 4)
            throw ParseError("params '" + path + "' line " + std::to_string(line_no) +
                             ": expected 'node_id,exo_rate[,service_rate[,servers]]'");

        ParamsOverride ov;
        auto parse_opt = [&](const std::string& s, double& v) {
            if (s.empty()) return false;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || p != s.data() + s.size())
                throw ParseError("params '" + path + "' line " + std::to_string(line_no) +
                                 ": bad number '" + s + "'");
            return true;
        };
        double v = 0.0;
        try {
            if (parse_opt(fields[1], v)) ov.exo_rate = v;
            if (fields.size() > 2 && parse_opt(fields[2], v)) ov.service_rate = v;
            if (fields.size() > 3 && parse_opt(fields[3], v))
                ov.servers = static_cast<int>(v);
        } catch (const ParseError&) {
            if (first_content) {
                first_content = false; // header
                continue;
            }
            throw;
        }
        first_content = false;
        out[fields[0]] = ov;
    }
    return out;
}

Topology apply_params(const Topology& topology,
                      const std::map<std::string, ParamsOverride>& params) {
    for (const auto& [id, ov] : params)
        if (topology.index_of(id) < 0)
            throw std::invalid_argument("params reference unknown node '" + id + "'");
    std::vector<std::pair<std::string, QueueSpec>> nodes;
    for (const auto& n : topology.nodes()) {
        QueueSpec q = n.queue;
        auto it = params.find(n.id);
        if (it != params.end()) {
            if (it->second.exo_rate) q.exo_arrival_rate = *it->second.exo_rate;
            if (it->second.service_rate) q.service_rate = *it->second.service_rate;
            if (it->second.servers) q.servers = *it->second.servers;
        }
        nodes.emplace_back(n.id, q);
    }
    std::vector<std::tuple<std::string, std::string, double>> edges;
    for (const auto& e : topology.edges())
        edges.emplace_back(topology.nodes()[e.from].id, topology.nodes()[e.to].id,
                           e.travel_time);
    return Topology(std::move(nodes), std::move(edges));
}

namespace {

template <typename Fn>
int guarded(std::ostream& diag, Fn&& fn) {
    try {
        return fn();
    } catch (const ParseError& e) {
        diag << "error (parse): " << e.what() << "\n";
        return exit_parse;
    } catch (const SimConfigError& e) {
        diag << "error (simulation config): " << e.what() << "\n";
        return exit_simconfig;
    } catch (const FixedPointError& e) {
        diag << "error (solver): " << e.what() << "\n";
        return exit_model;
    } catch (const std::invalid_argument& e) {
        diag << "error (invariant): " << e.what() << "\n";
        return exit_model;
    } catch (const std::domain_error& e) {
        diag << "error (model): " << e.what() << "\n";
        return exit_model;
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return exit_model;
    }
}

std::vector<ServiceDistribution> build_services(const Topology& topology,
                                                const std::string& kind,
                                                const std::map<std::string, std::vector<double>>& samples) {
    std::vector<ServiceDistribution> out;
    out.reserve(topology.size());
    for (const auto& n : topology.nodes()) {
        const double mean = 1.0 / n.queue.service_rate;
        if (kind == "exp") {
            out.push_back(ServiceDistribution::exponential(mean));
        } else if (kind == "det") {
            out.push_back(ServiceDistribution::deterministic(mean));
        } else if (kind == "empirical") {
            auto it = samples.find(n.id);
            if (it == samples.end())
                throw SimConfigError("no service samples for node '" + n.id +
                                     "' (required by --service empirical)");
            out.push_back(ServiceDistribution::empirical(it->second));
        } else {
            throw SimConfigError("unknown service kind '" + kind +
                                 "' (expected exp, det or empirical)");
        }
    }
    return out;
}

void require_routable(const Topology& topology) {
    for (std::size_t i = 0; i < topology.size(); ++i)
        if (topology.out_degree(static_cast<int>(i)) == 0)
            throw SimConfigError("node '" + topology.nodes()[i].id +
                                 "' has no out-edges; rejected tasks would have nowhere to go");
}

void warn_if_unstable(const Topology& topology, std::ostream& diag) {
    const StabilityReport st = stability_check(topology);
    if (!st.communicates)
        diag << "warning: topology does not communicate (not strongly connected)\n";
    if (!st.stable_capacity_condition)
        diag << "warning: total exogenous rate " << st.total_lambda
             << " >= total service capacity " << st.total_capacity
             << "; task population may grow without bound\n";
}

double median_of(std::vector<double> xs) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0));
}

void append_replication_rows(std::vector<Row>& rows, const Topology& topology,
                             const ReplicatedReport& rep, bool with_series,
                             double bucket) {
    const int reps = static_cast<int>(rep.runs.size());
    for (std::size_t i = 0; i < topology.size(); ++i) {
        const std::string& id = topology.nodes()[i].id;
        for (int r = 0; r < reps; ++r) {
            rows.push_back({id, "occupancy", fmt(rep.runs[r].node[i].occupancy),
                            std::to_string(r)});
            rows.push_back({id, "rejection_rate", fmt(rep.runs[r].node[i].rejection_rate),
                            std::to_string(r)});
        }
        rows.push_back({id, "occupancy", fmt(rep.occupancy[i].mean), "mean"});
        rows.push_back({id, "occupancy", fmt(rep.occupancy[i].stddev), "std"});
        rows.push_back({id, "rejection_rate", fmt(rep.rejection_rate[i].mean), "mean"});
        rows.push_back({id, "rejection_rate", fmt(rep.rejection_rate[i].stddev), "std"});
    }
    for (int r = 0; r < reps; ++r) {
        const SimReport& run = rep.runs[r];
        const std::string rs = std::to_string(r);
        rows.push_back({"*", "average_search_time", fmt(run.average_search_time), rs});
        rows.push_back({"*", "average_search_time_all", fmt(run.average_search_time_all), rs});
        rows.push_back({"*", "total_arrivals", fmt(run.total_arrivals), rs});
        rows.push_back({"*", "served_count", fmt(run.served_count), rs});
        rows.push_back({"*", "in_service_at_end", fmt(run.in_service_at_end), rs});
        rows.push_back({"*", "still_in_transit", fmt(run.still_in_transit), rs});
        rows.push_back({"*", "dropped_count", fmt(run.dropped_count), rs});
        rows.push_back({"*", "total_rejections", fmt(run.total_rejections), rs});
    }
    rows.push_back({"*", "average_search_time", fmt(rep.average_search_time.mean), "mean"});
    rows.push_back({"*", "average_search_time", fmt(rep.average_search_time.stddev), "std"});
    rows.push_back({"*", "average_search_time_all", fmt(rep.average_search_time_all.mean), "mean"});
    rows.push_back({"*", "average_search_time_all", fmt(rep.average_search_time_all.stddev), "std"});

    if (with_series) {
        for (std::size_t i = 0; i < topology.size(); ++i) {
            const std::string& id = topology.nodes()[i].id;
            for (std::size_t b = 0; b < rep.occupancy_series[i].size(); ++b) {
                const std::string metric =
                    "occupancy_series:" + fmt(bucket * (static_cast<double>(b) + 1.0));
                rows.push_back({id, metric, fmt(rep.occupancy_series[i][b].mean), "mean"});
                rows.push_back({id, metric, fmt(rep.occupancy_series[i][b].stddev), "std"});
            }
        }
    }
}

} // namespace

int cmd_solve(const SolveArgs& args, std::ostream& diag) {
    return guarded(diag, [&] {
        const auto started = std::chrono::steady_clock::now();
        LoadedTopology lt = load_topology(args.topology_file);
        const auto occupancies = load_occupancies(args.occupancy_file);
        for (const auto& [id, u] : occupancies)
            if (lt.topology.index_of(id) < 0)
                throw std::invalid_argument("occupancy for unknown node '" + id + "'");

        const auto estimates = estimate_from_occupancy(lt.topology, occupancies);

        std::vector<Row> rows;
        for (const auto& n : lt.topology.nodes()) {
            const NodeEstimate& e = estimates.at(n.id);
            rows.push_back({n.id, "total_arrival_rate", fmt(e.total_arrival_rate), ""});
            rows.push_back({n.id, "blocking", fmt(e.blocking), ""});
            rows.push_back({n.id, "rejection_rate", fmt(e.rejection_rate), ""});
            rows.push_back({n.id, "implied_exo_rate", fmt(e.implied_exo_rate), ""});
        }

        json manifest{{"command", "solve"},
                      {"version", kVersion},
                      {"topology", args.topology_file},
                      {"occupancy", args.occupancy_file}};
        write_report(args.out_file, manifest, rows);
        diag << "solve: " << lt.topology.size() << " nodes in "
             << std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - started)
                    .count()
             << " ms\n";
        return exit_ok;
    });
}

int cmd_simulate(const SimulateArgs& args, std::ostream& diag) {
    return guarded(diag, [&] {
        const auto started = std::chrono::steady_clock::now();
        LoadedTopology lt = load_topology(args.topology_file);
        Topology topology = lt.topology;
        if (!args.params_file.empty())
            topology = apply_params(topology, load_params(args.params_file));
        require_routable(topology);
        warn_if_unstable(topology, diag);

        SimConfig cfg;
        cfg.topology = topology;
        cfg.service = build_services(topology, args.service, lt.service_samples);
        cfg.horizon = args.horizon;
        cfg.warmup = args.warmup >= 0.0 ? args.warmup
                                        : (args.convergence ? 0.0 : args.horizon / 5.0);
        cfg.seed = args.seed;
        cfg.replications = args.replications;
        cfg.convergence_bucket = args.convergence ? args.convergence_bucket : 0.0;
        cfg.validate();

        const ReplicatedReport rep = replicate(cfg);

        std::vector<Row> rows;
        append_replication_rows(rows, topology, rep, args.convergence,
                                cfg.convergence_bucket);

        json manifest{{"command", "simulate"},
                      {"version", kVersion},
                      {"topology", args.topology_file},
                      {"params", args.params_file},
                      {"service", args.service},
                      {"horizon", args.horizon},
                      {"warmup", cfg.warmup},
                      {"seed", args.seed},
                      {"replications", args.replications},
                      {"convergence", args.convergence},
                      {"convergence_bucket", cfg.convergence_bucket}};
        write_report(args.out_file, manifest, rows);
        diag << "simulate: " << rep.runs.size() << " replication(s) in "
             << std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - started)
                    .count()
             << " ms\n";
        return exit_ok;
    });
}

int cmd_validate(const ValidateArgs& args, std::ostream& diag) {
    return guarded(diag, [&] {
        const auto started = std::chrono::steady_clock::now();
        LoadedTopology lt = load_topology(args.topology_file);
        Topology topology = lt.topology;
        if (!args.params_file.empty())
            topology = apply_params(topology, load_params(args.params_file));
        require_routable(topology);

        const auto occupancies = load_occupancies(args.occupancy_file);
        const auto estimates = estimate_from_occupancy(topology, occupancies);

        // feed the estimated exogenous rates back into the simulator;
        // inconsistent (negative) shares run as zero and are reported as-is
        std::map<std::string, ParamsOverride> exo;
        int negative_shares = 0;
        for (const auto& [id, est] : estimates) {
            ParamsOverride ov;
            ov.exo_rate = std::max(0.0, est.implied_exo_rate);
            if (est.implied_exo_rate < 0.0) ++negative_shares;
            exo[id] = ov;
        }
        if (negative_shares > 0)
            diag << "note: " << negative_shares
                 << " node(s) with negative implied exogenous share, simulated as 0\n";
        Topology sim_topology = apply_params(topology, exo);
        warn_if_unstable(sim_topology, diag);

        SimConfig cfg;
        cfg.topology = sim_topology;
        cfg.service = build_services(sim_topology, args.service, lt.service_samples);
        cfg.horizon = args.horizon;
        cfg.warmup = args.warmup >= 0.0 ? args.warmup : args.horizon / 5.0;
        cfg.seed = args.seed;
        cfg.replications = args.replications;
        cfg.validate();

        const ReplicatedReport rep = replicate(cfg);

        std::vector<Row> rows;
        std::vector<double> occ_errors, rej_errors;
        for (std::size_t i = 0; i < sim_topology.size(); ++i) {
            const std::string& id = sim_topology.nodes()[i].id;
            const NodeEstimate& est = estimates.at(id);
            const double observed = occupancies.at(id);
            const double occ_err = rep.occupancy[i].mean - observed;
            const double rej_err = rep.rejection_rate[i].mean - est.rejection_rate;
            occ_errors.push_back(occ_err);
            rej_errors.push_back(rej_err);
            rows.push_back({id, "occupancy_observed", fmt(observed), ""});
            rows.push_back({id, "occupancy_simulated", fmt(rep.occupancy[i].mean), ""});
            rows.push_back({id, "occupancy_error", fmt(occ_err), ""});
            rows.push_back({id, "rejection_estimate", fmt(est.rejection_rate), ""});
            rows.push_back({id, "rejection_simulated", fmt(rep.rejection_rate[i].mean), ""});
            rows.push_back({id, "rejection_error", fmt(rej_err), ""});
            rows.push_back({id, "implied_exo_rate", fmt(est.implied_exo_rate), ""});
            rows.push_back({id, "exo_rate_used", fmt(*exo.at(id).exo_rate), ""});
        }
        rows.push_back({"*", "occupancy_error_mean", fmt(mean_of(occ_errors)), ""});
        rows.push_back({"*", "occupancy_error_std", fmt(stddev_of(occ_errors)), ""});
        rows.push_back({"*", "occupancy_error_median", fmt(median_of(occ_errors)), ""});
        rows.push_back({"*", "rejection_error_mean", fmt(mean_of(rej_errors)), ""});
        rows.push_back({"*", "rejection_error_std", fmt(stddev_of(rej_errors)), ""});
        rows.push_back({"*", "rejection_error_median", fmt(median_of(rej_errors)), ""});

        json manifest{{"command", "validate"},
                      {"version", kVersion},
                      {"topology", args.topology_file},
                      {"occupancy", args.occupancy_file},
                      {"params", args.params_file},
                      {"service", args.service},
                      {"horizon", args.horizon},
                      {"warmup", cfg.warmup},
                      {"seed", args.seed},
                      {"replications", args.replications}};
        write_report(args.out_file, manifest, rows);
        diag << "validate: mean occupancy error " << fmt(mean_of(occ_errors))
             << ", mean rejection error " << fmt(mean_of(rej_errors)) << " ("
             << std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - started)
                    .count()
             << " ms)\n";
        return exit_ok;
    });
}

int cmd_fit(const FitArgs& args, std::ostream& diag) {
    return guarded(diag, [&] {
        const auto started = std::chrono::steady_clock::now();
        auto tin = open_input(args.transactions_file);
        const TransactionParse parsed = read_transactions(tin, args.lenient);
        for (const auto& note : parsed.skipped) diag << "skipped " << note << "\n";
        auto sin = open_input(args.supply_file);
        const auto supply = read_supply(sin, args.lenient);

        const auto params = block_parameters(parsed.records, supply);

        std::vector<Row> rows;
        for (const auto& [id, bp] : params) {
            rows.push_back({id, "supply", std::to_string(bp.supply), ""});
            rows.push_back({id, "service_rate", fmt(bp.service_rate), ""});
            rows.push_back({id, "mean_paid_minutes", fmt(bp.mean_paid_minutes), ""});
            rows.push_back({id, "median_paid_minutes", fmt(bp.median_paid_minutes), ""});
            rows.push_back(
                {id, "transaction_count", std::to_string(bp.service_samples.size()), ""});
            if (bp.service_samples.size() >= 2) {
                const ExponentialFit fit =
                    fit_exponential_interarrivals(parsed.records, id);
                rows.push_back({id, "interarrival_rate", fmt(fit.rate), ""});
                rows.push_back({id, "ks_statistic", fmt(fit.ks_statistic), ""});
            } else {
                diag << "note: block '" << id
                     << "' has a single transaction, no inter-arrival fit\n";
            }
        }

        json manifest{{"command", "fit"},
                      {"version", kVersion},
                      {"transactions", args.transactions_file},
                      {"supply", args.supply_file},
                      {"lenient", args.lenient}};
        write_report(args.out_file, manifest, rows);
        diag << "fit: " << params.size() << " block(s) in "
             << std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - started)
                    .count()
             << " ms\n";
        return exit_ok;
    });
}

int cmd_replay(const std::string& report_file, const std::string& out_file,
               std::ostream& diag) {
    return guarded(diag, [&]() -> int {
        auto in = open_input(report_file);
        std::string first;
        std::getline(in, first);
        const std::string prefix = "# manifest: ";
        if (first.rfind(prefix, 0) != 0)
            throw ParseError("'" + report_file + "' has no embedded manifest");
        json m;
        try {
            m = json::parse(first.substr(prefix.size()));
        } catch (const json::exception& e) {
            throw ParseError("manifest in '" + report_file + "': " + e.what());
        }
        const std::string command = m.value("command", "");
        if (command == "solve") {
            SolveArgs a;
            a.topology_file = m.at("topology");
            a.occupancy_file = m.at("occupancy");
            a.out_file = out_file;
            return cmd_solve(a, diag);
        }
        if (command == "simulate") {
            SimulateArgs a;
            a.topology_file = m.at("topology");
            a.params_file = m.value("params", "");
            a.out_file = out_file;
            a.service = m.at("service");
            a.horizon = m.at("horizon");
            a.warmup = m.at("warmup");
            a.seed = m.at("seed");
            a.replications = m.at("replications");
            a.convergence = m.value("convergence", false);
            a.convergence_bucket = m.value("convergence_bucket", 1.0);
            if (a.convergence && a.convergence_bucket <= 0.0) a.convergence_bucket = 1.0;
            return cmd_simulate(a, diag);
        }
        if (command == "validate") {
            ValidateArgs a;
            a.topology_file = m.at("topology");
            a.occupancy_file = m.at("occupancy");
            a.params_file = m.value("params", "");
            a.out_file = out_file;
            a.service = m.at("service");
            a.horizon = m.at("horizon");
            a.warmup = m.at("warmup");
            a.seed = m.at("seed");
            a.replications = m.at("replications");
            return cmd_validate(a, diag);
        }
        if (command == "fit") {
            FitArgs a;
            a.transactions_file = m.at("transactions");
            a.supply_file = m.at("supply");
            a.out_file = out_file;
            a.lenient = m.value("lenient", false);
            return cmd_fit(a, diag);
        }
        throw ParseError("manifest command '" + command + "' is not replayable");
    });
}

} // namespace parknet::cli
