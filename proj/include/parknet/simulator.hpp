#pragma once

#include "parknet/network.hpp"

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace parknet {

struct ServiceDistribution {
    enum class Kind { exponential, deterministic, empirical };

    Kind kind = Kind::exponential;
    double mean = 1.0;           // exponential mean / deterministic value / sample mean
    std::vector<double> samples; // empirical only

    static ServiceDistribution exponential(double mean);
    static ServiceDistribution deterministic(double value);
    static ServiceDistribution empirical(std::vector<double> samples);

    double declared_mean() const { return mean; }
    void validate() const;
};

// One service-time draw. Exponential uses mean * (-ln U) explicitly so the
// stream is reproducible across standard libraries.
double sample_service(const ServiceDistribution& dist, std::mt19937_64& rng);

// What happens when a task is rejected at a node with no out-edges.
// `error` is the network default (the task has nowhere to go, so the
// configuration is broken); `drop` turns the node into a pure loss queue,
// which is what the isolated single-queue oracle runs use.
enum class DeadEndPolicy { error, drop };

struct SimConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimConfig {
    Topology topology;
    std::vector<ServiceDistribution> service; // one per node, topology order
    double horizon = 1000.0;
    double warmup = 0.0;
    std::uint64_t seed = 1;
    int replications = 1;
    double convergence_bucket = 0.0; // > 0 records per-bucket occupancy series
    DeadEndPolicy dead_end_policy = DeadEndPolicy::error;

    void validate() const;
};

struct NodeReport {
    double occupancy = 0.0;             // time-averaged busy fraction over [warmup, horizon]
    std::uint64_t rejection_count = 0;  // rejection events in [warmup, horizon]
    double rejection_rate = 0.0;        // rejection_count / (horizon - warmup)
    std::uint64_t exo_arrivals = 0;     // exogenous arrivals in [warmup, horizon]
    std::uint64_t exo_blocked = 0;      // of those, how many found the node full
    std::uint64_t transit_arrivals = 0; // searching tasks arriving via an edge
};

struct SimReport {
    std::vector<NodeReport> node; // topology order

    // Exact task accounting over [0, horizon]:
    // total_arrivals == served_count + in_service_at_end + still_in_transit + dropped_count
    std::uint64_t total_arrivals = 0;
    std::uint64_t served_count = 0;
    std::uint64_t in_service_at_end = 0;
    std::uint64_t still_in_transit = 0;
    std::uint64_t dropped_count = 0;
    std::uint64_t total_rejections = 0;

    // Search time: first rejection to start of service, for tasks entering
    // service in [warmup, horizon]. The first mean counts only tasks rejected
    // at least once; the second spreads over every served task (zeros included).
    double average_search_time = 0.0;
    double average_search_time_all = 0.0;
    std::uint64_t searched_count = 0;
    std::uint64_t start_count = 0;

    // per-node, per-bucket time-averaged busy fraction over [0, horizon],
    // recorded only when convergence_bucket > 0
    std::vector<std::vector<double>> occupancy_series;
};

// Single event-driven run. Same config + seed gives a bit-identical report:
// one RNG stream consumed in event order, ties broken by insertion order.
SimReport run(const SimConfig& config);

struct Aggregate {
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation, 0 when replications == 1
};

struct ReplicatedReport {
    std::vector<SimReport> runs; // replication order, seeds seed .. seed+R-1
    std::vector<Aggregate> occupancy;      // per node
    std::vector<Aggregate> rejection_rate; // per node
    Aggregate average_search_time;
    Aggregate average_search_time_all;
    std::vector<std::vector<Aggregate>> occupancy_series; // [node][bucket]
};

// Independent replications with seeds seed, seed+1, ...; they may execute on
// several threads, aggregation order is always replication order.
ReplicatedReport replicate(const SimConfig& config);

// Per-node occupancy series from time zero (no warmup discard), averaged
// across replications. Requires convergence_bucket > 0.
std::vector<std::vector<double>> convergence_series(const SimConfig& config);

} // namespace parknet
