#pragma once

#include "parknet/queue.hpp"

#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace parknet {

// Directed graph of finite-capacity queues. Edges are fixed-delay transit
// legs a rejected task must traverse to try the next queue. Immutable once
// built; construction enforces unique ids, existing endpoints, positive
// travel times and no self loops.
class Topology {
public:
    struct Node {
        std::string id;
        QueueSpec queue;
    };
    struct Edge {
        int from = 0;
        int to = 0;
        double travel_time = 0.0;
    };

    Topology() = default;
    Topology(std::vector<std::pair<std::string, QueueSpec>> nodes,
             std::vector<std::tuple<std::string, std::string, double>> edges);

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    // Out-edges of a node, in declaration order (uniform routing draws over these).
    const std::vector<Edge>& out_edges(int node) const { return adjacency_[node]; }
    std::size_t size() const { return nodes_.size(); }

    // Index for an id, -1 if absent.
    int index_of(const std::string& id) const;
    int out_degree(int node) const { return static_cast<int>(adjacency_[node].size()); }

private:
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Edge>> adjacency_;
    std::map<std::string, int> index_;
};

// True iff every queue is reachable from every other queue (the network
// "communicates": strong connectivity of the digraph).
bool communicates(const Topology& topology);

struct StabilityReport {
    bool communicates = false;
    bool stable_per_server_condition = false;    // sum(lambda) < sum(mu), per-server rates
    bool stable_capacity_condition = false; // sum(lambda) < sum(k * mu)
    double total_lambda = 0.0;
    double total_mu = 0.0;
    double total_capacity = 0.0; // sum(k * mu)
};

// Reports both boundedness conditions; downstream tooling gates on the
// total-capacity form. Sums are computed even when the graph does not
// communicate (the flag says so).
StabilityReport stability_check(const Topology& topology);

struct NodeEstimate {
    std::string node_id;
    double total_arrival_rate = 0.0; // y from inverting the observed occupancy
    double blocking = 0.0;           // pi_k at y
    double rejection_rate = 0.0;     // y * pi_k
    // y minus the attributed inflow of neighbor rejections (each neighbor's
    // rejection rate split uniformly over its out-edges). May be negative
    // when observed occupancies are not jointly consistent; reported as-is.
    double implied_exo_rate = 0.0;
};

// Decoupled per-node rate estimation: each node's total arrival rate is
// inverted from its own occupancy alone, then endogenous inflow is
// attributed from the neighbors' estimated rejection rates.
// Occupancies must cover every node and lie in [0, 1); callers clamp first.
std::map<std::string, NodeEstimate> estimate_from_occupancy(
    const Topology& topology, const std::map<std::string, double>& occupancy_by_node);

} // namespace parknet
