#include "parknet/network.hpp"

#include "parknet/solver.hpp"

#include <stdexcept>

namespace parknet {

Topology::Topology(std::vector<std::pair<std::string, QueueSpec>> nodes,
                   std::vector<std::tuple<std::string, std::string, double>> edges) {
    nodes_.reserve(nodes.size());
    for (auto& [id, spec] : nodes) {
        if (id.empty())
            throw std::invalid_argument("Topology: empty node id");
        spec.validate();
        if (index_.count(id))
            throw std::invalid_argument("Topology: duplicate node id '" + id + "'");
        index_[id] = static_cast<int>(nodes_.size());
        nodes_.push_back(Node{std::move(id), spec});
    }
    adjacency_.resize(nodes_.size());
    edges_.reserve(edges.size());
    for (const auto& [from, to, travel] : edges) {
        const int f = index_of(from);
        const int t = index_of(to);
        if (f < 0 || t < 0)
            throw std::invalid_argument("Topology: edge references unknown node '" +
                                        (f < 0 ? from : to) + "'");
        if (f == t)
            throw std::invalid_argument("Topology: self-loop edge at '" + from + "'");
        if (!(travel > 0.0))
            throw std::invalid_argument("Topology: travel_time must be > 0 on edge '" +
                                        from + "' -> '" + to + "'");
        Edge e{f, t, travel};
        edges_.push_back(e);
        adjacency_[f].push_back(e);
    }
}

int Topology::index_of(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? -1 : it->second;
}

namespace {

// nodes reachable from start following edges, forward or reversed
int reach_count(const Topology& t, int start, bool reversed) {
    const int n = static_cast<int>(t.size());
    std::vector<std::vector<int>> adj(n);
    for (const auto& e : t.edges())
        reversed ? adj[e.to].push_back(e.from) : adj[e.from].push_back(e.to);
    std::vector<char> seen(n, 0);
    std::vector<int> stack{start};
    seen[start] = 1;
    int count = 0;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        ++count;
        for (int w : adj[v])
            if (!seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
    }
    return count;
}

} // namespace

bool communicates(const Topology& topology) {
    const int n = static_cast<int>(topology.size());
    if (n <= 1) return true;
    return reach_count(topology, 0, false) == n && reach_count(topology, 0, true) == n;
}

StabilityReport stability_check(const Topology& topology) {
    StabilityReport r;
    r.communicates = communicates(topology);
    for (const auto& node : topology.nodes()) {
        r.total_lambda += node.queue.exo_arrival_rate;
        r.total_mu += node.queue.service_rate;
        r.total_capacity += node.queue.servers * node.queue.service_rate;
    }
    r.stable_per_server_condition = r.total_lambda < r.total_mu;
    r.stable_capacity_condition = r.total_lambda < r.total_capacity;
    return r;
}

std::map<std::string, NodeEstimate> estimate_from_occupancy(
    const Topology& topology, const std::map<std::string, double>& occupancy_by_node) {
    const int n = static_cast<int>(topology.size());
    std::vector<double> occ(n);
    for (int i = 0; i < n; ++i) {
        auto it = occupancy_by_node.find(topology.nodes()[i].id);
        if (it == occupancy_by_node.end())
            throw std::invalid_argument("estimate_from_occupancy: missing occupancy for node '" +
                                        topology.nodes()[i].id + "'");
        occ[i] = it->second;
    }

    std::vector<NodeEstimate> est(n);
    for (int i = 0; i < n; ++i) {
        const auto& node = topology.nodes()[i];
        est[i].node_id = node.id;
        est[i].total_arrival_rate =
            invert_occupancy(node.queue.servers, node.queue.service_rate, occ[i]);
        est[i].blocking = blocking_probability(node.queue, est[i].total_arrival_rate);
        est[i].rejection_rate = est[i].total_arrival_rate * est[i].blocking;
    }

    // endogenous inflow: each neighbor's rejections split uniformly over its
    // out-edges, matching the simulator's uniform destination choice
    std::vector<double> inflow(n, 0.0);
    for (const auto& e : topology.edges())
        inflow[e.to] += est[e.from].rejection_rate / topology.out_degree(e.from);
    for (int i = 0; i < n; ++i)
        est[i].implied_exo_rate = est[i].total_arrival_rate - inflow[i];

    std::map<std::string, NodeEstimate> out;
    for (auto& e : est) out[e.node_id] = std::move(e);
    return out;
}

} // namespace parknet
