#pragma once

#include <vector>

namespace parknet {

// One finite-capacity multi-server loss queue: k servers (parking spaces),
// per-server service rate mu, exogenous arrival rate lambda. Arrivals that
// find all servers busy are rejected, never buffered.
struct QueueSpec {
    int servers = 1;
    double service_rate = 1.0;
    double exo_arrival_rate = 0.0;

    // Throws std::invalid_argument on servers < 1, service_rate <= 0,
    // exo_arrival_rate < 0, or non-finite values.
    void validate() const;
};

// Stationary distribution of busy-server counts, probs[i] = P(i servers busy).
struct StationaryDistribution {
    std::vector<double> probs;       // size servers + 1
    double total_arrival_rate = 0.0; // y, the offered rate (exogenous + endogenous)
    double utilization = 0.0;        // rho = y / mu

    double blocking() const { return probs.back(); }
};

// Birth-death stationary solution pi_i = pi_0 rho^i / i!, computed by term
// recurrence with a scale guard so it stays finite well past k = 50.
// total_arrival_rate = 0 yields the degenerate distribution pi_0 = 1.
StationaryDistribution stationary_distribution(const QueueSpec& spec,
                                               double total_arrival_rate);

// P(all servers busy) at offered rate y; equals the Erlang-B value.
double blocking_probability(const QueueSpec& spec, double total_arrival_rate);

// Erlang-B via the standard recurrence B_j = rho B_{j-1} / (j + rho B_{j-1}).
// Kept as an independent route to the same number as blocking_probability.
double erlang_b(int servers, double offered_load);

// Time-averaged fraction of busy servers, u = (y / (k mu)) (1 - pi_k).
// Strictly increasing in y, strictly below 1 for finite y.
double occupancy(const QueueSpec& spec, double total_arrival_rate);

// Rate at which arrivals are turned away: y * pi_k.
double rejection_rate(const QueueSpec& spec, double total_arrival_rate);

} // namespace parknet
