#pragma once

#include "parknet/queue.hpp"

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

namespace parknet {

// Uniform network: every queue identical, topology a degree-regular digraph.
// By symmetry one representative queue describes the whole network.
struct SymmetricNetworkSpec {
    int degree = 1;
    QueueSpec queue;

    // Requires degree >= 1 and the stability condition lambda < k * mu.
    void validate() const;
};

struct SymmetricSolution {
    double total_arrival_rate = 0.0;    // y = lambda + degree * x
    double per_neighbor_rejection = 0.0; // x
    double blocking = 0.0;               // pi_k at y
    double occupancy = 0.0;
};

// Solves the conservation fixed point d*x = y*pi_k(y), y = lambda + d*x,
// by bisection on g(y) = y - lambda - y*pi_k(y). g(lambda) < 0 and the
// upper bracket is found by doubling, so the unique root is always caught.
SymmetricSolution solve_symmetric(const SymmetricNetworkSpec& spec,
                                  double tolerance = 1e-9);

// Unique total arrival rate y with occupancy(k, mu, y) == u, u in [0, 1).
// Bisection on the monotone occupancy map; u >= 1 is rejected (occupancy 1
// requires an infinite arrival rate).
double invert_occupancy(int servers, double service_rate, double occupancy,
                        double tolerance = 1e-12);

// Completely connected pair of single-server queues with edge travel time d.
struct TwoNodeSpec {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double mu1 = 1.0;
    double mu2 = 1.0;
    double travel_time = 1.0;

    // Requires positive rates, travel_time > 0, lambda1 + lambda2 < mu1 + mu2.
    void validate() const;
};

// States of the Markovian relaxation, in order:
// [both idle, queue 1 busy, queue 2 busy, both busy].
struct TwoNodeSolution {
    std::array<double, 4> pi{};
    double x12 = 0.0; // rejection flow queue 1 -> queue 2
    double x21 = 0.0; // rejection flow queue 2 -> queue 1
    double p_full_1 = 0.0;
    double p_full_2 = 0.0;
    double sojourn_1 = 0.0; // expected search time entering at queue 1
    double sojourn_2 = 0.0;
    double mean_sojourn = 0.0;
    int iterations = 0;
};

// Thrown when the rejection-flow iteration fails to settle; carries the
// last iterate for inspection.
struct FixedPointError : std::runtime_error {
    FixedPointError(const std::string& what, TwoNodeSolution last_iterate)
        : std::runtime_error(what), last(last_iterate) {}
    TwoNodeSolution last;
};

// Fixed-point iteration over the rejection flows: build the 4-state rate
// matrix with arrival streams (lambda1 + x21) and (lambda2 + x12), solve the
// stationary distribution, update x12 <- (lambda1 + x21) * P(queue 1 busy)
// and symmetrically, until both flows move less than tolerance. Oscillating
// updates are damped by step halving.
TwoNodeSolution solve_two_node(const TwoNodeSpec& spec, double tolerance = 1e-9,
                               int max_iterations = 10000);

// Sign changes in the nonzero coefficient sequence: Descartes' upper bound
// on positive real roots. Coefficients are in ascending-power order (any
// consistent order works; sign changes are what count).
int descartes_positive_roots(std::span<const double> coefficients);

// Coefficients (ascending powers of y) of the polynomial whose unique
// positive root is the arrival rate attaining the given occupancy:
// sum_i mu^(1-i) (i - u k) / i! * y^i.
std::vector<double> occupancy_rate_polynomial(int servers, double service_rate,
                                              double occupancy);

// Coefficients (ascending powers of y) of the cleared form of the symmetric
// conservation equation; the unique positive root is the symmetric y.
std::vector<double> symmetric_rate_polynomial(int servers, double service_rate,
                                              double exo_rate);

} // namespace parknet
