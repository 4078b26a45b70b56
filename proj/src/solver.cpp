#include "parknet/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace parknet {

void SymmetricNetworkSpec::validate() const {
    if (degree < 1)
        throw std::invalid_argument("SymmetricNetworkSpec: degree must be >= 1");
    queue.validate();
    if (queue.exo_arrival_rate >= queue.servers * queue.service_rate)
        throw std::domain_error(
            "SymmetricNetworkSpec: unstable, requires exo_arrival_rate < servers * service_rate");
}

void TwoNodeSpec::validate() const {
    if (!std::isfinite(lambda1) || lambda1 < 0.0 || !std::isfinite(lambda2) || lambda2 < 0.0)
        throw std::invalid_argument("TwoNodeSpec: arrival rates must be >= 0");
    if (!std::isfinite(mu1) || mu1 <= 0.0 || !std::isfinite(mu2) || mu2 <= 0.0)
        throw std::invalid_argument("TwoNodeSpec: service rates must be positive");
    if (!std::isfinite(travel_time) || travel_time <= 0.0)
        throw std::invalid_argument("TwoNodeSpec: travel_time must be positive");
    if (lambda1 + lambda2 >= mu1 + mu2)
        throw std::domain_error("TwoNodeSpec: unstable, requires lambda1 + lambda2 < mu1 + mu2");
}

SymmetricSolution solve_symmetric(const SymmetricNetworkSpec& spec, double tolerance) {
    spec.validate();
    if (!std::isfinite(tolerance) || tolerance <= 0.0)
        throw std::invalid_argument("solve_symmetric: tolerance must be positive");

    const QueueSpec& q = spec.queue;
    const double lambda = q.exo_arrival_rate;

    SymmetricSolution sol;
    if (lambda == 0.0) return sol; // empty network, y = x = 0

    auto residual = [&](double y) {
        return y - lambda - y * blocking_probability(q, y);
    };

    // g(lambda) = -lambda*pi_k < 0; g tends to k*mu - lambda > 0 as y grows.
    double lo = lambda;
    double hi = std::max(lambda * 2.0, q.servers * q.service_rate);
    while (residual(hi) <= 0.0) {
        hi *= 2.0;
        if (hi > 1e300)
            throw std::runtime_error("solve_symmetric: failed to bracket root");
    }

    double y = 0.5 * (lo + hi);
    for (int it = 0; it < 2000; ++it) {
        y = 0.5 * (lo + hi);
        const double g = residual(y);
        if (std::abs(g) <= tolerance) break;
        (g < 0.0 ? lo : hi) = y;
    }

    sol.total_arrival_rate = y;
    sol.per_neighbor_rejection = (y - lambda) / spec.degree;
    sol.blocking = blocking_probability(q, y);
    sol.occupancy = occupancy(q, y);
    return sol;
}

double invert_occupancy(int servers, double service_rate, double target,
                        double tolerance) {
    QueueSpec q{servers, service_rate, 0.0};
    q.validate();
    if (!std::isfinite(target) || target < 0.0)
        throw std::invalid_argument("invert_occupancy: occupancy must be >= 0");
    if (target >= 1.0)
        throw std::domain_error(
            "invert_occupancy: occupancy >= 1 is unattainable at any finite rate");
    if (!std::isfinite(tolerance) || tolerance <= 0.0)
        throw std::invalid_argument("invert_occupancy: tolerance must be positive");
    if (target == 0.0) return 0.0;

    double lo = 0.0;
    double hi = std::max(1.0, servers * service_rate);
    while (occupancy(q, hi) <= target) {
        hi *= 2.0;
        if (hi > 1e300)
            throw std::runtime_error("invert_occupancy: failed to bracket root");
    }

    double y = 0.5 * hi;
    for (int it = 0; it < 2000; ++it) {
        y = 0.5 * (lo + hi);
        const double r = occupancy(q, y) - target;
        if (std::abs(r) <= tolerance) break;
        (r < 0.0 ? lo : hi) = y;
    }
    return y;
}

namespace {

// Stationary vector of a small rate matrix: solve Q^T pi = 0 with the last
// equation replaced by sum(pi) = 1. Gaussian elimination, partial pivoting.
std::array<double, 4> stationary_4state(const std::array<std::array<double, 4>, 4>& rate) {
    constexpr int n = 4;
    double a[n][n + 1] = {};
    for (int i = 0; i < n - 1; ++i) {
        for (int j = 0; j < n; ++j) a[i][j] = rate[j][i]; // Q^T
        a[i][n] = 0.0;
    }
    for (int j = 0; j < n; ++j) a[n - 1][j] = 1.0;
    a[n - 1][n] = 1.0;

    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-300)
            throw std::runtime_error("singular rate matrix in two-node solve");
        if (pivot != col)
            for (int j = 0; j <= n; ++j) std::swap(a[pivot][j], a[col][j]);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (int j = col; j <= n; ++j) a[r][j] -= f * a[col][j];
        }
    }
    std::array<double, 4> pi;
    for (int i = 0; i < n; ++i) pi[i] = a[i][n] / a[i][i];
    return pi;
}

} // namespace

TwoNodeSolution solve_two_node(const TwoNodeSpec& spec, double tolerance,
                               int max_iterations) {
    spec.validate();
    if (!std::isfinite(tolerance) || tolerance <= 0.0)
        throw std::invalid_argument("solve_two_node: tolerance must be positive");
    if (max_iterations < 1)
        throw std::invalid_argument("solve_two_node: max_iterations must be >= 1");

    TwoNodeSolution sol;

    auto refresh = [&](double x12, double x21) {
        const double a1 = spec.lambda1 + x21; // stream offered to queue 1
        const double a2 = spec.lambda2 + x12; // stream offered to queue 2
        std::array<std::array<double, 4>, 4> q{};
        q[0][1] = a1;
        q[0][2] = a2;
        q[0][0] = -(a1 + a2);
        q[1][0] = spec.mu1;
        q[1][3] = a2;
        q[1][1] = -(spec.mu1 + a2);
        q[2][0] = spec.mu2;
        q[2][3] = a1;
        q[2][2] = -(spec.mu2 + a1);
        q[3][1] = spec.mu2;
        q[3][2] = spec.mu1;
        q[3][3] = -(spec.mu1 + spec.mu2);
        sol.pi = stationary_4state(q);
        sol.p_full_1 = sol.pi[1] + sol.pi[3];
        sol.p_full_2 = sol.pi[2] + sol.pi[3];
    };

    double x12 = 0.0, x21 = 0.0;
    double step = 1.0;
    double prev_d12 = 0.0, prev_d21 = 0.0;
    bool converged = false;

    for (int it = 1; it <= max_iterations; ++it) {
        sol.iterations = it;
        refresh(x12, x21);
        const double n12 = (spec.lambda1 + x21) * sol.p_full_1;
        const double n21 = (spec.lambda2 + x12) * sol.p_full_2;
        const double d12 = n12 - x12;
        const double d21 = n21 - x21;
        if (std::abs(d12) < tolerance && std::abs(d21) < tolerance) {
            x12 = n12;
            x21 = n21;
            converged = true;
            break;
        }
        // halve the step when updates start alternating in sign
        if (d12 * prev_d12 < 0.0 || d21 * prev_d21 < 0.0)
            step = std::max(step * 0.5, 1.0 / 1024.0);
        prev_d12 = d12;
        prev_d21 = d21;
        x12 += step * d12;
        x21 += step * d21;
    }

    refresh(x12, x21);
    sol.x12 = x12;
    sol.x21 = x21;

    const double p1 = sol.p_full_1, p2 = sol.p_full_2;
    const double denom = 1.0 - p1 * p2;
    if (denom <= 0.0)
        throw FixedPointError("solve_two_node: degenerate sojourn denominator", sol);
    const double d = spec.travel_time;
    sol.sojourn_1 = p1 * (1.0 + p2) * d / denom;
    sol.sojourn_2 = p2 * (1.0 + p1) * d / denom;
    sol.mean_sojourn = 0.5 * (sol.sojourn_1 + sol.sojourn_2);

    if (!converged)
        throw FixedPointError("solve_two_node: no convergence after " +
                                  std::to_string(max_iterations) + " iterations",
                              sol);
    return sol;
}

int descartes_positive_roots(std::span<const double> coefficients) {
    int changes = 0;
    int prev_sign = 0;
    bool any_nonzero = false;
    for (double c : coefficients) {
        if (c == 0.0) continue;
        any_nonzero = true;
        const int sign = c > 0.0 ? 1 : -1;
        if (prev_sign != 0 && sign != prev_sign) ++changes;
        prev_sign = sign;
    }
    if (!any_nonzero)
        throw std::invalid_argument("descartes_positive_roots: all coefficients are zero");
    return changes;
}

std::vector<double> occupancy_rate_polynomial(int servers, double service_rate,
                                              double occupancy) {
    QueueSpec q{servers, service_rate, 0.0};
    q.validate();
    if (!std::isfinite(occupancy) || occupancy < 0.0 || occupancy >= 1.0)
        throw std::invalid_argument("occupancy_rate_polynomial: occupancy must be in [0, 1)");
    std::vector<double> coeff(servers + 1);
    double factor = service_rate; // mu^(1-i) / i! at i = 0
    for (int i = 0; i <= servers; ++i) {
        if (i > 0) factor /= service_rate * i;
        coeff[i] = factor * (i - occupancy * servers);
    }
    return coeff;
}

std::vector<double> symmetric_rate_polynomial(int servers, double service_rate,
                                              double exo_rate) {
    QueueSpec q{servers, service_rate, exo_rate};
    q.validate();
    std::vector<double> coeff(servers + 1);
    coeff[0] = -exo_rate;
    double factor = 1.0; // 1 / (mu^j j!)
    for (int j = 1; j <= servers; ++j) {
        factor /= service_rate * j;
        coeff[j] = factor * (j * service_rate - exo_rate);
    }
    return coeff;
}

} // namespace parknet
