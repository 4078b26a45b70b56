#include "parknet/queue.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace parknet {

void QueueSpec::validate() const {
    if (servers < 1)
        throw std::invalid_argument("QueueSpec: servers must be >= 1, got " +
                                    std::to_string(servers));
    if (!std::isfinite(service_rate) || service_rate <= 0.0)
        throw std::invalid_argument("QueueSpec: service_rate must be positive");
    if (!std::isfinite(exo_arrival_rate) || exo_arrival_rate < 0.0)
        throw std::invalid_argument("QueueSpec: exo_arrival_rate must be >= 0");
}

namespace {

void check_rate(double y) {
    if (!std::isfinite(y) || y < 0.0)
        throw std::invalid_argument("total arrival rate must be finite and >= 0");
}

} // namespace

StationaryDistribution stationary_distribution(const QueueSpec& spec,
                                               double total_arrival_rate) {
    spec.validate();
    check_rate(total_arrival_rate);

    const int k = spec.servers;
    const double rho = total_arrival_rate / spec.service_rate;

    StationaryDistribution out;
    out.total_arrival_rate = total_arrival_rate;
    out.utilization = rho;
    out.probs.assign(k + 1, 0.0);

    if (total_arrival_rate == 0.0) {
        out.probs[0] = 1.0;
        return out;
    }

    // Unnormalized terms t_i = rho^i / i! via t_i = t_{i-1} rho / i.
    // Rescale everything when the running term blows up; only ratios matter.
    double term = 1.0;
    double sum = 1.0;
    out.probs[0] = 1.0;
    for (int i = 1; i <= k; ++i) {
        term *= rho / i;
        out.probs[i] = term;
        sum += term;
        if (term > 1e280) {
            for (int j = 0; j <= i; ++j) out.probs[j] /= term;
            sum /= term;
            term = 1.0;
        }
    }
    for (double& p : out.probs) p /= sum;
    return out;
}

double blocking_probability(const QueueSpec& spec, double total_arrival_rate) {
    return stationary_distribution(spec, total_arrival_rate).blocking();
}

double erlang_b(int servers, double offered_load) {
    if (servers < 1)
        throw std::invalid_argument("erlang_b: servers must be >= 1");
    if (!std::isfinite(offered_load) || offered_load < 0.0)
        throw std::invalid_argument("erlang_b: offered load must be >= 0");
    double b = 1.0;
    for (int j = 1; j <= servers; ++j)
        b = offered_load * b / (j + offered_load * b);
    return b;
}

double occupancy(const QueueSpec& spec, double total_arrival_rate) {
    spec.validate();
    check_rate(total_arrival_rate);
    if (total_arrival_rate == 0.0) return 0.0;
    const double pk = blocking_probability(spec, total_arrival_rate);
    return total_arrival_rate / (spec.servers * spec.service_rate) * (1.0 - pk);
}

double rejection_rate(const QueueSpec& spec, double total_arrival_rate) {
    spec.validate();
    check_rate(total_arrival_rate);
    if (total_arrival_rate == 0.0) return 0.0;
    return total_arrival_rate * blocking_probability(spec, total_arrival_rate);
}

} // namespace parknet
