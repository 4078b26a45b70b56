#include "parknet/solver.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace parknet;

TEST_CASE("symmetric fixed point, single server closed form") {
    // k=1: y = lambda*mu/(mu - lambda)
    SymmetricNetworkSpec spec{1, QueueSpec{1, 2.0, 1.0}};
    const auto sol = solve_symmetric(spec, 1e-12);
    CHECK(sol.total_arrival_rate == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(sol.per_neighbor_rejection == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("symmetric fixed point, empty network") {
    SymmetricNetworkSpec spec{3, QueueSpec{2, 1.0, 0.0}};
    const auto sol = solve_symmetric(spec);
    CHECK(sol.total_arrival_rate == 0.0);
    CHECK(sol.per_neighbor_rejection == 0.0);
}

TEST_CASE("symmetric fixed point satisfies both conservation identities") {
    SymmetricNetworkSpec spec{9, QueueSpec{5, 0.2, 0.5}};
    const auto sol = solve_symmetric(spec);
    const double y = sol.total_arrival_rate;
    const double x = sol.per_neighbor_rejection;
    CHECK(std::abs(9.0 * x - y * sol.blocking) < 1e-9);
    CHECK(std::abs(y - (0.5 + 9.0 * x)) < 1e-9);
    CHECK(y > 0.5);
}

TEST_CASE("symmetric fixed point rejects unstable input") {
    CHECK_THROWS_AS(solve_symmetric(SymmetricNetworkSpec{2, QueueSpec{1, 1.0, 1.0}}),
                    std::domain_error);
    CHECK_THROWS_AS(solve_symmetric(SymmetricNetworkSpec{2, QueueSpec{2, 0.5, 1.5}}),
                    std::domain_error);
}

TEST_CASE("symmetric solution exceeds the exogenous rate") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 1 + static_cast<int>(u01(rng) * 20);
        const double mu = 0.05 + 5.0 * u01(rng);
        const double lambda = (0.05 + 0.9 * u01(rng)) * k * mu;
        const int degree = 1 + static_cast<int>(u01(rng) * 8);
        const auto sol = solve_symmetric(SymmetricNetworkSpec{degree, QueueSpec{k, mu, lambda}});
        CHECK(sol.total_arrival_rate > lambda);
        CHECK(sol.per_neighbor_rejection > 0.0);
        CHECK(std::abs(degree * sol.per_neighbor_rejection -
                       sol.total_arrival_rate * sol.blocking) < 1e-9);
    }
}

TEST_CASE("occupancy inversion closed form and trivial cases") {
    CHECK(invert_occupancy(3, 0.7, 0.0) == 0.0);
    // k=1: y = mu*u/(1-u)
    CHECK(invert_occupancy(1, 1.0, 0.5) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(invert_occupancy(1, 2.0, 0.25) == doctest::Approx(2.0 * 0.25 / 0.75).epsilon(1e-9));
}

TEST_CASE("occupancy inversion round trip and brute-force agreement") {
    const double y = invert_occupancy(3, 0.5, 0.8, 1e-12);
    CHECK(std::abs(occupancy(QueueSpec{3, 0.5, 0.0}, y) - 0.8) < 1e-9);

    const double brute = oracle::grid_search_rate(
        [](double v) { return occupancy(QueueSpec{3, 0.5, 0.0}, v); }, 0.8, 1.0, 1e-9);
    CHECK(y == doctest::Approx(brute).epsilon(1e-6));
}

TEST_CASE("occupancy inversion rejects out-of-range targets") {
    CHECK_THROWS_AS(invert_occupancy(2, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(invert_occupancy(2, 1.0, 1.3), std::domain_error);
    CHECK_THROWS_AS(invert_occupancy(2, 1.0, -0.1), std::invalid_argument);
}

TEST_CASE("occupancy inversion round trip across random instances") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int k = 1 + static_cast<int>(u01(rng) * 20);
        const double mu = 0.05 + 4.95 * u01(rng);
        const double u = 0.99 * u01(rng);
        const double y = invert_occupancy(k, mu, u);
        CHECK(std::abs(occupancy(QueueSpec{k, mu, 0.0}, y) - u) < 1e-8);
    }
}

TEST_CASE("descartes sign-change counting") {
    CHECK(descartes_positive_roots(std::vector<double>{-1.0, 1.0}) == 1);
    CHECK(descartes_positive_roots(std::vector<double>{1.0, 2.0, 3.0}) == 0);
    CHECK(descartes_positive_roots(std::vector<double>{1.0, 0.0, -2.0, 0.0, 1.0}) == 2);
    CHECK_THROWS_AS(descartes_positive_roots(std::vector<double>{0.0, 0.0}),
                    std::invalid_argument);

    const auto coeff = occupancy_rate_polynomial(4, 1.0, 0.7);
    CHECK(descartes_positive_roots(coeff) == 1);
}

TEST_CASE("uniqueness sweep over both polynomial families") {
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int k = 1 + static_cast<int>(u01(rng) * 20);
        const double mu = 0.05 + 4.95 * u01(rng);
        const double u = 0.01 + 0.98 * u01(rng);
        CHECK(descartes_positive_roots(occupancy_rate_polynomial(k, mu, u)) == 1);
        const double lambda = (0.01 + 0.98 * u01(rng)) * k * mu;
        CHECK(descartes_positive_roots(symmetric_rate_polynomial(k, mu, lambda)) == 1);
    }
}

TEST_CASE("occupancy polynomial root matches the bisection inversion") {
    // the coefficient vector and the monotone map are two routes to one root
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int k = 1 + static_cast<int>(u01(rng) * 8);
        const double mu = 0.2 + 2.0 * u01(rng);
        const double u = 0.05 + 0.85 * u01(rng);
        const double y = invert_occupancy(k, mu, u);
        const auto c = occupancy_rate_polynomial(k, mu, u);
        double value = 0.0, pw = 1.0;
        for (double ci : c) {
            value += ci * pw;
            pw *= y;
        }
        // scale by the leading term's magnitude for a meaningful residual
        double scale = 0.0;
        pw = 1.0;
        for (double ci : c) {
            scale = std::max(scale, std::abs(ci) * pw);
            pw *= y;
        }
        CHECK(std::abs(value) <= 1e-7 * scale);
    }
}

TEST_CASE("two-node symmetric closed form across service rates") {
    for (double mu : {1.5, 2.0, 3.0, 10.0}) {
        TwoNodeSpec spec{1.0, 1.0, mu, mu, 1.0};
        const auto sol = solve_two_node(spec, 1e-12, 20000);
        const double m2 = mu * mu;
        CHECK(std::abs(sol.pi[0] - (mu - 1.0) * (mu - 1.0) / m2) < 1e-8);
        CHECK(std::abs(sol.pi[1] - (mu - 1.0) / m2) < 1e-8);
        CHECK(std::abs(sol.pi[2] - (mu - 1.0) / m2) < 1e-8);
        CHECK(std::abs(sol.pi[3] - 1.0 / m2) < 1e-8);
        CHECK(std::abs(sol.x12 - 1.0 / (mu - 1.0)) < 1e-8);
        CHECK(std::abs(sol.x21 - 1.0 / (mu - 1.0)) < 1e-8);
        CHECK(sol.p_full_1 == doctest::Approx(1.0 / mu).epsilon(1e-8));
    }
}

TEST_CASE("two-node sojourn formula reduces to d/(mu-1) in the symmetric case") {
    TwoNodeSpec spec{1.0, 1.0, 2.0, 2.0, 0.1};
    const auto sol = solve_two_node(spec);
    CHECK(sol.mean_sojourn == doctest::Approx(0.1 / (2.0 - 1.0)).epsilon(1e-8));
    CHECK(sol.sojourn_1 == doctest::Approx(sol.sojourn_2).epsilon(1e-10));
}

TEST_CASE("two-node empty network") {
    TwoNodeSpec spec{0.0, 0.0, 1.0, 1.0, 0.5};
    const auto sol = solve_two_node(spec);
    CHECK(sol.pi[0] == doctest::Approx(1.0));
    CHECK(sol.pi[3] == doctest::Approx(0.0));
    CHECK(sol.x12 == 0.0);
    CHECK(sol.x21 == 0.0);
    CHECK(sol.mean_sojourn == 0.0);
}

TEST_CASE("two-node asymmetric fixed point satisfies its residuals") {
    TwoNodeSpec spec{1.0, 0.5, 2.0, 3.0, 0.2};
    const auto sol = solve_two_node(spec, 1e-12, 20000);
    CHECK(std::abs(sol.x12 - (spec.lambda1 + sol.x21) * sol.p_full_1) < 1e-9);
    CHECK(std::abs(sol.x21 - (spec.lambda2 + sol.x12) * sol.p_full_2) < 1e-9);
    double sum = 0.0;
    for (double p : sol.pi) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("two-node iteration reports non-convergence with its last iterate") {
    TwoNodeSpec spec{1.0, 1.0, 1.5, 1.5, 1.0};
    CHECK_THROWS_AS(solve_two_node(spec, 1e-14, 2), FixedPointError);
    try {
        solve_two_node(spec, 1e-14, 2);
    } catch (const FixedPointError& e) {
        CHECK(e.last.iterations == 2);
        CHECK(e.last.x12 >= 0.0);
    }
}

TEST_CASE("two-node validation") {
    CHECK_THROWS_AS(solve_two_node(TwoNodeSpec{2.0, 2.0, 1.0, 1.0, 1.0}),
                    std::domain_error);
    CHECK_THROWS_AS(solve_two_node(TwoNodeSpec{1.0, 1.0, 2.0, 2.0, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(solve_two_node(TwoNodeSpec{-1.0, 1.0, 2.0, 2.0, 1.0}),
                    std::invalid_argument);
}
