#include <catch2/catch_amalgamated.hpp>

#include <graphot/oracles.hpp>

#include <cmath>
#include <random>

using namespace graphot;
using Catch::Approx;

TEST_CASE("two node parametrization") {
    const TwoNodeExact e{1.0, 1.0, MeanKind::Logarithmic};
    for (double r : {-1.0, -0.3, 0.0, 0.8, 1.0}) {
        const auto [a, b] = e.rho(r);
        REQUIRE(a >= 0.0);
        REQUIRE(b >= 0.0);
        // unit pi-mass: pi = (1/2, 1/2) for p = q
        REQUIRE(0.5 * a + 0.5 * b == Approx(1.0));
    }
    // p=q=1, log mean: theta(rho(r)) = r / artanh(r)
    for (double r : {0.1, 0.5, 0.9}) {
        REQUIRE(e.theta_at(r) == Approx(r / std::atanh(r)).epsilon(1e-12));
    }
    // near r = 0 the guard takes over; the limit value is 1
    REQUIRE(e.theta_at(1e-13) == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("two node distance quadrature") {
    const TwoNodeExact e{1.0, 1.0, MeanKind::Logarithmic};

    REQUIRE(two_node_distance(e, 0.3, 0.3) == 0.0);

    // integral additivity
    const double full = two_node_distance(e, -1.0, 1.0);
    const double left = two_node_distance(e, -1.0, 0.0);
    const double right = two_node_distance(e, 0.0, 1.0);
    REQUIRE(left + right == Approx(full).margin(1e-8));

    // symmetry of the integrand for p = q
    REQUIRE(left == Approx(right).margin(1e-9));

    // quadrature self-consistency under tolerance refinement
    const double coarse = two_node_distance(e, -1.0, 1.0, 1e-6);
    const double fine = two_node_distance(e, -1.0, 1.0, 1e-12);
    REQUIRE(std::abs(coarse - fine) <= 1e-6);

    // crude independent check: trapezoid on the open interval with the
    // endpoint singularity handled by the substitution r = cos(pi s)
    // (integrable singularity, slow but convergent)
    double trap = 0.0;
    const int n = 200000;
    for (int k = 0; k < n; ++k) {
        const double s = (k + 0.5) / n;
        const double r = std::cos(M_PI * (1.0 - s));
        const double w = M_PI * std::sin(M_PI * (1.0 - s)) / n;
        trap += w / std::sqrt(e.theta_at(r));
    }
    trap *= 0.5 * std::sqrt(2.0);
    REQUIRE(full == Approx(trap).margin(2e-4));

    // geometric mean variant integrates as well and differs from log
    const TwoNodeExact eg{1.0, 1.0, MeanKind::Geometric};
    const double geo = two_node_distance(eg, -1.0, 1.0);
    REQUIRE(geo > 0.0);
    REQUIRE(std::abs(geo - full) > 1e-3);

    REQUIRE_THROWS_AS(two_node_distance(e, -2.0, 0.0), std::invalid_argument);
}

TEST_CASE("two node geodesic ode") {
    const TwoNodeExact e{1.0, 1.0, MeanKind::Logarithmic};

    // constant when alpha = beta
    const auto flat = two_node_geodesic_ode(e, 0.2, 0.2, 100);
    for (double gmm : flat.gamma) REQUIRE(gmm == Approx(0.2));

    // explicit Euler is first order: halving the step roughly halves the
    // terminal error (asymmetric interval, so the leading error term does
    // not cancel by symmetry)
    const auto coarse = two_node_geodesic_ode(e, -0.9, 0.5, 250);
    const auto fine = two_node_geodesic_ode(e, -0.9, 0.5, 500);
    REQUIRE(coarse.terminal_error > 0.0);
    const double ratio = coarse.terminal_error / fine.terminal_error;
    REQUIRE(ratio > 1.5);
    REQUIRE(ratio < 3.0);

    // endpoints traversed monotonically
    const auto full = two_node_geodesic_ode(e, -1.0, 1.0, 2000);
    for (std::size_t k = 1; k < full.gamma.size(); ++k) REQUIRE(full.gamma[k] >= full.gamma[k - 1]);
    REQUIRE(full.gamma.front() == Approx(-1.0).margin(1e-11));
    REQUIRE(full.terminal_error <= 5e-2);

    // constant-speed identity along the trajectory: the distance covered
    // up to time t is t times the total (closes the loop between the ODE
    // and the quadrature, independently of the solver)
    const double total = full.distance;
    for (int k : {500, 1000, 1500}) {
        const double covered = two_node_distance(e, -1.0, full.gamma[k]);
        REQUIRE(covered == Approx(full.times[k] * total).margin(2e-2));
    }
}

TEST_CASE("dense projection oracles are idempotent at oracle resolution") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int k = 0; k < 20; ++k) {
        const double p = unif(rng), q = unif(rng);
        const auto [bp, bq] = oracle_project_B(p, q);
        const auto [bp2, bq2] = oracle_project_B(bp, bq);
        REQUIRE(bp2 == Approx(bp).margin(1e-4));
        REQUIRE(bq2 == Approx(bq).margin(1e-4));

        const std::array<double, 3> pt{unif(rng), unif(rng), unif(rng)};
        const auto kp = oracle_project_K(MeanKind::Logarithmic, pt);
        const auto kp2 = oracle_project_K(MeanKind::Logarithmic, kp);
        for (int i = 0; i < 3; ++i) REQUIRE(kp2[i] == Approx(kp[i]).margin(1e-4));
    }

    // paper clamp case
    REQUIRE(oracle_project_B(-1.0, 0.0) == std::pair(-1.0, 0.0));
    const auto clamp = oracle_project_K(MeanKind::Logarithmic, {1.0, 1.0, -2.0});
    REQUIRE(clamp[0] == Approx(1.0).margin(1e-6));
    REQUIRE(clamp[1] == Approx(1.0).margin(1e-6));
    REQUIRE(clamp[2] == Approx(0.0).margin(1e-6));
}

TEST_CASE("finite difference check") {
    // linear function: no truncation error, only roundoff (which shrinks
    // with a larger step)
    REQUIRE(finite_difference_check([](double x) { return 3.0 * x - 1.0; }, 0.7, 3.0, 1e-3) <= 1e-12);

    // theta partials
    {
        const auto [d1, d2] = theta_partials(MeanKind::Logarithmic, 1.0, 2.0);
        REQUIRE(finite_difference_check(
                    [](double s) { return theta(MeanKind::Logarithmic, s, 2.0); }, 1.0, d1) <= 1e-6);
        REQUIRE(finite_difference_check(
                    [](double t) { return theta(MeanKind::Logarithmic, 1.0, t); }, 2.0, d2) <= 1e-6);
    }
    {
        const auto [d1, d2] = theta_partials(MeanKind::Geometric, 4.0, 9.0);
        REQUIRE(finite_difference_check([](double s) { return theta(MeanKind::Geometric, s, 9.0); }, 4.0,
                                        d1) <= 1e-8);
        REQUIRE(finite_difference_check([](double t) { return theta(MeanKind::Geometric, 4.0, t); }, 9.0,
                                        d2) <= 1e-8);
    }
}
