#include <catch2/catch_amalgamated.hpp>

#include <graphot/builtins.hpp>
#include <graphot/oracles.hpp>
#include <graphot/io.hpp>
#include <graphot/solver.hpp>

#include "test_helpers.hpp"

#include <cmath>
#include <cstdio>
#include <random>

using namespace graphot;
using Catch::Approx;

namespace {

PrimalState random_state(std::mt19937& rng, const MarkovGraph& g, TimeGrid grid, bool with_rho_b = false) {
    PrimalState s = PrimalState::zero(g, grid, with_rho_b);
    for (auto& v : s.rho.values) v = graphot_test::random_node_vector(rng, g.vertex_count());
    for (int i = 0; i < grid.n_intervals; ++i) {
        s.m.values[i] = graphot_test::random_edge_vector(rng, g);
        s.vartheta.values[i] = graphot_test::random_edge_vector(rng, g);
        s.theta_minus.values[i] = graphot_test::random_edge_vector(rng, g);
        s.theta_plus.values[i] = graphot_test::random_edge_vector(rng, g);
        s.rho_bar.values[i] = graphot_test::random_node_vector(rng, g.vertex_count());
        s.q.values[i] = graphot_test::random_node_vector(rng, g.vertex_count());
    }
    if (with_rho_b) s.rho_b = graphot_test::random_node_vector(rng, g.vertex_count());
    return s;
}

}  // namespace

TEST_CASE("h inner product") {
    std::mt19937 rng(1);
    const MarkovGraph g = make_two_node_graph(1.0, 1.0);
    const TimeGrid grid(2);

    const PrimalState zero = PrimalState::zero(g, grid, false);
    REQUIRE(h_inner(g, zero, zero) == 0.0);

    // definiteness: <a,a> = 0 iff a = 0
    PrimalState a = random_state(rng, g, grid);
    REQUIRE(h_inner(g, a, a) > 0.0);

    // a state with only rho_bar set reduces to h sum_i <bar, bar>_pi
    PrimalState only_bar = PrimalState::zero(g, grid, false);
    for (int i = 0; i < 2; ++i) only_bar.rho_bar.values[i] = graphot_test::random_node_vector(rng, 2);
    double expect = 0.0;
    for (int i = 0; i < 2; ++i)
        expect += inner_node(g, only_bar.rho_bar.values[i], only_bar.rho_bar.values[i]);
    expect *= grid.h();
    REQUIRE(h_inner(g, only_bar, only_bar) == Approx(expect));

    // dense cross-check on the 2-node N=2 instance: assemble the weighted
    // sum explicitly, component by component
    const PrimalState b = random_state(rng, g, grid);
    double dense = 0.0;
    for (int i = 0; i <= 2; ++i)
        for (int x = 0; x < 2; ++x) dense += a.rho.values[i][x] * b.rho.values[i][x] * g.pi()[x];
    for (int i = 0; i < 2; ++i) {
        for (int x = 0; x < 2; ++x) {
            dense += a.rho_bar.values[i][x] * b.rho_bar.values[i][x] * g.pi()[x];
            dense += a.q.values[i][x] * b.q.values[i][x] * g.pi()[x];
        }
        for (int e = 0; e < 2; ++e) {
            const double w = 0.5 * g.edge(e).q * g.pi()[g.edge(e).from];
            dense += w * (a.m.values[i][e] * b.m.values[i][e] + a.vartheta.values[i][e] * b.vartheta.values[i][e] +
                          a.theta_minus.values[i][e] * b.theta_minus.values[i][e] +
                          a.theta_plus.values[i][e] * b.theta_plus.values[i][e]);
        }
    }
    dense *= grid.h();
    REQUIRE(h_inner(g, a, b) == Approx(dense).epsilon(1e-12));

    REQUIRE_THROWS_AS(h_inner(g, a, PrimalState::zero(g, TimeGrid(3), false)), std::invalid_argument);
}

TEST_CASE("prox decompositions act componentwise") {
    std::mt19937 rng(2);
    const MarkovGraph g = make_two_node_graph(1.0, 1.0);
    const TimeGrid grid(3);
    BoundaryPair bc{graphot_test::random_density(rng, g), graphot_test::random_density(rng, g)};

    DualState v = random_state(rng, g, grid);
    DualState manual = v;
    apply_prox_F_star(g, 0.9, v, bc);

    prox_dual_edge_action(manual.vartheta, manual.m);
    prox_dual_Jpm(g, manual.q, manual.theta_minus, manual.theta_plus);
    prox_dual_Javg(manual.rho, manual.rho_bar, bc, 0.9);
    for (int i = 0; i < 3; ++i) {
        REQUIRE((v.m.values[i] - manual.m.values[i]).lpNorm<Eigen::Infinity>() == 0.0);
        REQUIRE((v.vartheta.values[i] - manual.vartheta.values[i]).lpNorm<Eigen::Infinity>() == 0.0);
        REQUIRE((v.q.values[i] - manual.q.values[i]).lpNorm<Eigen::Infinity>() == 0.0);
        REQUIRE((v.rho_bar.values[i] - manual.rho_bar.values[i]).lpNorm<Eigen::Infinity>() == 0.0);
    }
    for (int i = 0; i <= 3; ++i)
        REQUIRE((v.rho.values[i] - manual.rho.values[i]).lpNorm<Eigen::Infinity>() == 0.0);

    const CEProjector ce(g, grid, CEProjector::Mode::FixedEndpoints);
    PrimalState w = random_state(rng, g, grid);
    PrimalState manual_w = w;
    apply_prox_G(ce, w, bc, MeanKind::Logarithmic);

    const CEProjection pr = ce.project_fixed(manual_w.rho, manual_w.m, bc);
    project_K_field(MeanKind::Logarithmic, manual_w.theta_minus, manual_w.theta_plus, manual_w.vartheta);
    project_Jeq(manual_w.rho_bar, manual_w.q);
    for (int i = 0; i <= 3; ++i)
        REQUIRE((w.rho.values[i] - pr.rho.values[i]).lpNorm<Eigen::Infinity>() == 0.0);
    for (int i = 0; i < 3; ++i) {
        REQUIRE((w.m.values[i] - pr.m.values[i]).lpNorm<Eigen::Infinity>() == 0.0);
        REQUIRE((w.vartheta.values[i] - manual_w.vartheta.values[i]).lpNorm<Eigen::Infinity>() == 0.0);
        REQUIRE((w.rho_bar.values[i] - manual_w.rho_bar.values[i]).lpNorm<Eigen::Infinity>() == 0.0);
    }

    // a primal state inside all three constraint sets is a fixed point
    apply_prox_G(ce, w, bc, MeanKind::Logarithmic);
    PrimalState w2 = w;
    apply_prox_G(ce, w2, bc, MeanKind::Logarithmic);
    for (int i = 0; i <= 3; ++i)
        REQUIRE((w2.rho.values[i] - w.rho.values[i]).lpNorm<Eigen::Infinity>() <= 1e-11);
    for (int i = 0; i < 3; ++i)
        REQUIRE((w2.vartheta.values[i] - w.vartheta.values[i]).lpNorm<Eigen::Infinity>() <= 1e-11);
}

TEST_CASE("config validation") {
    SolverConfig cfg;
    REQUIRE_NOTHROW(cfg.validate());
    cfg.sigma = 2.0;
    cfg.tau = 0.6;  // sigma tau >= 1
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.sigma = 0.5;
    cfg.lambda = 1.5;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("identical boundary data gives zero distance") {
    const MarkovGraph g = make_builtin_graph("triangle");
    const TimeGrid grid(20);
    NodeVector rho(3);
    rho << 1.5, 0.9, 0.6;
    const double mass = inner_node(g, NodeVector::Ones(3), rho);
    rho /= mass;

    SolverConfig cfg;
    cfg.max_iters = 20000;
    const GeodesicSolution sol = solve_geodesic(g, grid, BoundaryPair{rho, rho}, cfg);
    REQUIRE(sol.converged);
    REQUIRE(sol.distance <= 1e-6);
    for (int i = 0; i <= grid.n_intervals; ++i)
        REQUIRE((sol.state.rho.values[i] - rho).lpNorm<Eigen::Infinity>() <= 1e-5);
    REQUIRE(sol.final_ce_residual <= 1e-9);
}

TEST_CASE("two node solve matches the quadrature oracle at moderate N") {
    const MarkovGraph g = make_two_node_graph(1.0, 1.0);
    const TimeGrid grid(50);
    NodeVector ra(2), rb(2);
    ra << 2.0, 0.0;
    rb << 0.0, 2.0;

    SolverConfig cfg;
    cfg.max_iters = 60000;
    const GeodesicSolution sol = solve_geodesic(g, grid, BoundaryPair{ra, rb}, cfg);

    const TwoNodeExact exact{1.0, 1.0, MeanKind::Logarithmic};
    const double ref = two_node_distance(exact, -1.0, 1.0);
    REQUIRE(sol.distance == Approx(ref).epsilon(0.05));
    REQUIRE(sol.final_ce_residual <= 1e-9);

    // mass conservation along the geodesic
    for (int i = 0; i <= grid.n_intervals; ++i)
        REQUIRE(inner_node(g, NodeVector::Ones(2), sol.state.rho.values[i]) == Approx(1.0).margin(1e-8));

    // densities stay essentially nonnegative
    REQUIRE(sol.min_density >= -1e-8);

    // reported momentum is antisymmetric, and the raw optimum was already
    // nearly so
    for (int i = 0; i < grid.n_intervals; ++i)
        REQUIRE(sol.state.m.values[i][0] == Approx(-sol.state.m.values[i][1]).margin(1e-12));
    REQUIRE(sol.momentum_symmetry_gap <= 1e-4);

    // export round trip preserves the action behind the reported distance
    write_geodesic_json(g, sol.state.rho, sol.state.m, "solver_roundtrip.json");
    const auto [rho2, m2] = read_geodesic_json(g, "solver_roundtrip.json");
    const double action = discrete_action(g, rho2, m2, MeanKind::Logarithmic);
    REQUIRE(action == Approx(sol.distance * sol.distance).epsilon(1e-9));
    std::remove("solver_roundtrip.json");

    // the sanity coupling between the two residual notions holds on a
    // converged run
    REQUIRE(sol.converged);
    REQUIRE(sol.final_delta_a_sq <= cfg.tol * 1e3);

    // iteration records were retained with the configured stride
    REQUIRE_FALSE(sol.history.empty());
    REQUIRE(sol.history.front().iteration == cfg.record_stride);
}

TEST_CASE("time reversal gives the same distance") {
    const MarkovGraph g = make_builtin_graph("triangle");
    const TimeGrid grid(40);
    std::mt19937 rng(9);
    const NodeVector a = graphot_test::random_density(rng, g);
    const NodeVector b = graphot_test::random_density(rng, g);

    SolverConfig cfg;
    cfg.max_iters = 40000;
    const GeodesicSolution fwd = solve_geodesic(g, grid, BoundaryPair{a, b}, cfg);
    const GeodesicSolution bwd = solve_geodesic(g, grid, BoundaryPair{b, a}, cfg);
    REQUIRE(fwd.distance == Approx(bwd.distance).margin(1e-4));

    // geodesic itself reverses within a coarser tolerance
    double sup = 0.0;
    for (int i = 0; i <= grid.n_intervals; ++i)
        sup = std::max(sup, (fwd.state.rho.values[i] -
                             bwd.state.rho.values[grid.n_intervals - i]).lpNorm<Eigen::Infinity>());
    REQUIRE(sup <= 1e-3);
}

TEST_CASE("free endpoint solve") {
    const MarkovGraph g = make_builtin_graph("line5");
    const TimeGrid grid(20);

    SECTION("tau = 0 keeps the initial density") {
        const NodeVector rho0 = line5_initial_density();
        SolverConfig cfg;
        cfg.max_iters = 30000;
        const GeodesicSolution sol = solve_free_endpoint(g, grid, rho0, 0.0, cfg);
        REQUIRE(sol.converged);
        REQUIRE(sol.distance <= 1e-5);
        REQUIRE((sol.state.rho_b - rho0).lpNorm<Eigen::Infinity>() <= 1e-4);
    }

    SECTION("uniform density is the entropy minimizer, hence a fixed point") {
        const NodeVector uniform = uniform_density(g);
        SolverConfig cfg;
        cfg.max_iters = 30000;
        const GeodesicSolution sol = solve_free_endpoint(g, grid, uniform, 1e-3, cfg);
        REQUIRE(sol.converged);
        REQUIRE((sol.state.rho_b - uniform).lpNorm<Eigen::Infinity>() <= 1e-4);
    }

    SECTION("one step strictly decreases the entropy") {
        const NodeVector rho0 = line5_initial_density();
        SolverConfig cfg;
        cfg.max_iters = 60000;
        const GeodesicSolution sol = solve_free_endpoint(g, grid, rho0, 1e-3, cfg);
        REQUIRE(sol.converged);
        const NodeVector next = sol.state.rho_b.cwiseMax(0.0);
        double h0 = 0.0, h1 = 0.0;
        for (int x = 0; x < 5; ++x) {
            h0 += rho0[x] * std::log(rho0[x]) * g.pi()[x];
            if (next[x] > 0.0) h1 += next[x] * std::log(next[x]) * g.pi()[x];
        }
        REQUIRE(h1 < h0);
        // mass 1 within tolerance
        REQUIRE(inner_node(g, NodeVector::Ones(5), next) == Approx(1.0).margin(1e-8));
        // moved strictly toward uniform in the sup metric
        REQUIRE((next - uniform_density(g)).lpNorm<Eigen::Infinity>() <
                (rho0 - uniform_density(g)).lpNorm<Eigen::Infinity>());
    }
}

TEST_CASE("boundary data is validated") {
    const MarkovGraph g = make_two_node_graph(1.0, 1.0);
    const TimeGrid grid(4);
    NodeVector bad(2);
    bad << -0.5, 2.5;
    NodeVector ok(2);
    ok << 2.0, 0.0;
    REQUIRE_THROWS_AS(solve_geodesic(g, grid, BoundaryPair{bad, ok}, {}), std::invalid_argument);
    NodeVector wrong_mass(2);
    wrong_mass << 1.0, 0.5;
    REQUIRE_THROWS_AS(solve_geodesic(g, grid, BoundaryPair{ok, wrong_mass}, {}), std::invalid_argument);
}
