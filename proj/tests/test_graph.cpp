#include <catch2/catch_amalgamated.hpp>

#include <graphot/graph.hpp>

#include "test_helpers.hpp"

#include <random>

using namespace graphot;
using Catch::Approx;

TEST_CASE("inner products") {
    const MarkovGraph g = make_two_node_graph(1.0, 1.0);
    const NodeVector ones = NodeVector::Ones(2);

    REQUIRE(inner_node(g, ones, ones) == Approx(1.0));

    NodeVector rho(2);
    rho << 0.4, 1.6;  // sum rho pi = 1
    REQUIRE(inner_node(g, ones, rho) == Approx(1.0));

    NodeVector phi(2), psi(2);
    phi << 2.0, 0.0;
    psi << 1.0, 3.0;
    REQUIRE(inner_node(g, phi, psi) == Approx(1.0));

    EdgeVector zero = EdgeVector::Zero(2);
    REQUIRE(inner_edge(g, zero, zero) == 0.0);

    EdgeVector f(2);
    f[g.find_edge(0, 1)] = 1.0;
    f[g.find_edge(1, 0)] = 0.0;
    REQUIRE(inner_edge(g, f, f) == Approx(0.25));

    // antisymmetric against constant: detailed balance cancels the pair
    EdgeVector anti(2), one_e = EdgeVector::Ones(2);
    anti[g.find_edge(0, 1)] = 0.7;
    anti[g.find_edge(1, 0)] = -0.7;
    REQUIRE(inner_edge(g, anti, one_e) == Approx(0.0).margin(1e-15));

    REQUIRE_THROWS_AS(inner_node(g, NodeVector::Ones(3), ones), std::invalid_argument);
    REQUIRE_THROWS_AS(inner_edge(g, EdgeVector::Ones(5), EdgeVector::Ones(5)), std::invalid_argument);
}

TEST_CASE("gradient, divergence, laplacian on the two point graph") {
    const MarkovGraph g = make_two_node_graph(1.0, 1.0);

    NodeVector c = NodeVector::Constant(2, 3.7);
    REQUIRE(gradient(g, c).lpNorm<Eigen::Infinity>() == 0.0);

    NodeVector psi(2);
    psi << 3.0, 1.0;
    const EdgeVector gr = gradient(g, psi);
    REQUIRE(gr[g.find_edge(0, 1)] == Approx(2.0));
    REQUIRE(gr[g.find_edge(1, 0)] == Approx(-2.0));

    REQUIRE(divergence(g, EdgeVector::Zero(2)).lpNorm<Eigen::Infinity>() == 0.0);
    EdgeVector sym = EdgeVector::Constant(2, 0.9);
    REQUIRE(divergence(g, sym).lpNorm<Eigen::Infinity>() == 0.0);

    EdgeVector f(2);
    f[g.find_edge(0, 1)] = 1.0;
    f[g.find_edge(1, 0)] = -1.0;
    const NodeVector div = divergence(g, f);
    REQUIRE(div[0] == Approx(-1.0));
    REQUIRE(div[1] == Approx(1.0));

    REQUIRE(laplacian(g, c).lpNorm<Eigen::Infinity>() == 0.0);
    NodeVector e0(2);
    e0 << 1.0, 0.0;
    const NodeVector lap = laplacian(g, e0);
    REQUIRE(lap[0] == Approx(-1.0));
    REQUIRE(lap[1] == Approx(1.0));
}

TEST_CASE("operator identities on random reversible graphs") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const MarkovGraph g = graphot_test::random_reversible_graph(rng, 2 + trial % 7, trial % 4);
        const NodeVector phi = graphot_test::random_node_vector(rng, g.vertex_count());
        const NodeVector psi = graphot_test::random_node_vector(rng, g.vertex_count());
        const EdgeVector f = graphot_test::random_edge_vector(rng, g);

        // integration by parts
        const double lhs = inner_node(g, phi, divergence(g, f));
        const double rhs = -inner_edge(g, gradient(g, phi), f);
        REQUIRE(lhs == Approx(rhs).margin(1e-12));

        // laplacian = div(grad)
        const NodeVector lap = laplacian(g, psi);
        const NodeVector composed = divergence(g, gradient(g, psi));
        REQUIRE((lap - composed).lpNorm<Eigen::Infinity>() <= 1e-14);

        // flux mass conservation
        REQUIRE(inner_node(g, NodeVector::Ones(g.vertex_count()), divergence(g, f)) ==
                Approx(0.0).margin(1e-12));

        // gradient linearity
        const EdgeVector lin = gradient(g, phi + 2.0 * psi);
        REQUIRE((lin - gradient(g, phi) - 2.0 * gradient(g, psi)).lpNorm<Eigen::Infinity>() <= 1e-13);

        // laplacian of constants vanishes identically
        REQUIRE(laplacian(g, NodeVector::Constant(g.vertex_count(), 1.0)).lpNorm<Eigen::Infinity>() == 0.0);
    }
}

TEST_CASE("uniform edge convention") {
    const MarkovGraph tri = make_uniform_edge_graph(3, {{0, 1}, {1, 2}, {2, 0}});
    REQUIRE(tri.edge_count() == 6);
    for (int x = 0; x < 3; ++x) REQUIRE(tri.pi()[x] == Approx(1.0 / 3.0));
    for (int e = 0; e < 6; ++e) REQUIRE(tri.edge(e).q == Approx(0.5));

    const MarkovGraph pair = make_uniform_edge_graph(2, {{0, 1}});
    REQUIRE(pair.pi()[0] == Approx(0.5));
    REQUIRE(pair.edge(0).q == Approx(1.0));

    const MarkovGraph square = make_uniform_edge_graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
    for (int x = 0; x < 4; ++x) REQUIRE(square.pi()[x] == Approx(0.25));
    for (int e = 0; e < square.edge_count(); ++e) REQUIRE(square.edge(e).q == Approx(0.5));
}

TEST_CASE("two node factory") {
    const MarkovGraph g = make_two_node_graph(1.0, 1.0);
    REQUIRE(g.pi()[0] == Approx(0.5));
    REQUIRE(g.pi()[1] == Approx(0.5));

    const MarkovGraph skew = make_two_node_graph(1.0, 3.0);
    REQUIRE(skew.pi()[0] == Approx(0.75));
    REQUIRE(skew.pi()[1] == Approx(0.25));
    // detailed balance is exact for the factory
    REQUIRE(skew.pi()[0] * skew.edge(skew.find_edge(0, 1)).q ==
            Approx(skew.pi()[1] * skew.edge(skew.find_edge(1, 0)).q).epsilon(1e-15));

    REQUIRE_THROWS_AS(make_two_node_graph(0.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(make_two_node_graph(1.0, -2.0), std::invalid_argument);
}

TEST_CASE("invalid graphs are rejected") {
    NodeVector pi_ok(2);
    pi_ok << 0.5, 0.5;

    // detailed balance violated
    REQUIRE_THROWS_AS(MarkovGraph(2, {{0, 1, 1.0}, {1, 0, 2.0}}, pi_ok), std::invalid_argument);
    // missing reverse edge
    REQUIRE_THROWS_AS(MarkovGraph(2, {{0, 1, 1.0}}, pi_ok), std::invalid_argument);
    // self loop
    REQUIRE_THROWS_AS(MarkovGraph(2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}}, pi_ok),
                      std::invalid_argument);
    // pi not normalized
    NodeVector pi_bad(2);
    pi_bad << 0.4, 0.5;
    REQUIRE_THROWS_AS(MarkovGraph(2, {{0, 1, 1.0}, {1, 0, 1.0}}, pi_bad), std::invalid_argument);
    // nonpositive pi
    NodeVector pi_zero(2);
    pi_zero << 0.0, 1.0;
    REQUIRE_THROWS_AS(MarkovGraph(2, {{0, 1, 1.0}, {1, 0, 1.0}}, pi_zero), std::invalid_argument);
    // disconnected
    NodeVector pi4 = NodeVector::Constant(4, 0.25);
    REQUIRE_THROWS_AS(MarkovGraph(4, {{0, 1, 1.0}, {1, 0, 1.0}, {2, 3, 1.0}, {3, 2, 1.0}}, pi4),
                      std::invalid_argument);
}

TEST_CASE("paired edge index") {
    std::mt19937 rng(7);
    const MarkovGraph g = graphot_test::random_reversible_graph(rng, 6, 3);
    for (int e = 0; e < g.edge_count(); ++e) {
        const int r = g.reverse_edge(e);
        REQUIRE(g.edge(r).from == g.edge(e).to);
        REQUIRE(g.edge(r).to == g.edge(e).from);
        REQUIRE(g.reverse_edge(r) == e);
    }
}
