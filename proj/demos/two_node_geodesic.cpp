// Smallest end-to-end example: the two point graph, where the distance has
// a closed-form integral. Solves the geodesic, prints the density at the
// second node over time next to the ODE reference.

#include <graphot/graphot.hpp>

#include <cstdio>

int main() {
    using namespace graphot;

    const MarkovGraph g = make_two_node_graph(1.0, 1.0);
    NodeVector rho_a(2), rho_b(2);
    rho_a << 2.0, 0.0;
    rho_b << 0.0, 2.0;

    const int n = 200;
    SolverConfig cfg;
    cfg.max_iters = 60000;
    const GeodesicSolution sol = solve_geodesic(g, TimeGrid(n), {rho_a, rho_b}, cfg);

    const TwoNodeExact exact{1.0, 1.0, MeanKind::Logarithmic};
    const double reference = two_node_distance(exact, -1.0, 1.0);
    const TwoNodeOdeResult ode = two_node_geodesic_ode(exact, -1.0, 1.0, n);

    std::printf("distance (solver)     %.8f\n", sol.distance);
    std::printf("distance (quadrature) %.8f\n", reference);
    std::printf("\n  t      rho_b(solver)  rho_b(ode)\n");
    for (int i = 0; i <= n; i += n / 10) {
        std::printf("%5.2f  %13.6f  %10.6f\n", i / double(n), sol.state.rho.values[i][1],
                    exact.rho(ode.gamma[i]).second);
    }
    return 0;
}
