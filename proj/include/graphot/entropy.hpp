#pragma once

#include "graphot/graph.hpp"
#include "graphot/solver.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace graphot {

/// Entropy functional value. Shannon uses the convention 0 log 0 = 0.
inline double entropy(EntropyKind kind, const NodeVector& rho, const NodeVector& pi) {
    if (rho.size() != pi.size()) throw std::invalid_argument("entropy: dimension mismatch");
    if ((rho.array() < 0.0).any()) throw std::invalid_argument("entropy: negative entries");
    double s = 0.0;
    if (kind.tag == EntropyKind::Tag::Shannon) {
        for (int x = 0; x < rho.size(); ++x)
            if (rho[x] > 0.0) s += rho[x] * std::log(rho[x]) * pi[x];
        return s;
    }
    for (int x = 0; x < rho.size(); ++x) s += std::pow(rho[x], kind.m) * pi[x];
    return s / (kind.m - 1.0);
}

/// Sequence of densities along a flow, with the entropy recorded per state.
struct FlowTrajectory {
    std::vector<double> times;
    std::vector<NodeVector> states;
    std::vector<double> entropy_values;
    bool completed = true;  // false when the flow aborted early

    void push(double t, NodeVector rho, double ent) {
        times.push_back(t);
        states.push_back(std::move(rho));
        entropy_values.push_back(ent);
    }
};

namespace detail {
inline void check_flow_pairing(EntropyKind entropy_kind, MeanKind mean) {
    if (entropy_kind.tag == EntropyKind::Tag::Shannon) {
        if (mean != MeanKind::Logarithmic)
            throw std::invalid_argument(
                "jko_flow: the Shannon entropy flow matches the heat equation only for the "
                "logarithmic mean; use --mean log");
    } else {
        if (entropy_kind.m != 0.5 || mean != MeanKind::Geometric)
            throw std::invalid_argument(
                "jko_flow: the Renyi(1/2) entropy flow matches the porous-medium equation only "
                "for the geometric mean; use --mean geo with m = 1/2");
    }
}
}  // namespace detail

/// Implicit gradient-flow stepping for the entropy in the transportation
/// metric: rho_{k+1} = argmin 1/2 W_h(rho_k, .)^2 + tau H(.). Successive
/// inner problems are warm started from the previous converged state.
inline FlowTrajectory jko_flow(const MarkovGraph& g, const NodeVector& rho0, double tau_jko, int n_steps,
                               TimeGrid grid, const SolverConfig& cfg,
                               EntropyKind entropy_kind = EntropyKind::shannon()) {
    if (!(tau_jko > 0.0)) throw std::invalid_argument("jko_flow: tau must be positive");
    detail::check_flow_pairing(entropy_kind, cfg.mean);
    if (!is_probability_density(g, rho0, 1e-8))
        throw std::invalid_argument("jko_flow: rho0 is not a probability density");

    const CEProjector ce(g, grid, CEProjector::Mode::FreeEndpoint);
    FlowTrajectory traj;
    traj.push(0.0, rho0, entropy(entropy_kind, rho0, g.pi()));

    NodeVector rho_k = rho0;
    PrimalState warm_a = PrimalState::zero(g, grid, true);
    DualState warm_b = PrimalState::zero(g, grid, true);
    bool have_warm = false;
    for (int k = 1; k <= n_steps; ++k) {
        GeodesicSolution sol =
            solve_free_endpoint(g, grid, rho_k, tau_jko, cfg, entropy_kind, &ce,
                                have_warm ? &warm_a : nullptr, have_warm ? &warm_b : nullptr);
        NodeVector next = sol.state.rho_b;
        double low = 0.0;
        for (int x = 0; x < next.size(); ++x) {
            low = std::min(low, next[x]);
            if (next[x] < 0.0) next[x] = 0.0;
        }
        if (!sol.converged || low < -1e-8) {
            traj.completed = false;
            return traj;
        }
        traj.push(k * tau_jko, next, entropy(entropy_kind, next, g.pi()));
        warm_a = std::move(sol.state);
        warm_b = std::move(sol.dual);
        have_warm = true;
        rho_k = std::move(next);
    }
    return traj;
}

namespace detail {
template <typename Rhs>
FlowTrajectory explicit_euler_flow(const MarkovGraph& g, const NodeVector& rho0, double dt, int n_steps,
                                   EntropyKind record_entropy, Rhs&& rhs) {
    if (!(dt > 0.0)) throw std::invalid_argument("euler flow: dt must be positive");
    double max_row = 0.0;
    for (int x = 0; x < g.vertex_count(); ++x) max_row = std::max(max_row, g.row_sum(x));
    if (dt * max_row >= 1.0)
        throw std::invalid_argument("euler flow: dt too large for stability (dt * max rate >= 1)");

    FlowTrajectory traj;
    traj.push(0.0, rho0, entropy(record_entropy, rho0.cwiseMax(0.0), g.pi()));
    NodeVector rho = rho0;
    for (int k = 1; k <= n_steps; ++k) {
        rho += dt * rhs(rho);
        if ((rho.array() < -1e-10).any()) {
            traj.completed = false;
            return traj;
        }
        traj.push(k * dt, rho, entropy(record_entropy, rho.cwiseMax(0.0), g.pi()));
    }
    return traj;
}
}  // namespace detail

/// Reference integrator: explicit Euler for the heat equation
/// d_t rho = Lap rho. Mass sum(rho pi) is conserved by the divergence form.
inline FlowTrajectory euler_heat_flow(const MarkovGraph& g, const NodeVector& rho0, double dt, int n_steps) {
    return detail::explicit_euler_flow(g, rho0, dt, n_steps, EntropyKind::shannon(),
                                       [&](const NodeVector& rho) { return laplacian(g, rho); });
}

/// Reference integrator: explicit Euler for d_t rho = Lap(rho^m)
/// (porous-medium / Fokker-Planck type, m in (0,1)).
inline FlowTrajectory euler_porous_flow(const MarkovGraph& g, const NodeVector& rho0, double dt, int n_steps,
                                        double m) {
    if (!(m > 0.0 && m < 1.0)) throw std::invalid_argument("euler_porous_flow: m must be in (0,1)");
    return detail::explicit_euler_flow(
        g, rho0, dt, n_steps, EntropyKind::renyi(m), [&](const NodeVector& rho) {
            NodeVector powed(rho.size());
            for (int x = 0; x < rho.size(); ++x) powed[x] = std::pow(std::max(rho[x], 0.0), m);
            return laplacian(g, powed);
        });
}

}  // namespace graphot
