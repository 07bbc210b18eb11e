#pragma once

#include "graphot/graph.hpp"
#include "graphot/means.hpp"
#include "graphot/prox.hpp"
#include "graphot/time_grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace graphot {

/// The 7-tuple (rho, m, vartheta, theta-, theta+, rho_bar, q) driving the
/// splitting iteration, plus the free endpoint slot in JKO mode.
struct PrimalState {
    DensityPath rho;
    IntervalEdgeField m;
    IntervalEdgeField vartheta;
    IntervalEdgeField theta_minus;
    IntervalEdgeField theta_plus;
    IntervalNodeField rho_bar;
    IntervalNodeField q;
    NodeVector rho_b;  // used only when has_rho_b
    bool has_rho_b = false;

    static PrimalState zero(const MarkovGraph& g, TimeGrid grid, bool with_rho_b) {
        PrimalState s{DensityPath::zero(grid, g.vertex_count()),
                      IntervalEdgeField::zero(grid, g.edge_count()),
                      IntervalEdgeField::zero(grid, g.edge_count()),
                      IntervalEdgeField::zero(grid, g.edge_count()),
                      IntervalEdgeField::zero(grid, g.edge_count()),
                      IntervalNodeField::zero(grid, g.vertex_count()),
                      IntervalNodeField::zero(grid, g.vertex_count()),
                      NodeVector(),
                      with_rho_b};
        if (with_rho_b) s.rho_b = NodeVector::Zero(g.vertex_count());
        return s;
    }
};

/// Dual iterate; same shapes as the primal state.
using DualState = PrimalState;

namespace detail {
/// out = c1 * s1 + c2 * s2, componentwise over all state slots.
inline void state_lincomb(PrimalState& out, double c1, const PrimalState& s1, double c2,
                          const PrimalState& s2) {
    const int n = s1.rho.grid.n_intervals;
    for (int i = 0; i <= n; ++i) out.rho.values[i] = c1 * s1.rho.values[i] + c2 * s2.rho.values[i];
    for (int i = 0; i < n; ++i) {
        out.m.values[i] = c1 * s1.m.values[i] + c2 * s2.m.values[i];
        out.vartheta.values[i] = c1 * s1.vartheta.values[i] + c2 * s2.vartheta.values[i];
        out.theta_minus.values[i] = c1 * s1.theta_minus.values[i] + c2 * s2.theta_minus.values[i];
        out.theta_plus.values[i] = c1 * s1.theta_plus.values[i] + c2 * s2.theta_plus.values[i];
        out.rho_bar.values[i] = c1 * s1.rho_bar.values[i] + c2 * s2.rho_bar.values[i];
        out.q.values[i] = c1 * s1.q.values[i] + c2 * s2.q.values[i];
    }
    if (s1.has_rho_b) out.rho_b = c1 * s1.rho_b + c2 * s2.rho_b;
}
}  // namespace detail

/// The scalar product on H = V1_n x (V0_e)^4 x (V0_n)^2 (x R^X in JKO mode):
/// nodal rho terms and interval terms, all scaled by h.
inline double h_inner(const MarkovGraph& g, const PrimalState& a, const PrimalState& b) {
    if (a.rho.grid.n_intervals != b.rho.grid.n_intervals || a.has_rho_b != b.has_rho_b)
        throw std::invalid_argument("h_inner: state shapes disagree");
    const int n = a.rho.grid.n_intervals;
    const double h = a.rho.grid.h();
    double s = 0.0;
    for (int i = 0; i <= n; ++i) s += inner_node(g, a.rho.values[i], b.rho.values[i]);
    for (int i = 0; i < n; ++i) {
        s += inner_node(g, a.rho_bar.values[i], b.rho_bar.values[i]);
        s += inner_node(g, a.q.values[i], b.q.values[i]);
        s += inner_edge(g, a.m.values[i], b.m.values[i]);
        s += inner_edge(g, a.vartheta.values[i], b.vartheta.values[i]);
        s += inner_edge(g, a.theta_minus.values[i], b.theta_minus.values[i]);
        s += inner_edge(g, a.theta_plus.values[i], b.theta_plus.values[i]);
    }
    if (a.has_rho_b) s += inner_node(g, a.rho_b, b.rho_b);
    return h * s;
}

inline double h_norm(const MarkovGraph& g, const PrimalState& a) { return std::sqrt(h_inner(g, a, a)); }

/// Iteration parameters. Convergence requires sigma * tau < 1 (the coupling
/// operator between the two blocks is the identity embedding).
struct SolverConfig {
    double sigma = 0.9;
    double tau = 0.9;
    double lambda = 1.0;
    long max_iters = 500000;
    double tol = 1e-10;  // threshold on h sum_i ||rho^{k+1}(t_i) - rho^k(t_i)||_pi^2
    MeanKind mean = MeanKind::Logarithmic;
    int check_every = 10;
    int record_stride = 100;
    int threads = 1;

    void validate() const {
        if (!(sigma > 0.0) || !(tau > 0.0) || !(sigma * tau < 1.0))
            throw std::invalid_argument("SolverConfig: need sigma, tau > 0 with sigma*tau < 1");
        if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("SolverConfig: lambda must be in [0,1]");
        if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be positive");
    }
};

struct IterationRecord {
    long iteration = 0;
    double stopping_value = 0.0;  // h sum ||delta rho||_pi^2
    double delta_a_sq = 0.0;      // ||a^{l+1} - a^l||_H^2
    double ce_residual = 0.0;
};

struct GeodesicSolution {
    PrimalState state;  // CE-projected, momentum antisymmetrized
    DualState dual;     // final dual iterate (warm starts)
    double distance = 0.0;
    long iterations = 0;
    bool converged = false;
    double final_stopping = std::numeric_limits<double>::infinity();
    double final_delta_a_sq = std::numeric_limits<double>::infinity();
    double final_ce_residual = 0.0;
    double min_density = 0.0;          // most negative raw density along the path
    double dead_edge_momentum = 0.0;   // largest |m| where the reporting clamp zeroed theta
    double momentum_symmetry_gap = 0.0;  // H-norm of the symmetric part of the raw momentum
    std::vector<IterationRecord> history;
};

namespace detail {

struct ProblemSpec {
    bool free_endpoint = false;
    BoundaryPair bc;          // rho_b ignored in free mode
    double tau_jko = 0.0;     // free mode: entropy step weight
    EntropyKind entropy = EntropyKind::shannon();
};

inline void check_boundary_density(const MarkovGraph& g, const NodeVector& rho, const char* name) {
    if (rho.size() != g.vertex_count())
        throw std::invalid_argument(std::string(name) + ": wrong dimension");
    if ((rho.array() < -1e-12).any())
        throw std::invalid_argument(std::string(name) + ": negative entries");
    const double mass = inner_node(g, NodeVector::Ones(g.vertex_count()), rho.cwiseMax(0.0));
    if (std::abs(mass - 1.0) > 1e-6)
        throw std::invalid_argument(std::string(name) + ": pi-mass differs from 1 by " +
                                    std::to_string(mass - 1.0));
}

/// Feasible-leaning start: rho linear between the endpoints, m = 0, slack
/// variables evaluated consistently from avg rho, dual state zero.
inline PrimalState initial_state(const MarkovGraph& g, TimeGrid grid, const NodeVector& rho_a,
                                 const NodeVector& rho_b, MeanKind mean, bool with_rho_b) {
    PrimalState a = PrimalState::zero(g, grid, with_rho_b);
    const int n = grid.n_intervals;
    for (int i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) / n;
        a.rho.values[i] = (1.0 - t) * rho_a + t * rho_b;
    }
    for (int i = 0; i < n; ++i) {
        a.rho_bar.values[i] = 0.5 * (a.rho.values[i] + a.rho.values[i + 1]);
        a.q.values[i] = a.rho_bar.values[i];
        for (int e = 0; e < g.edge_count(); ++e) {
            const DirectedEdge& ed = g.edge(e);
            const double s = std::max(a.q.values[i][ed.from], 0.0);
            const double t = std::max(a.q.values[i][ed.to], 0.0);
            a.theta_minus.values[i][e] = a.q.values[i][ed.from];
            a.theta_plus.values[i][e] = a.q.values[i][ed.to];
            a.vartheta.values[i][e] = theta(mean, s, t);
        }
    }
    if (with_rho_b) a.rho_b = rho_b;
    return a;
}

/// prox_{sigma F*}: componentwise dual proxes. All components except the
/// entropy prox and the affine J_avg pins are projections and ignore sigma.
inline void apply_prox_F_star_impl(const MarkovGraph& g, double sigma, DualState& v,
                                   const ProblemSpec& prob, int threads) {
    prox_dual_edge_action(v.vartheta, v.m, threads);
    prox_dual_Jpm(g, v.q, v.theta_minus, v.theta_plus, threads);
    prox_dual_Javg(v.rho, v.rho_bar, prob.bc, sigma,
                   prob.free_endpoint ? JavgMode::FreeEndpoint : JavgMode::FixedEndpoints);
    if (prob.free_endpoint)
        v.rho_b = prox_dual_entropy(v.rho_b, sigma, prob.tau_jko, v.rho.grid.h(), prob.entropy);
}

/// prox_{tau G}: projections onto CE_h, K, and J=; tau independent.
inline void apply_prox_G_impl(const CEProjector& ce, PrimalState& v, const ProblemSpec& prob,
                              MeanKind mean, int threads) {
    if (prob.free_endpoint) {
        CEProjection pr = ce.project_free(v.rho, v.m, v.rho_b, prob.bc.rho_a);
        v.rho = std::move(pr.rho);
        v.m = std::move(pr.m);
        v.rho_b = std::move(pr.rho_b);
    } else {
        CEProjection pr = ce.project_fixed(v.rho, v.m, prob.bc);
        v.rho = std::move(pr.rho);
        v.m = std::move(pr.m);
    }
    project_K_field(mean, v.theta_minus, v.theta_plus, v.vartheta, threads);
    project_Jeq(v.rho_bar, v.q);
}

/// Action of the reported state after the final-report repair: negative
/// densities count as 0 and momenta on edges whose clamped mean vanishes
/// count as converged-to-zero, so the reported value is always finite. The
/// repair magnitudes are surfaced as diagnostics: min_density records the
/// most negative raw density (anything below -1e-8 signals an unconverged
/// run) and dead_edge_momentum the largest momentum zeroed this way. The
/// exact +inf semantics of alpha are untouched; this is the reporting path
/// only.
inline double reporting_action(const MarkovGraph& g, const DensityPath& rho, const IntervalEdgeField& m,
                               MeanKind mean, double* min_density, double* dead_edge_momentum) {
    const int n = rho.grid.n_intervals;
    const double h = rho.grid.h();
    double total = 0.0;
    double mind = 0.0, dead = 0.0;
    NodeVector bar(g.vertex_count());
    for (int i = 0; i < n; ++i) {
        bar = 0.5 * (rho.values[i] + rho.values[i + 1]);
        for (int x = 0; x < bar.size(); ++x) {
            mind = std::min(mind, bar[x]);
            if (bar[x] < 0.0) bar[x] = 0.0;
        }
        for (int e = 0; e < g.edge_count(); ++e) {
            const DirectedEdge& ed = g.edge(e);
            const double th = theta(mean, bar[ed.from], bar[ed.to]);
            const double mv = m.values[i][e];
            if (th > 0.0) {
                total += mv * mv / th * ed.q * g.pi()[ed.from];
            } else {
                dead = std::max(dead, std::abs(mv));
            }
        }
    }
    if (min_density) *min_density = mind;
    if (dead_edge_momentum) *dead_edge_momentum = dead;
    return 0.5 * h * total;
}

inline GeodesicSolution run_chambolle_pock(const MarkovGraph& g, TimeGrid grid, const ProblemSpec& prob,
                                           const SolverConfig& cfg, const CEProjector& ce,
                                           const PrimalState* warm_a, const DualState* warm_b) {
    cfg.validate();
    const bool jko = prob.free_endpoint;
    const double h = grid.h();

    PrimalState a = warm_a ? *warm_a
                           : initial_state(g, grid, prob.bc.rho_a,
                                           jko ? prob.bc.rho_a : prob.bc.rho_b, cfg.mean, jko);
    DualState b = warm_b ? *warm_b : PrimalState::zero(g, grid, jko);
    PrimalState abar = a;
    PrimalState a_prev = a;
    DualState v = b;

    GeodesicSolution sol;
    double stopping = std::numeric_limits<double>::infinity();
    double delta_a_sq = std::numeric_limits<double>::infinity();
    long iter = 0;
    bool converged = false;

    for (iter = 1; iter <= cfg.max_iters; ++iter) {
        // b <- prox_{sigma F*}(b + sigma abar)
        state_lincomb(v, 1.0, b, cfg.sigma, abar);
        apply_prox_F_star_impl(g, cfg.sigma, v, prob, cfg.threads);
        std::swap(b, v);

        // a <- prox_{tau G}(a - tau b)
        std::swap(a_prev, a);
        state_lincomb(a, 1.0, a_prev, -cfg.tau, b);
        apply_prox_G_impl(ce, a, prob, cfg.mean, cfg.threads);

        // abar <- a + lambda (a - a_prev)
        state_lincomb(abar, 1.0 + cfg.lambda, a, -cfg.lambda, a_prev);

        const bool check = iter % cfg.check_every == 0 || iter == cfg.max_iters;
        const bool record = iter % cfg.record_stride == 0;
        if (check || record) {
            double s = 0.0;
            for (int i = 0; i <= grid.n_intervals; ++i) {
                const NodeVector d = a.rho.values[i] - a_prev.rho.values[i];
                s += inner_node(g, d, d);
            }
            stopping = h * s;
            state_lincomb(v, 1.0, a, -1.0, a_prev);
            delta_a_sq = h_inner(g, v, v);
            if (record) {
                double rmax = 0.0;
                const CEResidual res = ce_residual(g, a.rho, a.m,
                                                   jko ? BoundaryPair{prob.bc.rho_a, a.rho.values.back()}
                                                       : prob.bc);
                for (const NodeVector& r : res.residual.values)
                    rmax = std::max(rmax, r.lpNorm<Eigen::Infinity>());
                sol.history.push_back({iter, stopping, delta_a_sq, rmax});
            }
            if (check && stopping <= cfg.tol) {
                converged = true;
                break;
            }
        }
    }

    sol.iterations = std::min(iter, cfg.max_iters);
    sol.converged = converged;
    sol.final_stopping = stopping;
    sol.final_delta_a_sq = delta_a_sq;

    // Feasible reported state: re-project onto the continuity equation, then
    // antisymmetrize the momentum (divergence unchanged, action not
    // increased).
    if (jko) {
        CEProjection pr = ce.project_free(a.rho, a.m, a.rho_b, prob.bc.rho_a);
        a.rho = std::move(pr.rho);
        a.m = std::move(pr.m);
        a.rho_b = std::move(pr.rho_b);
    } else {
        CEProjection pr = ce.project_fixed(a.rho, a.m, prob.bc);
        a.rho = std::move(pr.rho);
        a.m = std::move(pr.m);
    }
    {
        // the optimal momentum is antisymmetric; the symmetric remainder of
        // the raw iterate measures residual convergence error
        const IntervalEdgeField anti = antisymmetrize(g, a.m);
        double sym_sq = 0.0;
        for (int i = 0; i < grid.n_intervals; ++i) {
            const EdgeVector sym = a.m.values[i] - anti.values[i];
            sym_sq += inner_edge(g, sym, sym);
        }
        sol.momentum_symmetry_gap = std::sqrt(h * sym_sq);
        a.m = anti;
    }

    const CEResidual res = ce_residual(g, a.rho, a.m,
                                       jko ? BoundaryPair{prob.bc.rho_a, a.rho.values.back()} : prob.bc);
    double rmax = 0.0;
    for (const NodeVector& r : res.residual.values) rmax = std::max(rmax, r.lpNorm<Eigen::Infinity>());
    sol.final_ce_residual = std::max(rmax, res.bc_violation);

    const double action =
        reporting_action(g, a.rho, a.m, cfg.mean, &sol.min_density, &sol.dead_edge_momentum);
    sol.distance = std::sqrt(action);
    sol.state = std::move(a);
    sol.dual = std::move(b);
    return sol;
}

}  // namespace detail

/// prox_{sigma F*} acting on a dual state (componentwise dual proxes).
inline void apply_prox_F_star(const MarkovGraph& g, double sigma, DualState& v, const BoundaryPair& bc,
                              int threads = 1) {
    detail::ProblemSpec prob;
    prob.bc = bc;
    detail::apply_prox_F_star_impl(g, sigma, v, prob, threads);
}

/// prox_{tau G} acting on a primal state (projections; tau independent).
inline void apply_prox_G(const CEProjector& ce, PrimalState& v, const BoundaryPair& bc, MeanKind mean,
                         int threads = 1) {
    detail::ProblemSpec prob;
    prob.bc = bc;
    detail::apply_prox_G_impl(ce, v, prob, mean, threads);
}

/// Computes the discrete transportation distance W_h(rho_A, rho_B) and its
/// geodesic by the primal-dual iteration over the slack-variable splitting.
inline GeodesicSolution solve_geodesic(const MarkovGraph& g, TimeGrid grid, const BoundaryPair& bc,
                                       const SolverConfig& cfg = {}) {
    detail::check_boundary_density(g, bc.rho_a, "rho_A");
    detail::check_boundary_density(g, bc.rho_b, "rho_B");
    detail::ProblemSpec prob;
    prob.bc = bc;
    const CEProjector ce(g, grid, CEProjector::Mode::FixedEndpoints);
    return detail::run_chambolle_pock(g, grid, prob, cfg, ce, nullptr, nullptr);
}

/// One implicit gradient-flow step: minimizes 1/2 W_h(rho_A, .)^2 +
/// tau_jko H(.) over the free endpoint. The returned solution carries the
/// minimizer in state.rho_b.
inline GeodesicSolution solve_free_endpoint(const MarkovGraph& g, TimeGrid grid, const NodeVector& rho_a,
                                            double tau_jko, const SolverConfig& cfg = {},
                                            EntropyKind entropy = EntropyKind::shannon(),
                                            const CEProjector* projector = nullptr,
                                            const PrimalState* warm_a = nullptr,
                                            const DualState* warm_b = nullptr) {
    detail::check_boundary_density(g, rho_a, "rho_A");
    detail::ProblemSpec prob;
    prob.free_endpoint = true;
    prob.bc = BoundaryPair{rho_a, rho_a};
    prob.tau_jko = tau_jko;
    prob.entropy = entropy;
    if (projector) {
        if (projector->mode() != CEProjector::Mode::FreeEndpoint ||
            projector->grid().n_intervals != grid.n_intervals)
            throw std::invalid_argument("solve_free_endpoint: projector mode/grid mismatch");
        return detail::run_chambolle_pock(g, grid, prob, cfg, *projector, warm_a, warm_b);
    }
    const CEProjector ce(g, grid, CEProjector::Mode::FreeEndpoint);
    return detail::run_chambolle_pock(g, grid, prob, cfg, ce, warm_a, warm_b);
}

}  // namespace graphot
