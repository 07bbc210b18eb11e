#pragma once

#include "graphot/graph.hpp"
#include "graphot/means.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace graphot {

/// Uniform partition of [0,1] into N intervals [t_i, t_{i+1}), h = 1/N.
/// Only N is stored; h is derived.
struct TimeGrid {
    int n_intervals = 1;

    TimeGrid() = default;
    explicit TimeGrid(int n) : n_intervals(n) {
        if (n < 1) throw std::invalid_argument("TimeGrid: need at least one interval");
    }
    double h() const { return 1.0 / n_intervals; }
    double node_time(int i) const { return static_cast<double>(i) / n_intervals; }
};

/// Continuous, piecewise affine density path: N+1 nodal node-vectors.
struct DensityPath {
    TimeGrid grid;
    std::vector<NodeVector> values;  // values[i] at time t_i, i = 0..N

    static DensityPath zero(TimeGrid g, int vertex_count) {
        DensityPath p{g, {}};
        p.values.assign(g.n_intervals + 1, NodeVector::Zero(vertex_count));
        return p;
    }
};

/// Piecewise constant node field: one node-vector per interval.
struct IntervalNodeField {
    TimeGrid grid;
    std::vector<NodeVector> values;  // values[i] on [t_i, t_{i+1})

    static IntervalNodeField zero(TimeGrid g, int vertex_count) {
        IntervalNodeField f{g, {}};
        f.values.assign(g.n_intervals, NodeVector::Zero(vertex_count));
        return f;
    }
};

/// Piecewise constant edge field (momenta and slack variables).
struct IntervalEdgeField {
    TimeGrid grid;
    std::vector<EdgeVector> values;  // values[i] on [t_i, t_{i+1})

    static IntervalEdgeField zero(TimeGrid g, int edge_count) {
        IntervalEdgeField f{g, {}};
        f.values.assign(g.n_intervals, EdgeVector::Zero(edge_count));
        return f;
    }
};

/// Fixed temporal boundary densities.
struct BoundaryPair {
    NodeVector rho_a;
    NodeVector rho_b;
};

/// Checks rho >= 0 and sum_x rho(x) pi(x) = 1 within tol.
inline bool is_probability_density(const MarkovGraph& g, const NodeVector& rho, double tol = 1e-12) {
    if (rho.size() != g.vertex_count()) return false;
    if ((rho.array() < 0.0).any()) return false;
    return std::abs(inner_node(g, NodeVector::Ones(g.vertex_count()), rho) - 1.0) <= tol;
}

/// (avg rho)(t_i) = (rho(t_i) + rho(t_{i+1})) / 2
inline IntervalNodeField avg_h(const DensityPath& rho) {
    IntervalNodeField out{rho.grid, {}};
    out.values.reserve(rho.grid.n_intervals);
    for (int i = 0; i < rho.grid.n_intervals; ++i)
        out.values.push_back(0.5 * (rho.values[i] + rho.values[i + 1]));
    return out;
}

/// (d_t rho)(t_i) = (rho(t_{i+1}) - rho(t_i)) / h
inline IntervalNodeField time_derivative(const DensityPath& rho) {
    IntervalNodeField out{rho.grid, {}};
    out.values.reserve(rho.grid.n_intervals);
    const double inv_h = rho.grid.n_intervals;
    for (int i = 0; i < rho.grid.n_intervals; ++i)
        out.values.push_back(inv_h * (rho.values[i + 1] - rho.values[i]));
    return out;
}

/// Nodal interpolation: builds the piecewise affine path through the given
/// N+1 samples.
inline DensityPath lagrange_interpolate(TimeGrid grid, std::vector<NodeVector> samples) {
    if (static_cast<int>(samples.size()) != grid.n_intervals + 1)
        throw std::invalid_argument("lagrange_interpolate: need N+1 samples");
    return DensityPath{grid, std::move(samples)};
}

struct CEResidual {
    IntervalNodeField residual;  // d_t rho + div m per interval
    double bc_violation = 0.0;   // max deviation of rho(t_0), rho(t_N) from the data
};

/// Residual of the discrete continuity equation. Membership in CE_h(rho_A,
/// rho_B) is residual == 0 and bc_violation == 0.
inline CEResidual ce_residual(const MarkovGraph& g, const DensityPath& rho, const IntervalEdgeField& m,
                              const BoundaryPair& bc) {
    if (m.grid.n_intervals != rho.grid.n_intervals)
        throw std::invalid_argument("ce_residual: grids disagree");
    CEResidual out{IntervalNodeField{rho.grid, {}}, 0.0};
    out.residual.values.reserve(rho.grid.n_intervals);
    const double inv_h = rho.grid.n_intervals;
    for (int i = 0; i < rho.grid.n_intervals; ++i) {
        detail::check_node_dim(g, rho.values[i], "ce_residual");
        detail::check_edge_dim(g, m.values[i], "ce_residual");
        out.residual.values.push_back(inv_h * (rho.values[i + 1] - rho.values[i]) + divergence(g, m.values[i]));
    }
    out.bc_violation = std::max((rho.values.front() - bc.rho_a).lpNorm<Eigen::Infinity>(),
                                (rho.values.back() - bc.rho_b).lpNorm<Eigen::Infinity>());
    return out;
}

/// Local action integrand: m^2/theta(s,t) if theta > 0, 0 if theta = 0 and
/// m = 0, +inf otherwise (negative s or t included). +inf is an ordinary
/// saturating value, never a trap.
inline double alpha(double s, double t, double m, MeanKind kind) {
    if (s < 0.0 || t < 0.0) return std::numeric_limits<double>::infinity();
    const double th = theta(kind, s, t);
    if (th > 0.0) return m * m / th;
    return m == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

/// Benamou-Brenier integrand Phi(vartheta, m); alpha(s,t,m) = Phi(theta(s,t), m).
inline double edge_action_phi(double vartheta, double m) {
    if (vartheta > 0.0) return m * m / vartheta;
    if (vartheta == 0.0 && m == 0.0) return 0.0;
    return std::numeric_limits<double>::infinity();
}

/// Time-discrete action
///   A_h(rho, m) = h/2 sum_i sum_{(x,y)} alpha(avg rho(t_i,x), avg rho(t_i,y),
///                                             m(t_i,x,y)) Q(x,y) pi(x).
inline double discrete_action(const MarkovGraph& g, const DensityPath& rho, const IntervalEdgeField& m,
                              MeanKind kind) {
    if (m.grid.n_intervals != rho.grid.n_intervals)
        throw std::invalid_argument("discrete_action: grids disagree");
    const double h = rho.grid.h();
    double total = 0.0;
    NodeVector bar(g.vertex_count());
    for (int i = 0; i < rho.grid.n_intervals; ++i) {
        bar = 0.5 * (rho.values[i] + rho.values[i + 1]);
        for (int e = 0; e < g.edge_count(); ++e) {
            const DirectedEdge& ed = g.edge(e);
            const double a = alpha(bar[ed.from], bar[ed.to], m.values[i][e], kind);
            if (std::isinf(a)) return a;
            total += a * ed.q * g.pi()[ed.from];
        }
    }
    return 0.5 * h * total;
}

/// m_bar(x,y) = (m(x,y) - m(y,x)) / 2. Leaves the divergence unchanged and
/// never increases the action.
inline IntervalEdgeField antisymmetrize(const MarkovGraph& g, const IntervalEdgeField& m) {
    IntervalEdgeField out{m.grid, {}};
    out.values.reserve(m.values.size());
    for (const EdgeVector& mi : m.values) {
        detail::check_edge_dim(g, mi, "antisymmetrize");
        EdgeVector v(g.edge_count());
        for (int e = 0; e < g.edge_count(); ++e) v[e] = 0.5 * (mi[e] - mi[g.reverse_edge(e)]);
        out.values.push_back(std::move(v));
    }
    return out;
}

}  // namespace graphot
