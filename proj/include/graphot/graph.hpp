#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace graphot {

/// Function on vertices (one real per vertex), e.g. a density or potential.
using NodeVector = Eigen::VectorXd;
/// Function on the stored directed edges, e.g. a momentum. Implicitly zero
/// off the edge set.
using EdgeVector = Eigen::VectorXd;

struct DirectedEdge {
    int from = 0;
    int to = 0;
    double q = 0.0;  // transition rate Q(from, to) > 0
};

/// Weighted graph (X, Q, pi): finite vertex set, reversible transition rate
/// kernel stored as a sorted sparse edge list, and stationary distribution.
///
/// Immutable after construction; all members may be shared across threads.
class MarkovGraph {
  public:
    /// Validates and builds the graph. Requirements:
    ///   - pi > 0 componentwise, sum(pi) = 1 within 1e-12 relative,
    ///   - edge set symmetric ((x,y) stored iff (y,x) stored), no self loops,
    ///   - detailed balance pi(x)Q(x,y) = pi(y)Q(y,x) within 1e-12 relative,
    ///   - edge graph connected.
    /// Inputs failing these are rejected, not repaired.
    MarkovGraph(int vertex_count, std::vector<DirectedEdge> edges, NodeVector pi)
        : n_(vertex_count), edges_(std::move(edges)), pi_(std::move(pi)) {
        if (n_ <= 0) throw std::invalid_argument("MarkovGraph: vertex_count must be positive");
        if (pi_.size() != n_) throw std::invalid_argument("MarkovGraph: pi has wrong length");
        for (int x = 0; x < n_; ++x) {
            if (!(pi_[x] > 0.0)) throw std::invalid_argument("MarkovGraph: pi must be strictly positive");
        }
        const double mass = pi_.sum();
        if (std::abs(mass - 1.0) > 1e-12 * std::max(1.0, std::abs(mass)))
            throw std::invalid_argument("MarkovGraph: pi must sum to 1 (got " + std::to_string(mass) + ")");

        std::sort(edges_.begin(), edges_.end(), [](const DirectedEdge& a, const DirectedEdge& b) {
            return std::pair(a.from, a.to) < std::pair(b.from, b.to);
        });
        for (const DirectedEdge& e : edges_) {
            if (e.from < 0 || e.from >= n_ || e.to < 0 || e.to >= n_)
                throw std::invalid_argument("MarkovGraph: edge endpoint out of range");
            if (e.from == e.to) throw std::invalid_argument("MarkovGraph: self loops are not allowed");
            if (!(e.q > 0.0)) throw std::invalid_argument("MarkovGraph: edge rates must be positive");
        }
        for (std::size_t i = 1; i < edges_.size(); ++i) {
            if (edges_[i - 1].from == edges_[i].from && edges_[i - 1].to == edges_[i].to)
                throw std::invalid_argument("MarkovGraph: duplicate edge");
        }

        // Paired-edge index: reverse_[e] is the position of the opposite
        // orientation. Every projection that touches both orientations uses it.
        reverse_.resize(edges_.size());
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            const int j = find_edge(edges_[i].to, edges_[i].from);
            if (j < 0) throw std::invalid_argument("MarkovGraph: edge set is not symmetric");
            reverse_[i] = j;
            const double lhs = pi_[edges_[i].from] * edges_[i].q;
            const double rhs = pi_[edges_[i].to] * edges_[j].q;
            if (std::abs(lhs - rhs) > 1e-12 * std::max(std::abs(lhs), std::abs(rhs)))
                throw std::invalid_argument("MarkovGraph: detailed balance violated on edge (" +
                                            std::to_string(edges_[i].from) + "," + std::to_string(edges_[i].to) + ")");
        }

        out_offset_.assign(n_ + 1, 0);
        for (const DirectedEdge& e : edges_) out_offset_[e.from + 1]++;
        for (int x = 0; x < n_; ++x) out_offset_[x + 1] += out_offset_[x];

        row_sum_.setZero(n_);
        for (const DirectedEdge& e : edges_) row_sum_[e.from] += e.q;

        // Irreducibility: symmetric edge set, so plain BFS suffices.
        std::vector<char> seen(n_, 0);
        std::queue<int> queue;
        queue.push(0);
        seen[0] = 1;
        int reached = 1;
        while (!queue.empty()) {
            const int x = queue.front();
            queue.pop();
            for (int e = out_offset_[x]; e < out_offset_[x + 1]; ++e) {
                const int y = edges_[e].to;
                if (!seen[y]) {
                    seen[y] = 1;
                    ++reached;
                    queue.push(y);
                }
            }
        }
        if (reached != n_) throw std::invalid_argument("MarkovGraph: edge graph is not connected");
    }

    int vertex_count() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<DirectedEdge>& edges() const { return edges_; }
    const DirectedEdge& edge(int e) const { return edges_[e]; }
    int reverse_edge(int e) const { return reverse_[e]; }
    const NodeVector& pi() const { return pi_; }
    /// sum_y Q(x,y)
    double row_sum(int x) const { return row_sum_[x]; }
    /// Half-open range of edge indices leaving x.
    std::pair<int, int> out_edges(int x) const { return {out_offset_[x], out_offset_[x + 1]}; }

    /// Index of the stored edge (from,to), or -1.
    int find_edge(int from, int to) const {
        auto lo = std::lower_bound(edges_.begin(), edges_.end(), std::pair(from, to),
                                   [](const DirectedEdge& e, const std::pair<int, int>& key) {
                                       return std::pair(e.from, e.to) < key;
                                   });
        if (lo != edges_.end() && lo->from == from && lo->to == to)
            return static_cast<int>(lo - edges_.begin());
        return -1;
    }

  private:
    int n_;
    std::vector<DirectedEdge> edges_;
    NodeVector pi_;
    std::vector<int> reverse_;
    std::vector<int> out_offset_;
    NodeVector row_sum_;
};

namespace detail {
inline void check_node_dim(const MarkovGraph& g, const NodeVector& v, const char* what) {
    if (v.size() != g.vertex_count())
        throw std::invalid_argument(std::string(what) + ": node vector has wrong length");
}
inline void check_edge_dim(const MarkovGraph& g, const EdgeVector& v, const char* what) {
    if (v.size() != g.edge_count())
        throw std::invalid_argument(std::string(what) + ": edge vector has wrong length");
}
}  // namespace detail

/// <phi, psi>_pi = sum_x phi(x) psi(x) pi(x)
inline double inner_node(const MarkovGraph& g, const NodeVector& phi, const NodeVector& psi) {
    detail::check_node_dim(g, phi, "inner_node");
    detail::check_node_dim(g, psi, "inner_node");
    return (phi.array() * psi.array() * g.pi().array()).sum();
}

/// <Phi, Psi>_Q = 1/2 sum_{(x,y)} Phi(x,y) Psi(x,y) Q(x,y) pi(x)
inline double inner_edge(const MarkovGraph& g, const EdgeVector& a, const EdgeVector& b) {
    detail::check_edge_dim(g, a, "inner_edge");
    detail::check_edge_dim(g, b, "inner_edge");
    double s = 0.0;
    for (int e = 0; e < g.edge_count(); ++e) {
        const DirectedEdge& ed = g.edge(e);
        s += a[e] * b[e] * ed.q * g.pi()[ed.from];
    }
    return 0.5 * s;
}

inline double norm_node(const MarkovGraph& g, const NodeVector& v) { return std::sqrt(inner_node(g, v, v)); }
inline double norm_edge(const MarkovGraph& g, const EdgeVector& v) { return std::sqrt(inner_edge(g, v, v)); }

/// (grad psi)(x,y) = psi(x) - psi(y)
inline EdgeVector gradient(const MarkovGraph& g, const NodeVector& psi) {
    detail::check_node_dim(g, psi, "gradient");
    EdgeVector out(g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) out[e] = psi[g.edge(e).from] - psi[g.edge(e).to];
    return out;
}

/// (div Psi)(x) = 1/2 sum_y Q(x,y) (Psi(y,x) - Psi(x,y))
inline NodeVector divergence(const MarkovGraph& g, const EdgeVector& m) {
    detail::check_edge_dim(g, m, "divergence");
    NodeVector out = NodeVector::Zero(g.vertex_count());
    for (int e = 0; e < g.edge_count(); ++e) {
        const DirectedEdge& ed = g.edge(e);
        out[ed.from] += 0.5 * ed.q * (m[g.reverse_edge(e)] - m[e]);
    }
    return out;
}

/// (Lap psi)(x) = sum_y Q(x,y) (psi(y) - psi(x)); equals div(grad psi).
inline NodeVector laplacian(const MarkovGraph& g, const NodeVector& psi) {
    detail::check_node_dim(g, psi, "laplacian");
    NodeVector out = NodeVector::Zero(g.vertex_count());
    for (int e = 0; e < g.edge_count(); ++e) {
        const DirectedEdge& ed = g.edge(e);
        out[ed.from] += ed.q * (psi[ed.to] - psi[ed.from]);
    }
    return out;
}

/// Two point graph with rates Q = [[0,p],[q,0]] and pi = (q, p)/(p+q).
inline MarkovGraph make_two_node_graph(double p, double q) {
    if (!(p > 0.0) || !(q > 0.0))
        throw std::invalid_argument("make_two_node_graph: rates must be positive");
    NodeVector pi(2);
    pi << q / (p + q), p / (p + q);
    return MarkovGraph(2, {{0, 1, p}, {1, 0, q}}, pi);
}

/// Graph with the uniform-edge weight convention: for a node x with m
/// outgoing edges, pi(x) = m/|E| and Q(x,y) = 1/(pi(x)|E|) = 1/m, where |E|
/// counts directed edges. Input is an undirected adjacency list; both
/// orientations of each pair are stored.
inline MarkovGraph make_uniform_edge_graph(int vertex_count,
                                           const std::vector<std::pair<int, int>>& undirected_edges) {
    std::vector<std::pair<int, int>> dir;
    dir.reserve(2 * undirected_edges.size());
    for (auto [a, b] : undirected_edges) {
        if (a == b) throw std::invalid_argument("make_uniform_edge_graph: self loop");
        dir.emplace_back(a, b);
        dir.emplace_back(b, a);
    }
    std::sort(dir.begin(), dir.end());
    dir.erase(std::unique(dir.begin(), dir.end()), dir.end());

    std::vector<int> degree(vertex_count, 0);
    for (auto [a, b] : dir) {
        if (a < 0 || a >= vertex_count || b < 0 || b >= vertex_count)
            throw std::invalid_argument("make_uniform_edge_graph: vertex out of range");
        degree[a]++;
    }
    const double total = static_cast<double>(dir.size());
    NodeVector pi(vertex_count);
    for (int x = 0; x < vertex_count; ++x) pi[x] = degree[x] / total;

    std::vector<DirectedEdge> edges;
    edges.reserve(dir.size());
    for (auto [a, b] : dir) edges.push_back({a, b, 1.0 / degree[a]});
    return MarkovGraph(vertex_count, std::move(edges), std::move(pi));
}

}  // namespace graphot
