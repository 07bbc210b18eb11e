#pragma once

#include "graphot/graph.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace graphot {

/// Path graph on n+1 vertices with the uniform-edge convention: endpoint
/// rates 1, interior rates 1/2, pi proportional to the degrees.
inline MarkovGraph make_chain_graph(int n_segments) {
    if (n_segments < 1) throw std::invalid_argument("make_chain_graph: need at least one segment");
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n_segments; ++i) edges.emplace_back(i, i + 1);
    return make_uniform_edge_graph(n_segments + 1, edges);
}

/// (m+1) x (m+1) square lattice with 4-neighbor edges, uniform-edge weights.
inline MarkovGraph make_grid2d_graph(int m) {
    if (m < 1) throw std::invalid_argument("make_grid2d_graph: need at least one cell");
    const int side = m + 1;
    auto id = [side](int i, int j) { return i * side + j; };
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < side; ++i)
        for (int j = 0; j < side; ++j) {
            if (i + 1 < side) edges.emplace_back(id(i, j), id(i + 1, j));
            if (j + 1 < side) edges.emplace_back(id(i, j), id(i, j + 1));
        }
    return make_uniform_edge_graph(side * side, edges);
}

/// d-dimensional hypercube graph (2^d vertices), uniform-edge weights.
inline MarkovGraph make_hypercube_graph(int dim) {
    if (dim < 1 || dim > 20) throw std::invalid_argument("make_hypercube_graph: dimension out of range");
    const int n = 1 << dim;
    std::vector<std::pair<int, int>> edges;
    for (int v = 0; v < n; ++v)
        for (int b = 0; b < dim; ++b)
            if (!(v & (1 << b))) edges.emplace_back(v, v | (1 << b));
    return make_uniform_edge_graph(n, edges);
}

/// The five point line used by the entropy flow experiments. As printed the
/// instance has pi = (1,2,2,2,1)/5, which does not sum to one; we keep the
/// rates Q(x,y) = 1/(10 pi(x)) computed from those values (1/2 at the ends,
/// 1/4 inside) and normalize pi to (1,2,2,2,1)/8. Detailed balance holds
/// either way: pi(x) Q(x,y) = 1/16 on every edge.
inline MarkovGraph make_line5_graph() {
    NodeVector pi(5);
    pi << 1.0 / 8, 2.0 / 8, 2.0 / 8, 2.0 / 8, 1.0 / 8;
    std::vector<DirectedEdge> edges = {{0, 1, 0.5},  {1, 0, 0.25}, {1, 2, 0.25}, {2, 1, 0.25},
                                       {2, 3, 0.25}, {3, 2, 0.25}, {3, 4, 0.25}, {4, 3, 0.5}};
    return MarkovGraph(5, std::move(edges), std::move(pi));
}

/// Companion initial density for the line5 instance: the printed
/// rho = (1,1,5,1,1)/10 rescaled to unit pi-mass, i.e. (1,1,5,1,1)/2.
inline NodeVector line5_initial_density() {
    NodeVector rho(5);
    rho << 0.5, 0.5, 2.5, 0.5, 0.5;
    return rho;
}

/// Parses a builtin graph name: two-node[(p,q)], triangle, lattice3x3, cube,
/// hypercube4, chain(M), grid2d(M), line5.
inline MarkovGraph make_builtin_graph(const std::string& name) {
    auto args_of = [&](const std::string& prefix) -> std::optional<std::vector<double>> {
        if (name.size() < prefix.size() || name.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
        if (name.size() == prefix.size()) return std::vector<double>{};
        if (name[prefix.size()] != '(' || name.back() != ')') return std::nullopt;
        std::vector<double> vals;
        std::string body = name.substr(prefix.size() + 1, name.size() - prefix.size() - 2);
        std::size_t pos = 0;
        while (pos < body.size()) {
            std::size_t used = 0;
            vals.push_back(std::stod(body.substr(pos), &used));
            pos += used;
            if (pos < body.size() && body[pos] == ',') ++pos;
        }
        return vals;
    };

    if (auto a = args_of("two-node")) {
        if (a->empty()) return make_two_node_graph(1.0, 1.0);
        if (a->size() == 2) return make_two_node_graph((*a)[0], (*a)[1]);
        throw std::invalid_argument("two-node expects (p,q)");
    }
    if (name == "triangle") return make_uniform_edge_graph(3, {{0, 1}, {1, 2}, {2, 0}});
    if (name == "lattice3x3") return make_grid2d_graph(2);
    if (name == "cube") return make_hypercube_graph(3);
    if (name == "hypercube4") return make_hypercube_graph(4);
    if (name == "line5") return make_line5_graph();
    if (auto a = args_of("chain")) {
        if (a->size() == 1) return make_chain_graph(static_cast<int>((*a)[0]));
        throw std::invalid_argument("chain expects (M)");
    }
    if (auto a = args_of("grid2d")) {
        if (a->size() == 1) return make_grid2d_graph(static_cast<int>((*a)[0]));
        throw std::invalid_argument("grid2d expects (M)");
    }
    throw std::invalid_argument("unknown builtin graph: " + name);
}

/// Dirac density at a vertex: all pi-mass concentrated there.
inline NodeVector dirac_density(const MarkovGraph& g, int vertex) {
    if (vertex < 0 || vertex >= g.vertex_count())
        throw std::invalid_argument("dirac_density: vertex out of range");
    NodeVector rho = NodeVector::Zero(g.vertex_count());
    rho[vertex] = 1.0 / g.pi()[vertex];
    return rho;
}

inline NodeVector uniform_density(const MarkovGraph& g) {
    return NodeVector::Ones(g.vertex_count());
}

}  // namespace graphot
