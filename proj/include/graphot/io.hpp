#pragma once

#include "graphot/builtins.hpp"
#include "graphot/entropy.hpp"
#include "graphot/graph.hpp"
#include "graphot/time_grid.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace graphot {

struct LoadedGraph {
    MarkovGraph graph;
    std::vector<std::string> labels;
    bool pi_normalized = false;  // loader rescaled pi (drift below 1e-6)
};

/// Graph JSON schema:
///   { "vertices": int, "labels": [string]?, "pi": [float]?,
///     "edges": [{"from": int, "to": int, "q": float}],
///     "convention": "explicit" | "uniform-edge" }
/// With "uniform-edge" the pi and q entries are ignored and derived from the
/// degree convention. With "explicit", pi is required and is normalized only
/// when its sum is within 1e-6 of 1 (recorded in the result); otherwise the
/// input is rejected.
inline LoadedGraph load_graph_json(const nlohmann::json& j) {
    if (!j.contains("vertices") || !j.contains("edges"))
        throw std::invalid_argument("graph json: need \"vertices\" and \"edges\"");
    const int n = j.at("vertices").get<int>();
    const std::string convention = j.value("convention", std::string("explicit"));

    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();

    if (convention == "uniform-edge") {
        std::vector<std::pair<int, int>> undirected;
        for (const auto& e : j.at("edges"))
            undirected.emplace_back(e.at("from").get<int>(), e.at("to").get<int>());
        return {make_uniform_edge_graph(n, undirected), std::move(labels), false};
    }
    if (convention != "explicit")
        throw std::invalid_argument("graph json: unknown convention \"" + convention + "\"");

    if (!j.contains("pi")) throw std::invalid_argument("graph json: explicit convention requires \"pi\"");
    const auto pi_values = j.at("pi").get<std::vector<double>>();
    if (static_cast<int>(pi_values.size()) != n)
        throw std::invalid_argument("graph json: pi has wrong length");
    NodeVector pi(n);
    for (int x = 0; x < n; ++x) pi[x] = pi_values[x];

    bool normalized = false;
    const double mass = pi.sum();
    if (std::abs(mass - 1.0) > 1e-12) {
        if (std::abs(mass - 1.0) > 1e-6)
            throw std::invalid_argument("graph json: pi sums to " + std::to_string(mass) +
                                        ", outside the 1e-6 normalization band");
        pi /= mass;
        normalized = true;
    }

    std::vector<DirectedEdge> edges;
    for (const auto& e : j.at("edges"))
        edges.push_back({e.at("from").get<int>(), e.at("to").get<int>(), e.at("q").get<double>()});
    return {MarkovGraph(n, std::move(edges), std::move(pi)), std::move(labels), normalized};
}

inline LoadedGraph load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open graph file: " + path);
    nlohmann::json j;
    in >> j;
    return load_graph_json(j);
}

/// Density specs: "uniform", "dirac:K", an inline JSON array, or a path to a
/// JSON file holding an array.
inline NodeVector load_density(const MarkovGraph& g, const std::string& spec) {
    if (spec == "uniform") return uniform_density(g);
    if (spec.rfind("dirac:", 0) == 0) return dirac_density(g, std::stoi(spec.substr(6)));

    nlohmann::json j;
    if (!spec.empty() && spec.front() == '[') {
        j = nlohmann::json::parse(spec);
    } else {
        std::ifstream in(spec);
        if (!in) throw std::invalid_argument("cannot open density file: " + spec);
        in >> j;
    }
    const auto values = j.get<std::vector<double>>();
    if (static_cast<int>(values.size()) != g.vertex_count())
        throw std::invalid_argument("density has wrong length");
    NodeVector rho(g.vertex_count());
    for (int x = 0; x < g.vertex_count(); ++x) rho[x] = values[x];
    if (!is_probability_density(g, rho, 1e-6))
        throw std::invalid_argument("density fails validation (negative entries or pi-mass not 1)");
    return rho;
}

namespace detail {
inline std::string full_precision(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace detail

/// Writes <base>.rho.csv with columns (t_index, t, vertex, rho) and
/// <base>.m.csv with columns (t_index, t, from, to, m). Full double
/// precision, so identical runs produce byte-identical files.
inline void write_geodesic_csv(const MarkovGraph& g, const DensityPath& rho, const IntervalEdgeField& m,
                               const std::string& base) {
    {
        std::ofstream out(base + ".rho.csv");
        if (!out) throw std::runtime_error("cannot write " + base + ".rho.csv");
        out << "t_index,t,vertex,rho\n";
        for (int i = 0; i <= rho.grid.n_intervals; ++i)
            for (int x = 0; x < g.vertex_count(); ++x)
                out << i << ',' << detail::full_precision(rho.grid.node_time(i)) << ',' << x << ','
                    << detail::full_precision(rho.values[i][x]) << '\n';
    }
    {
        std::ofstream out(base + ".m.csv");
        if (!out) throw std::runtime_error("cannot write " + base + ".m.csv");
        out << "t_index,t,from,to,m\n";
        for (int i = 0; i < m.grid.n_intervals; ++i)
            for (int e = 0; e < g.edge_count(); ++e)
                out << i << ',' << detail::full_precision(m.grid.node_time(i)) << ',' << g.edge(e).from
                    << ',' << g.edge(e).to << ',' << detail::full_precision(m.values[i][e]) << '\n';
    }
}

inline nlohmann::json geodesic_to_json(const MarkovGraph& g, const DensityPath& rho,
                                       const IntervalEdgeField& m) {
    nlohmann::json j;
    j["n_intervals"] = rho.grid.n_intervals;
    j["vertices"] = g.vertex_count();
    nlohmann::json rho_rows = nlohmann::json::array();
    for (int i = 0; i <= rho.grid.n_intervals; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int x = 0; x < g.vertex_count(); ++x) row.push_back(rho.values[i][x]);
        rho_rows.push_back(std::move(row));
    }
    j["rho"] = std::move(rho_rows);
    nlohmann::json edges = nlohmann::json::array();
    for (int e = 0; e < g.edge_count(); ++e)
        edges.push_back({{"from", g.edge(e).from}, {"to", g.edge(e).to}});
    j["edges"] = std::move(edges);
    nlohmann::json m_rows = nlohmann::json::array();
    for (int i = 0; i < m.grid.n_intervals; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int e = 0; e < g.edge_count(); ++e) row.push_back(m.values[i][e]);
        m_rows.push_back(std::move(row));
    }
    j["m"] = std::move(m_rows);
    return j;
}

inline void write_geodesic_json(const MarkovGraph& g, const DensityPath& rho, const IntervalEdgeField& m,
                                const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << geodesic_to_json(g, rho, m).dump(2) << '\n';
}

inline std::pair<DensityPath, IntervalEdgeField> read_geodesic_json(const MarkovGraph& g,
                                                                    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    nlohmann::json j;
    in >> j;
    const TimeGrid grid(j.at("n_intervals").get<int>());
    DensityPath rho = DensityPath::zero(grid, g.vertex_count());
    IntervalEdgeField m = IntervalEdgeField::zero(grid, g.edge_count());
    for (int i = 0; i <= grid.n_intervals; ++i)
        for (int x = 0; x < g.vertex_count(); ++x) rho.values[i][x] = j.at("rho")[i][x].get<double>();
    for (int i = 0; i < grid.n_intervals; ++i)
        for (int e = 0; e < g.edge_count(); ++e) m.values[i][e] = j.at("m")[i][e].get<double>();
    return {std::move(rho), std::move(m)};
}

/// Reads back the pair of CSV files written by write_geodesic_csv.
inline std::pair<DensityPath, IntervalEdgeField> read_geodesic_csv(const MarkovGraph& g, TimeGrid grid,
                                                                   const std::string& base) {
    DensityPath rho = DensityPath::zero(grid, g.vertex_count());
    IntervalEdgeField m = IntervalEdgeField::zero(grid, g.edge_count());
    std::ifstream rin(base + ".rho.csv");
    if (!rin) throw std::invalid_argument("cannot open " + base + ".rho.csv");
    std::string line;
    std::getline(rin, line);  // header
    while (std::getline(rin, line)) {
        std::istringstream ss(line);
        std::string field;
        std::getline(ss, field, ',');
        const int i = std::stoi(field);
        std::getline(ss, field, ',');  // t
        std::getline(ss, field, ',');
        const int x = std::stoi(field);
        std::getline(ss, field, ',');
        rho.values[i][x] = std::stod(field);
    }
    std::ifstream min(base + ".m.csv");
    if (!min) throw std::invalid_argument("cannot open " + base + ".m.csv");
    std::getline(min, line);
    while (std::getline(min, line)) {
        std::istringstream ss(line);
        std::string field;
        std::getline(ss, field, ',');
        const int i = std::stoi(field);
        std::getline(ss, field, ',');  // t
        std::getline(ss, field, ',');
        const int from = std::stoi(field);
        std::getline(ss, field, ',');
        const int to = std::stoi(field);
        std::getline(ss, field, ',');
        const int e = g.find_edge(from, to);
        if (e < 0) throw std::invalid_argument("csv edge not present in graph");
        m.values[i][e] = std::stod(field);
    }
    return {std::move(rho), std::move(m)};
}

/// Flow trajectory CSV: (step, t, vertex, rho, entropy).
inline void write_flow_csv(const FlowTrajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "step,t,vertex,rho,entropy\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k)
        for (int x = 0; x < traj.states[k].size(); ++x)
            out << k << ',' << detail::full_precision(traj.times[k]) << ',' << x << ','
                << detail::full_precision(traj.states[k][x]) << ','
                << detail::full_precision(traj.entropy_values[k]) << '\n';
}

inline nlohmann::json flow_to_json(const FlowTrajectory& traj) {
    nlohmann::json j;
    j["times"] = traj.times;
    j["entropy"] = traj.entropy_values;
    j["completed"] = traj.completed;
    nlohmann::json states = nlohmann::json::array();
    for (const NodeVector& s : traj.states) {
        nlohmann::json row = nlohmann::json::array();
        for (int x = 0; x < s.size(); ++x) row.push_back(s[x]);
        states.push_back(std::move(row));
    }
    j["states"] = std::move(states);
    return j;
}

}  // namespace graphot
