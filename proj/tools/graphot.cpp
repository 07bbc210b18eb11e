// graphot: transportation distances, geodesics, and entropy gradient flows
// on reversible Markov graphs.

#include <graphot/graphot.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

int log_level() {
    const char* env = std::getenv("GRAPHOT_LOG");
    return env ? std::atoi(env) : 0;
}

struct CommonOptions {
    std::string graph_path;
    std::string builtin;
    std::string rho_a;
    std::string rho_b;
    int n = 100;
    std::string mean = "log";
    double sigma = 0.9;
    double tau = 0.9;
    double lambda = 1.0;
    double tol = 1e-10;
    long max_iters = 500000;
    std::string out;
    std::string format = "csv";
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool needs_rho_b) {
    auto* graph = cmd->add_option("--graph", opt.graph_path, "graph JSON file");
    cmd->add_option("--builtin", opt.builtin,
                    "builtin graph: two-node(p,q), triangle, lattice3x3, cube, hypercube4, "
                    "chain(M), grid2d(M), line5")
        ->excludes(graph);
    cmd->add_option("--rho-a", opt.rho_a, "initial density: uniform, dirac:K, JSON array or file")
        ->required();
    auto* rb = cmd->add_option("--rho-b", opt.rho_b, "final density (same formats)");
    if (needs_rho_b) rb->required();
    cmd->add_option("--n", opt.n, "number of time intervals")->check(CLI::PositiveNumber);
    cmd->add_option("--mean", opt.mean, "averaging function")->check(CLI::IsMember({"log", "geo"}));
    cmd->add_option("--sigma", opt.sigma, "dual step size");
    cmd->add_option("--tau", opt.tau, "primal step size");
    cmd->add_option("--lambda", opt.lambda, "extrapolation parameter");
    cmd->add_option("--tol", opt.tol, "stopping threshold");
    cmd->add_option("--max-iters", opt.max_iters, "iteration cap");
    cmd->add_option("--out", opt.out, "output path (base name for csv)");
    cmd->add_option("--format", opt.format, "trajectory format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--threads", opt.threads, "worker threads for pointwise maps")
        ->check(CLI::PositiveNumber);
}

graphot::MarkovGraph load_graph(const CommonOptions& opt) {
    if (!opt.builtin.empty()) return graphot::make_builtin_graph(opt.builtin);
    if (!opt.graph_path.empty()) {
        graphot::LoadedGraph loaded = graphot::load_graph_file(opt.graph_path);
        if (loaded.pi_normalized && log_level() > 0)
            std::fprintf(stderr, "[graphot] note: pi was normalized to unit mass\n");
        return std::move(loaded.graph);
    }
    throw CLI::ValidationError("--graph or --builtin is required");
}

graphot::SolverConfig solver_config(const CommonOptions& opt) {
    graphot::SolverConfig cfg;
    cfg.sigma = opt.sigma;
    cfg.tau = opt.tau;
    cfg.lambda = opt.lambda;
    cfg.tol = opt.tol;
    cfg.max_iters = opt.max_iters;
    cfg.threads = opt.threads;
    cfg.mean = opt.mean == "log" ? graphot::MeanKind::Logarithmic : graphot::MeanKind::Geometric;
    return cfg;
}

nlohmann::json run_report(const CommonOptions& opt, const graphot::GeodesicSolution& sol,
                          double wall_seconds) {
    nlohmann::json j;
    j["config"] = {{"n", opt.n},         {"mean", opt.mean},   {"sigma", opt.sigma},
                   {"tau", opt.tau},     {"lambda", opt.lambda}, {"tol", opt.tol},
                   {"max_iters", opt.max_iters}, {"threads", opt.threads}};
    j["distance"] = sol.distance;
    j["iterations"] = sol.iterations;
    j["converged"] = sol.converged;
    j["final_stopping"] = sol.final_stopping;
    j["final_ce_residual"] = sol.final_ce_residual;
    j["min_density"] = sol.min_density;
    j["wall_seconds"] = wall_seconds;
    return j;
}

void print_iteration_log(const graphot::GeodesicSolution& sol) {
    if (log_level() < 2) return;
    for (const auto& rec : sol.history)
        std::fprintf(stderr, "[graphot] iter=%ld stopping=%.3e delta_a_sq=%.3e ce=%.3e\n", rec.iteration,
                     rec.stopping_value, rec.delta_a_sq, rec.ce_residual);
}

int cmd_distance(const CommonOptions& opt) {
    const graphot::MarkovGraph g = load_graph(opt);
    const graphot::NodeVector rho_a = graphot::load_density(g, opt.rho_a);
    const graphot::NodeVector rho_b = graphot::load_density(g, opt.rho_b);

    const auto t0 = std::chrono::steady_clock::now();
    const graphot::GeodesicSolution sol =
        graphot::solve_geodesic(g, graphot::TimeGrid(opt.n), {rho_a, rho_b}, solver_config(opt));
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    print_iteration_log(sol);

    std::printf("distance   %.12g\n", sol.distance);
    std::printf("iterations %ld%s\n", sol.iterations, sol.converged ? "" : " (not converged)");
    std::printf("stopping   %.3e\n", sol.final_stopping);
    std::printf("ce_resid   %.3e\n", sol.final_ce_residual);

    if (!opt.out.empty()) {
        std::ofstream out(opt.out);
        if (!out) throw std::runtime_error("cannot write " + opt.out);
        out << run_report(opt, sol, wall).dump(2) << '\n';
    }
    return sol.converged ? 0 : 3;
}

int cmd_geodesic(const CommonOptions& opt) {
    const graphot::MarkovGraph g = load_graph(opt);
    const graphot::NodeVector rho_a = graphot::load_density(g, opt.rho_a);
    const graphot::NodeVector rho_b = graphot::load_density(g, opt.rho_b);

    const auto t0 = std::chrono::steady_clock::now();
    const graphot::GeodesicSolution sol =
        graphot::solve_geodesic(g, graphot::TimeGrid(opt.n), {rho_a, rho_b}, solver_config(opt));
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    print_iteration_log(sol);

    const std::string base = opt.out.empty() ? std::string("geodesic") : opt.out;
    if (opt.format == "csv") {
        graphot::write_geodesic_csv(g, sol.state.rho, sol.state.m, base);
    } else {
        graphot::write_geodesic_json(g, sol.state.rho, sol.state.m, base + ".json");
    }
    {
        std::ofstream out(base + ".report.json");
        if (!out) throw std::runtime_error("cannot write " + base + ".report.json");
        out << run_report(opt, sol, wall).dump(2) << '\n';
    }
    std::printf("distance   %.12g\n", sol.distance);
    std::printf("iterations %ld%s\n", sol.iterations, sol.converged ? "" : " (not converged)");
    return sol.converged ? 0 : 3;
}

int cmd_jko(const CommonOptions& opt, double tau_jko, int steps, const std::string& entropy_name,
            double renyi_m, bool euler_compare) {
    const graphot::MarkovGraph g = load_graph(opt);
    const graphot::NodeVector rho0 = graphot::load_density(g, opt.rho_a);
    const graphot::EntropyKind kind = entropy_name == "shannon" ? graphot::EntropyKind::shannon()
                                                                : graphot::EntropyKind::renyi(renyi_m);

    const graphot::FlowTrajectory flow =
        graphot::jko_flow(g, rho0, tau_jko, steps, graphot::TimeGrid(opt.n), solver_config(opt), kind);
    if (!flow.completed) {
        std::fprintf(stderr, "jko flow aborted after %zu steps\n", flow.states.size() - 1);
    }

    const std::string base = opt.out.empty() ? std::string("jko") : opt.out;
    if (opt.format == "csv") {
        graphot::write_flow_csv(flow, base + ".csv");
    } else {
        std::ofstream out(base + ".json");
        out << graphot::flow_to_json(flow).dump(2) << '\n';
    }
    if (euler_compare) {
        const graphot::FlowTrajectory ref =
            kind.tag == graphot::EntropyKind::Tag::Shannon
                ? graphot::euler_heat_flow(g, rho0, tau_jko, steps)
                : graphot::euler_porous_flow(g, rho0, tau_jko, steps, kind.m);
        if (opt.format == "csv") {
            graphot::write_flow_csv(ref, base + ".euler.csv");
        } else {
            std::ofstream out(base + ".euler.json");
            out << graphot::flow_to_json(ref).dump(2) << '\n';
        }
    }
    std::printf("steps      %zu\n", flow.states.size() - 1);
    std::printf("entropy0   %.12g\n", flow.entropy_values.front());
    std::printf("entropyN   %.12g\n", flow.entropy_values.back());
    return flow.completed ? 0 : 3;
}

int cmd_validate(const std::string& suite_name) {
    graphot::validate::SuiteResult suite;
    suite = graphot::validate::run_suite(suite_name);
    bool ok = true;
    for (const auto& r : suite.results) {
        std::printf("[%s] %-40s value=%-13.6g threshold=%-10.4g %s\n", r.passed ? "PASS" : "FAIL",
                    r.id.c_str(), r.value, r.threshold, r.detail.c_str());
        ok = ok && r.passed;
    }
    return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete transportation distances on Markov graphs"};
    app.require_subcommand(1);

    CommonOptions dist_opt, geo_opt, jko_opt;
    double tau_jko = 1e-3;
    int jko_steps = 50;
    std::string entropy_name = "shannon";
    double renyi_m = 0.5;
    bool euler_compare = false;
    std::string suite_name;

    CLI::App* dist = app.add_subcommand("distance", "compute W_h between two densities");
    add_common(dist, dist_opt, true);

    CLI::App* geo = app.add_subcommand("geodesic", "compute the geodesic and export it");
    add_common(geo, geo_opt, true);

    CLI::App* jko = app.add_subcommand("jko", "entropy gradient flow by JKO stepping");
    add_common(jko, jko_opt, false);
    jko->add_option("--tau-jko", tau_jko, "outer JKO step size")->check(CLI::PositiveNumber);
    jko->add_option("--steps", jko_steps, "number of JKO steps")->check(CLI::PositiveNumber);
    jko->add_option("--entropy", entropy_name, "entropy functional")
        ->check(CLI::IsMember({"shannon", "renyi"}));
    jko->add_option("--renyi-m", renyi_m, "Renyi exponent in (0,1)");
    jko->add_flag("--euler-compare", euler_compare, "also emit the explicit Euler reference flow");

    CLI::App* val = app.add_subcommand("validate", "run a validation suite");
    val->add_option("suite", suite_name, "operators|projections|two-node|metric|cube|chain|jko|all")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (dist->parsed()) return cmd_distance(dist_opt);
        if (geo->parsed()) return cmd_geodesic(geo_opt);
        if (jko->parsed())
            return cmd_jko(jko_opt, tau_jko, jko_steps, entropy_name, renyi_m, euler_compare);
        if (val->parsed()) {
            if (suite_name == "all") {
                int rc = 0;
                for (const std::string& s : graphot::validate::suite_names())
                    rc = std::max(rc, cmd_validate(s));
                return rc;
            }
            return cmd_validate(suite_name);
        }
    } catch (const std::invalid_argument& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 2;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 3;
    }
    return 2;
}
