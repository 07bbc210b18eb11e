#pragma once

#include "graphot/graph.hpp"
#include "graphot/means.hpp"
#include "graphot/prox.hpp"
#include "graphot/time_grid.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace graphot {

// ---------------------------------------------------------------------------
// Exact two-node solution: closed-form distance integral and geodesic ODE.
// ---------------------------------------------------------------------------

/// Densities on the two point graph parametrized by r in [-1, 1]:
/// rho(r) = ((p+q)/q (1-r)/2, (p+q)/p (1+r)/2).
struct TwoNodeExact {
    double p = 1.0;
    double q = 1.0;
    MeanKind mean = MeanKind::Logarithmic;

    std::pair<double, double> rho(double r) const {
        return {(p + q) / q * 0.5 * (1.0 - r), (p + q) / p * 0.5 * (1.0 + r)};
    }
    double theta_at(double r) const {
        const auto [a, b] = rho(r);
        return theta(mean, std::max(a, 0.0), std::max(b, 0.0));
    }
};

namespace detail {

/// Adaptive Gauss-Kronrod (G7, K15) with absolute tolerance and interval
/// bisection. The error estimate uses the usual nonlinear rescaling of
/// |K15 - G7| against the centered absolute integral, which converges much
/// faster than the raw difference near integrable endpoint singularities.
template <typename F>
double adaptive_gk15(F&& f, double a, double b, double tol, int depth = 0) {
    static const double xk[8] = {0.0,
                                 0.2077849550078985,
                                 0.4058451513773972,
                                 0.5860872354676911,
                                 0.7415311855993945,
                                 0.8648644233597691,
                                 0.9491079123427585,
                                 0.9914553711208126};
    static const double wk[8] = {0.2094821410847278, 0.2044329400752989, 0.1903505780647854,
                                 0.1690047266392679, 0.1406532597155259, 0.1047900103222502,
                                 0.0630920926299786, 0.0229353220105292};
    static const double wg[4] = {0.4179591836734694, 0.3818300505051189, 0.2797053914892767,
                                 0.1294849661688697};

    const double c = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    double fv_all[15];
    fv_all[0] = f(c);
    double k15 = wk[0] * fv_all[0];
    double g7 = wg[0] * fv_all[0];
    double resabs = wk[0] * std::abs(fv_all[0]);
    for (int i = 1; i < 8; ++i) {
        const double lo = f(c - hw * xk[i]);
        const double hi = f(c + hw * xk[i]);
        fv_all[2 * i - 1] = lo;
        fv_all[2 * i] = hi;
        k15 += wk[i] * (lo + hi);
        resabs += wk[i] * (std::abs(lo) + std::abs(hi));
        if (i % 2 == 0) g7 += wg[i / 2] * (lo + hi);
    }
    const double center = 0.5 * k15;
    double resasc = wk[0] * std::abs(fv_all[0] - center);
    for (int i = 1; i < 8; ++i)
        resasc += wk[i] * (std::abs(fv_all[2 * i - 1] - center) + std::abs(fv_all[2 * i] - center));
    k15 *= hw;
    g7 *= hw;
    resabs *= hw;
    resasc *= hw;

    double err = std::abs(k15 - g7);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
    // power-law endpoint singularities refine along a single deep chain of
    // leaves, so the depth cap is generous; work stays linear in the depth
    if (err <= std::max(tol, floor) || depth >= 100) {
        if (depth >= 100 && err > std::max(100 * tol, floor))
            throw std::runtime_error("adaptive quadrature did not converge");
        return k15;
    }
    return adaptive_gk15(f, a, c, 0.5 * tol, depth + 1) + adaptive_gk15(f, c, b, 0.5 * tol, depth + 1);
}

}  // namespace detail

/// W(rho(alpha), rho(beta)) by adaptive quadrature of
///   1/2 sqrt(1/p + 1/q) int_alpha^beta theta(rho(r))^{-1/2} dr.
/// The endpoint singularities at r = +-1 (theta -> 0) are removed by the
/// substitutions r = -1 + s^2 and r = 1 - s^2 on the two halves.
inline double two_node_distance(const TwoNodeExact& e, double alpha, double beta, double abs_tol = 1e-9) {
    if (!(alpha >= -1.0 && beta <= 1.0 && alpha <= beta))
        throw std::invalid_argument("two_node_distance: need -1 <= alpha <= beta <= 1");
    if (alpha == beta) return 0.0;

    const double mid = 0.5 * (alpha + beta);
    auto left = [&](double s) {  // r = -1 + s^2
        if (s == 0.0) return 0.0;
        const double th = e.theta_at(-1.0 + s * s);
        return th > 0.0 ? 2.0 * s / std::sqrt(th) : 0.0;
    };
    auto right = [&](double s) {  // r = 1 - s^2
        if (s == 0.0) return 0.0;
        const double th = e.theta_at(1.0 - s * s);
        return th > 0.0 ? 2.0 * s / std::sqrt(th) : 0.0;
    };
    const double i_left = detail::adaptive_gk15(left, std::sqrt(1.0 + alpha), std::sqrt(1.0 + mid),
                                                0.5 * abs_tol);
    const double i_right = detail::adaptive_gk15(right, std::sqrt(1.0 - beta), std::sqrt(1.0 - mid),
                                                 0.5 * abs_tol);
    return 0.5 * std::sqrt(1.0 / e.p + 1.0 / e.q) * (i_left + i_right);
}

/// Explicit Euler trajectory of the two-node geodesic parameter:
///   gamma' = 2 W sqrt(pq/(p+q) theta(rho(gamma))), gamma(0) = alpha.
/// (Differentiating W(rho(alpha), rho(gamma(t))) = t W along the
/// constant-speed geodesic gives exactly this rate; the traversal time
/// integral of 1/gamma' from alpha to beta then equals 1.)
/// Terminal error |gamma(1) - beta| is reported.
struct TwoNodeOdeResult {
    std::vector<double> times;
    std::vector<double> gamma;
    double distance = 0.0;        // the W used in the right-hand side
    double terminal_error = 0.0;  // |gamma(1) - beta|
};

inline TwoNodeOdeResult two_node_geodesic_ode(const TwoNodeExact& e, double alpha, double beta,
                                              int n_steps) {
    if (n_steps < 1) throw std::invalid_argument("two_node_geodesic_ode: need at least one step");
    TwoNodeOdeResult out;
    out.distance = two_node_distance(e, alpha, beta);
    const double speed = 2.0 * out.distance;
    const double coupling = e.p * e.q / (e.p + e.q);
    const double dt = 1.0 / n_steps;

    double gamma = alpha;
    // gamma' vanishes where theta does, so the constant curve is also a
    // solution there; a machine-scale nudge moves the explicit Euler onto
    // the geodesic branch when starting from the degenerate endpoint.
    if (e.theta_at(gamma) == 0.0 && beta > alpha) gamma = alpha + 1e-12 * (beta - alpha);
    out.times.reserve(n_steps + 1);
    out.gamma.reserve(n_steps + 1);
    out.times.push_back(0.0);
    out.gamma.push_back(gamma);
    for (int k = 1; k <= n_steps; ++k) {
        gamma += dt * speed * std::sqrt(coupling * e.theta_at(gamma));
        gamma = std::min(gamma, 1.0);
        out.times.push_back(k * dt);
        out.gamma.push_back(gamma);
    }
    out.terminal_error = std::abs(out.gamma.back() - beta);
    return out;
}

// ---------------------------------------------------------------------------
// Brute-force projection oracles (independent of the normal-cone logic).
// ---------------------------------------------------------------------------

/// Nearest point of B = {p + q^2/4 <= 0} by scanning the boundary parabola
/// and refining around the best sample by ternary search.
inline std::pair<double, double> oracle_project_B(double p, double q, int resolution = 4000) {
    if (p + 0.25 * q * q <= 0.0) return {p, q};
    const double extent = 2.0 * (std::abs(q) + std::sqrt(std::abs(p)) + 2.0);
    auto dist2 = [&](double t) {
        const double dp = p + 0.25 * t * t;
        const double dq = q - t;
        return dp * dp + dq * dq;
    };
    double best_t = 0.0, best = dist2(0.0);
    for (int i = 0; i <= resolution; ++i) {
        const double t = -extent + 2.0 * extent * i / resolution;
        const double d = dist2(t);
        if (d < best) {
            best = d;
            best_t = t;
        }
    }
    double lo = best_t - 2.0 * extent / resolution;
    double hi = best_t + 2.0 * extent / resolution;
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (dist2(m1) <= dist2(m2)) hi = m2;
        else lo = m1;
    }
    const double t = 0.5 * (lo + hi);
    return {-0.25 * t * t, t};
}

/// Nearest point of K = {0 <= p3 <= theta(p1,p2)} by scanning candidate
/// faces: bottom clamp, origin, axis points, and the upper surface along
/// log-spaced ray directions with exact ray projection, refined by ternary
/// search in the log parameter.
inline std::array<double, 3> oracle_project_K(MeanKind kind, const std::array<double, 3>& p,
                                              int resolution = 4000) {
    const auto [p1, p2, p3] = p;
    if (p1 >= 0.0 && p2 >= 0.0 && p3 >= 0.0 && p3 <= theta(kind, p1, p2)) return p;

    auto dist2 = [&](const std::array<double, 3>& c) {
        const double d1 = c[0] - p1, d2 = c[1] - p2, d3 = c[2] - p3;
        return d1 * d1 + d2 * d2 + d3 * d3;
    };
    std::array<double, 3> best{std::max(p1, 0.0), std::max(p2, 0.0), 0.0};
    double best_d = dist2(best);
    auto consider = [&](const std::array<double, 3>& c) {
        const double d = dist2(c);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    };
    consider({0.0, 0.0, 0.0});
    if (p1 > 0.0) consider({p1, 0.0, 0.0});
    if (p2 > 0.0) consider({0.0, p2, 0.0});

    // far-ray surface points (a, eps, p3) with theta(a, eps) = p3: these sit
    // beyond any practical scan of the ray parameter when eps is tiny, yet
    // carry finite height because theta decays slowly toward the axes.
    // eps is solved by bisection in v = log(a/eps).
    auto wall_candidate = [&](double a, bool first_axis) {
        if (!(a > 0.0) || !(p3 > 0.0) || p3 >= a) return;
        double lo = 0.0, hi = 800.0;
        for (int it = 0; it < 200; ++it) {
            const double v = 0.5 * (lo + hi);
            (theta(kind, a, a * std::exp(-v)) > p3 ? lo : hi) = v;
        }
        const double eps = a * std::exp(-0.5 * (lo + hi));
        consider(first_axis ? std::array<double, 3>{a, eps, p3} : std::array<double, 3>{eps, a, p3});
    };
    wall_candidate(p1, true);
    wall_candidate(p2, false);

    auto surface_candidate = [&](double u) {
        const SurfacePoint sp = surface_point(kind, std::exp(u));
        const double wsq = sp.w[0] * sp.w[0] + sp.w[1] * sp.w[1] + sp.w[2] * sp.w[2];
        const double tau = std::max((p1 * sp.w[0] + p2 * sp.w[1] + p3 * sp.w[2]) / wsq, 0.0);
        return std::array<double, 3>{tau * sp.w[0], tau * sp.w[1], tau * sp.w[2]};
    };
    const double range = 40.0;
    double best_u = 0.0, best_ud = dist2(surface_candidate(0.0));
    for (int i = 0; i <= resolution; ++i) {
        const double u = -range + 2.0 * range * i / resolution;
        const double d = dist2(surface_candidate(u));
        if (d < best_ud) {
            best_ud = d;
            best_u = u;
        }
    }
    double lo = best_u - 2.0 * range / resolution;
    double hi = best_u + 2.0 * range / resolution;
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (dist2(surface_candidate(m1)) <= dist2(surface_candidate(m2))) hi = m2;
        else lo = m1;
    }
    consider(surface_candidate(0.5 * (lo + hi)));
    return best;
}

/// Dense KKT solve of the continuity-equation projection on a small
/// instance, in the h-weighted norm. In free mode the endpoint block carries
/// the extra h||rho_B - rho_B_in||_pi^2 term. Used to validate CEProjector.
struct OracleCEInput {
    DensityPath rho;
    IntervalEdgeField m;
    NodeVector rho_a;
    NodeVector rho_b;          // fixed mode: pinned value; free mode: the rho_B input
    bool free_endpoint = false;
};

struct OracleCEOutput {
    DensityPath rho;
    IntervalEdgeField m;
    NodeVector rho_b;
};

inline OracleCEOutput oracle_project_CE(const MarkovGraph& g, const OracleCEInput& in) {
    const int n = in.rho.grid.n_intervals;
    const int nx = g.vertex_count();
    const int ne = g.edge_count();
    const double h = in.rho.grid.h();
    const int n_rho = (n + 1) * nx;
    const int n_var = n_rho + n * ne;
    const int n_con = n * nx + (in.free_endpoint ? nx : 2 * nx);

    auto rho_idx = [nx](int i, int x) { return i * nx + x; };
    auto m_idx = [&](int i, int e) { return n_rho + i * ne + e; };

    Eigen::VectorXd weight = Eigen::VectorXd::Zero(n_var);
    Eigen::VectorXd target = Eigen::VectorXd::Zero(n_var);
    for (int i = 0; i <= n; ++i)
        for (int x = 0; x < nx; ++x) {
            weight[rho_idx(i, x)] = h * g.pi()[x];
            target[rho_idx(i, x)] = weight[rho_idx(i, x)] * in.rho.values[i][x];
        }
    for (int i = 0; i < n; ++i)
        for (int e = 0; e < ne; ++e) {
            weight[m_idx(i, e)] = h * 0.5 * g.edge(e).q * g.pi()[g.edge(e).from];
            target[m_idx(i, e)] = weight[m_idx(i, e)] * in.m.values[i][e];
        }
    if (in.free_endpoint) {
        // rho(t_N) doubles as rho_B: two quadratic terms on the same block.
        for (int x = 0; x < nx; ++x) {
            weight[rho_idx(n, x)] += h * g.pi()[x];
            target[rho_idx(n, x)] += h * g.pi()[x] * in.rho_b[x];
        }
    }

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_con, n_var);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n_con);
    int row = 0;
    const double inv_h = static_cast<double>(n);
    for (int i = 0; i < n; ++i)
        for (int x = 0; x < nx; ++x, ++row) {
            a(row, rho_idx(i + 1, x)) = inv_h;
            a(row, rho_idx(i, x)) = -inv_h;
            auto [eb, ee] = g.out_edges(x);
            for (int e = eb; e < ee; ++e) {
                a(row, m_idx(i, g.reverse_edge(e))) += 0.5 * g.edge(e).q;
                a(row, m_idx(i, e)) -= 0.5 * g.edge(e).q;
            }
        }
    for (int x = 0; x < nx; ++x, ++row) {
        a(row, rho_idx(0, x)) = 1.0;
        c[row] = in.rho_a[x];
    }
    if (!in.free_endpoint)
        for (int x = 0; x < nx; ++x, ++row) {
            a(row, rho_idx(n, x)) = 1.0;
            c[row] = in.rho_b[x];
        }

    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n_var + n_con, n_var + n_con);
    kkt.topLeftCorner(n_var, n_var) = weight.asDiagonal();
    kkt.topRightCorner(n_var, n_con) = a.transpose();
    kkt.bottomLeftCorner(n_con, n_var) = a;
    Eigen::VectorXd rhs(n_var + n_con);
    rhs << target, c;
    const Eigen::VectorXd z = kkt.fullPivLu().solve(rhs);

    OracleCEOutput out{in.rho, in.m, NodeVector(nx)};
    for (int i = 0; i <= n; ++i)
        for (int x = 0; x < nx; ++x) out.rho.values[i][x] = z[rho_idx(i, x)];
    for (int i = 0; i < n; ++i)
        for (int e = 0; e < ne; ++e) out.m.values[i][e] = z[m_idx(i, e)];
    out.rho_b = out.rho.values[n];
    return out;
}

/// Relative gap between an analytic directional derivative and a central
/// finite difference of f at x in the given direction.
inline double finite_difference_check(const std::function<double(double)>& f, double x,
                                      double analytic_derivative, double step = 1e-6) {
    const double diff = (f(x + step) - f(x - step)) / (2.0 * step);
    const double scale = std::max({1.0, std::abs(analytic_derivative), std::abs(diff)});
    return std::abs(diff - analytic_derivative) / scale;
}

}  // namespace graphot
