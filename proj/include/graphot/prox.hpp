#pragma once

#include "graphot/graph.hpp"
#include "graphot/means.hpp"
#include "graphot/parallel.hpp"
#include "graphot/time_grid.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace graphot {

// ---------------------------------------------------------------------------
// Projection onto B = {(p,q) : p + q^2/4 <= 0}, the conjugate domain of the
// Benamou-Brenier integrand.
// ---------------------------------------------------------------------------


/// Euclidean projection onto B. Interior points are fixed; otherwise the
/// nearest boundary point (-t^2/4, t) is found from the stationarity cubic
/// t^3/4 + (p+2) t - 2q = 0, which has a unique real root for points
/// outside B. Newton from t0 = sign(q) max(|q|,1), bisection safeguarded.
inline std::pair<double, double> project_parabola_B(double p, double q) {
    if (p + 0.25 * q * q <= 0.0) return {p, q};
    if (q == 0.0) return {0.0, 0.0};

    const double sign = q > 0.0 ? 1.0 : -1.0;
    const double qa = std::abs(q);
    auto g = [&](double t) { return 0.25 * t * t * t + (p + 2.0) * t - 2.0 * qa; };
    auto dg = [&](double t) { return 0.75 * t * t + (p + 2.0); };

    // g(0) = -2|q| < 0; grow hi until the sign flips.
    double lo = 0.0;
    double hi = std::max(qa, 1.0);
    while (g(hi) < 0.0) hi *= 2.0;

    double t = std::max(qa, 1.0);
    const double tol = 1e-14 * (1.0 + std::abs(p) + qa * qa);
    for (int it = 0; it < 100; ++it) {
        const double val = g(t);
        if (std::abs(val) <= tol) break;
        if (val > 0.0) hi = t;
        else lo = t;
        const double d = dg(t);
        double next = d != 0.0 ? t - val / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        t = next;
    }
    return {-0.25 * t * t, sign * t};
}

// ---------------------------------------------------------------------------
// Projection onto K = {(p1,p2,p3) : 0 <= p3 <= theta(p1,p2)}.
// ---------------------------------------------------------------------------

namespace detail {

/// Root find on the upper surface: p projects to tau * w(e^u) where u is the
/// unique root of f(u) = <p, w x n>(e^u). f is positive left of the root and
/// negative right of it. Secant steps with a bisection safeguard.
///
/// The root can run off to +-inf when p3 is small against the coordinate
/// hugging the wall of the subgraph (for the logarithmic mean u* ~ p1/p3):
/// past the search range the projection equals its wall limit (p1, 0, p3)
/// (resp. (0, p2, p3)) to double precision, with displacement -p2 e2 exactly
/// in the normal cone.
template <typename Mean>
std::array<double, 3> project_K_top_impl(double p1, double p2, double p3) {
    const double scale = std::max({std::abs(p1), std::abs(p2), std::abs(p3)});
    const double a1 = p1 / scale, a2 = p2 / scale, a3 = p3 / scale;

    struct Cross {
        double f;      // <p, w x n>
        double df;     // d/du of f
        double norm;   // scale of the cross vector, for the tolerance
    };
    auto eval = [&](double u) -> Cross {
        const SurfaceEval ev = Mean::surface(u);
        const double w1u = 0.5 * ev.w1;
        const double w2u = -0.5 * ev.w2;
        const double thu = ev.d1 * w1u + ev.d2 * w2u;
        const double c1 = ev.w2 + ev.theta * ev.d2;
        const double c2 = -(ev.w1 + ev.theta * ev.d1);
        const double c3 = ev.w2 * ev.d1 - ev.w1 * ev.d2;
        const double c1u = w2u + thu * ev.d2 + ev.theta * ev.d2u;
        const double c2u = -(w1u + thu * ev.d1 + ev.theta * ev.d1u);
        const double c3u = w2u * ev.d1 + ev.w2 * ev.d1u - w1u * ev.d2 - ev.w1 * ev.d2u;
        return {a1 * c1 + a2 * c2 + a3 * c3, a1 * c1u + a2 * c2u + a3 * c3u,
                std::max({std::abs(c1), std::abs(c2), std::abs(c3)})};
    };

    // f has a unique root u* with f > 0 for u < u* and f < 0 past it, so a
    // single loop serves as Newton, bracket growth, and bisection at once:
    // every evaluation sharpens one bracket side, Newton proposals are
    // clamped into the known bracket, and a bisection is forced whenever |f|
    // fails to halve over two steps (Newton rejected or stagnating; the
    // magnitudes of f across a fresh bracket can differ by hundreds of
    // orders, which would stall secant- or falsi-type updates).
    constexpr double kRange = 400.0;  // exp(1.5 * 400) stays below DBL_MAX
    double u = (p1 > 0.0 && p2 > 0.0) ? std::log(p1 / p2) : 0.0;
    u = std::clamp(u, -kRange + 1.0, kRange - 1.0);

    double lo = -kRange, hi = kRange;
    bool lo_seen = false, hi_seen = false;
    double grow = 1.0;
    double root = u;
    Cross cu = eval(u);
    double f_one_ago = std::numeric_limits<double>::infinity();
    double f_two_ago = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200; ++it) {
        if (std::abs(cu.f) <= 1e-13 * std::max(1.0, cu.norm)) {
            root = u;
            break;
        }
        if (cu.f > 0.0) {
            lo = u;
            lo_seen = true;
        } else {
            hi = u;
            hi_seen = true;
        }
        root = lo_seen && hi_seen ? 0.5 * (lo + hi) : u;
        if (hi - lo <= 1e-15 * (1.0 + std::abs(u))) break;

        // Newton is for the endgame only: steps are trust-capped (marching
        // covers long distances geometrically, and an uncapped step from a
        // flat region can fling the iterate into the exponential regime,
        // where Newton crawls back at O(1) per step).
        double next = cu.df != 0.0 ? u - cu.f / cu.df : std::numeric_limits<double>::quiet_NaN();
        const bool newton_ok = std::isfinite(next) && next > lo && next < hi &&
                               std::abs(next - u) <= 8.0 && std::abs(cu.f) <= 0.5 * f_two_ago;
        if (!newton_ok) {
            if (lo_seen && hi_seen) {
                next = 0.5 * (lo + hi);
            } else if (lo_seen) {  // march right
                next = u + grow;
                grow *= 2.0;
                if (next > kRange) return {std::max(p1, 0.0), 0.0, std::max(p3, 0.0)};
            } else {  // march left
                next = u - grow;
                grow *= 2.0;
                if (next < -kRange) return {0.0, std::max(p2, 0.0), std::max(p3, 0.0)};
            }
        }
        f_two_ago = f_one_ago;
        f_one_ago = std::abs(cu.f);
        u = next;
        cu = eval(u);
    }

    const SurfaceEval ev = Mean::surface(root);
    const double w_sq = ev.w1 * ev.w1 + ev.w2 * ev.w2 + ev.theta * ev.theta;
    const double tau = (p1 * ev.w1 + p2 * ev.w2 + p3 * ev.theta) / w_sq;
    if (!(tau > 0.0)) {
        std::ostringstream msg;
        msg << "project_K_top: non-positive ray parameter for p = (" << p1 << ", " << p2 << ", " << p3 << ")";
        throw std::runtime_error(msg.str());
    }
    return {tau * ev.w1, tau * ev.w2, tau * ev.theta};
}

/// Case analysis of the normal cones of K. The axis branches apply only to
/// means with finite boundary partial limits; for the logarithmic and
/// geometric means the limits are +inf and those branches never fire.
template <typename Mean>
std::array<double, 3> project_K_impl(double p1, double p2, double p3) {
    if (p1 >= 0.0 && p2 >= 0.0 && p3 >= 0.0 && p3 <= Mean::theta(p1, p2)) return {p1, p2, p3};
    if (p3 <= 0.0) return {std::max(p1, 0.0), std::max(p2, 0.0), 0.0};
    if (p1 > 0.0 && p2 <= 0.0) {
        if (-p2 / p3 >= Mean::axis_limit(p1)) return {p1, 0.0, 0.0};
    } else if (p1 <= 0.0 && p2 > 0.0) {
        if (-p1 / p3 >= Mean::axis_limit(p2)) return {0.0, p2, 0.0};
    } else if (p1 <= 0.0 && p2 <= 0.0) {
        if (Mean::superdiff_origin(-p1 / p3, -p2 / p3)) return {0.0, 0.0, 0.0};
    }
    return project_K_top_impl<Mean>(p1, p2, p3);
}

}  // namespace detail

/// Euclidean projection of (theta-, theta+, vartheta) onto K.
inline std::array<double, 3> project_K(MeanKind kind, double p1, double p2, double p3) {
    return detail::dispatch_mean(kind, [&](auto m) { return detail::project_K_impl<decltype(m)>(p1, p2, p3); });
}

/// Upper-surface branch alone (preconditions: the case analysis has routed
/// here). Exposed for testing the root find in isolation.
inline std::array<double, 3> project_K_top(MeanKind kind, double p1, double p2, double p3) {
    return detail::dispatch_mean(kind,
                                 [&](auto m) { return detail::project_K_top_impl<decltype(m)>(p1, p2, p3); });
}

/// Pointwise projection onto K per interval and edge.
inline void project_K_field(MeanKind kind, IntervalEdgeField& theta_minus, IntervalEdgeField& theta_plus,
                            IntervalEdgeField& vartheta, int threads = 1) {
    const int n = theta_minus.grid.n_intervals;
    parallel_for(n, threads, [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            EdgeVector& tm = theta_minus.values[i];
            EdgeVector& tp = theta_plus.values[i];
            EdgeVector& vt = vartheta.values[i];
            for (int e = 0; e < tm.size(); ++e) {
                const auto pr = project_K(kind, tm[e], tp[e], vt[e]);
                tm[e] = pr[0];
                tp[e] = pr[1];
                vt[e] = pr[2];
            }
        }
    });
}

/// prox of the conjugate edge action: pointwise projection onto B applied to
/// the dual pair (p, q) = (vartheta star, m star). A projection, hence
/// independent of the step size sigma.
inline void prox_dual_edge_action(IntervalEdgeField& p, IntervalEdgeField& q, int threads = 1) {
    const int n = p.grid.n_intervals;
    parallel_for(n, threads, [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            EdgeVector& pi_ = p.values[i];
            EdgeVector& qi = q.values[i];
            for (int e = 0; e < pi_.size(); ++e) {
                const auto pr = project_parabola_B(pi_[e], qi[e]);
                pi_[e] = pr.first;
                qi[e] = pr.second;
            }
        }
    });
}

// ---------------------------------------------------------------------------
// J+- : q(t_i,x) = theta-(t_i,x,y), q(t_i,y) = theta+(t_i,x,y)
// ---------------------------------------------------------------------------

/// Projection onto J+- in the weighted norm. The free variable is the node
/// field; optimality with detailed balance gives, per vertex,
///   q_pr(x) = (q(x) + 1/2 sum_y Q(x,y)(theta-(x,y) + theta+(y,x)))
///             / (1 + sum_y Q(x,y)),
/// after which both edge fields copy the node values.
inline void project_Jpm(const MarkovGraph& g, IntervalNodeField& q, IntervalEdgeField& theta_minus,
                        IntervalEdgeField& theta_plus, int threads = 1) {
    const int n = q.grid.n_intervals;
    parallel_for(n, threads, [&](int begin, int end) {
        NodeVector acc(g.vertex_count());
        for (int i = begin; i < end; ++i) {
            acc.setZero();
            const EdgeVector& tm = theta_minus.values[i];
            const EdgeVector& tp = theta_plus.values[i];
            for (int e = 0; e < g.edge_count(); ++e) {
                const DirectedEdge& ed = g.edge(e);
                acc[ed.from] += ed.q * (tm[e] + tp[g.reverse_edge(e)]);
            }
            NodeVector& qp = q.values[i];
            for (int x = 0; x < g.vertex_count(); ++x)
                qp[x] = (qp[x] + 0.5 * acc[x]) / (1.0 + g.row_sum(x));
            EdgeVector& tm2 = theta_minus.values[i];
            EdgeVector& tp2 = theta_plus.values[i];
            for (int e = 0; e < g.edge_count(); ++e) {
                tm2[e] = qp[g.edge(e).from];
                tp2[e] = qp[g.edge(e).to];
            }
        }
    });
}

/// Moreau: prox of the conjugate indicator of the subspace J+- is
/// id - proj_{J+-}; sigma independent.
inline void prox_dual_Jpm(const MarkovGraph& g, IntervalNodeField& q, IntervalEdgeField& theta_minus,
                          IntervalEdgeField& theta_plus, int threads = 1) {
    IntervalNodeField q_pr = q;
    IntervalEdgeField tm_pr = theta_minus;
    IntervalEdgeField tp_pr = theta_plus;
    project_Jpm(g, q_pr, tm_pr, tp_pr, threads);
    for (int i = 0; i < q.grid.n_intervals; ++i) {
        q.values[i] -= q_pr.values[i];
        theta_minus.values[i] -= tm_pr.values[i];
        theta_plus.values[i] -= tp_pr.values[i];
    }
}

// ---------------------------------------------------------------------------
// J_avg : rho_bar = avg_h rho, with the known endpoint values pinned.
// ---------------------------------------------------------------------------

enum class JavgMode {
    FixedEndpoints,  // rho(t_0) = rho_A and rho(t_N) = rho_B pinned
    FreeEndpoint,    // only rho(t_0) = rho_A pinned (free-endpoint problems)
};

/// Projection onto J_avg-hat. Per vertex the Lagrange multiplier solves a
/// tridiagonal system; diagonal entries are 1 + (free nodes of the
/// element)/4 and off-diagonal entries 1/4, strictly diagonally dominant.
/// For N = 1 this degenerates to a single equation (coefficient 1 when both
/// endpoints are pinned, 5/4 when the right one is free).
inline void project_Javg(DensityPath& rho, IntervalNodeField& rho_bar, const BoundaryPair& bc,
                         JavgMode mode = JavgMode::FixedEndpoints) {
    const int n = rho.grid.n_intervals;
    const int nx = static_cast<int>(rho.values[0].size());
    const bool pin_end = mode == JavgMode::FixedEndpoints;

    // Thomas factorization of the shared tridiagonal matrix.
    std::vector<double> diag(n), upper_ratio(n, 0.0);
    for (int i = 0; i < n; ++i) {
        int free_nodes = 0;
        if (i > 0) ++free_nodes;                  // left node of element i
        if (i < n - 1 || !pin_end) ++free_nodes;  // right node
        diag[i] = 1.0 + 0.25 * free_nodes;
    }
    std::vector<double> denom(n);
    denom[0] = diag[0];
    for (int i = 1; i < n; ++i) {
        upper_ratio[i - 1] = 0.25 / denom[i - 1];
        denom[i] = diag[i] - 0.25 * upper_ratio[i - 1];
    }

    std::vector<double> rhs(n);
    for (int x = 0; x < nx; ++x) {
        for (int i = 0; i < n; ++i) {
            const double left = i == 0 ? bc.rho_a[x] : rho.values[i][x];
            const double right = (i == n - 1 && pin_end) ? bc.rho_b[x] : rho.values[i + 1][x];
            rhs[i] = rho_bar.values[i][x] - 0.5 * (left + right);
        }
        for (int i = 1; i < n; ++i) rhs[i] -= 0.25 * rhs[i - 1] / denom[i - 1];
        rhs[n - 1] /= denom[n - 1];
        for (int i = n - 2; i >= 0; --i) rhs[i] = rhs[i] / denom[i] - upper_ratio[i] * rhs[i + 1];

        // rhs now holds the multiplier lambda per element.
        for (int i = 1; i < n; ++i) rho.values[i][x] += 0.5 * (rhs[i - 1] + rhs[i]);
        rho.values[0][x] = bc.rho_a[x];
        if (pin_end) rho.values[n][x] = bc.rho_b[x];
        else rho.values[n][x] += 0.5 * rhs[n - 1];
        for (int i = 0; i < n; ++i) rho_bar.values[i][x] -= rhs[i];
    }
}

/// prox of the conjugate indicator of the affine set J_avg-hat via Moreau:
/// v - sigma proj(v / sigma). The pins make the set affine rather than
/// linear, so sigma does not cancel.
inline void prox_dual_Javg(DensityPath& rho, IntervalNodeField& rho_bar, const BoundaryPair& bc,
                           double sigma = 1.0, JavgMode mode = JavgMode::FixedEndpoints) {
    DensityPath rho_pr = rho;
    IntervalNodeField bar_pr = rho_bar;
    const double inv = 1.0 / sigma;
    for (auto& v : rho_pr.values) v *= inv;
    for (auto& v : bar_pr.values) v *= inv;
    project_Javg(rho_pr, bar_pr, bc, mode);
    for (std::size_t i = 0; i < rho.values.size(); ++i) rho.values[i] -= sigma * rho_pr.values[i];
    for (std::size_t i = 0; i < rho_bar.values.size(); ++i) rho_bar.values[i] -= sigma * bar_pr.values[i];
}

// ---------------------------------------------------------------------------
// J= : rho_bar = q, projection is the pointwise average.
// ---------------------------------------------------------------------------

inline void project_Jeq(IntervalNodeField& rho_bar, IntervalNodeField& q) {
    for (int i = 0; i < rho_bar.grid.n_intervals; ++i) {
        rho_bar.values[i] = 0.5 * (rho_bar.values[i] + q.values[i]);
        q.values[i] = rho_bar.values[i];
    }
}

// ---------------------------------------------------------------------------
// Entropy prox (free-endpoint / JKO mode).
// ---------------------------------------------------------------------------

/// Entropy functionals paired with the transport metric: Shannon
/// sum rho log rho pi, or Renyi 1/(m-1) sum rho^m pi with m in (0,1).
struct EntropyKind {
    enum class Tag { Shannon, Renyi };
    Tag tag = Tag::Shannon;
    double m = 0.5;

    static EntropyKind shannon() { return {Tag::Shannon, 0.0}; }
    static EntropyKind renyi(double m) {
        if (!(m > 0.0 && m < 1.0)) throw std::invalid_argument("EntropyKind: Renyi exponent must be in (0,1)");
        return {Tag::Renyi, m};
    }
};

/// prox of sigma (2 tau H)^* with respect to h ||.||_pi, via Moreau. The
/// per-vertex primal problem min_{y>=0} (h/2)(y-w)^2 + (2 tau/sigma) f(y)
/// (f = y log y or y^m/(m-1)) is solved by safeguarded Newton; pi cancels.
inline NodeVector prox_dual_entropy(const NodeVector& v, double sigma, double tau_jko, double h,
                                    EntropyKind kind = EntropyKind::shannon()) {
    if (!(sigma > 0.0) || !(h > 0.0) || tau_jko < 0.0)
        throw std::invalid_argument("prox_dual_entropy: bad step parameters");
    if (tau_jko == 0.0) return NodeVector::Zero(v.size());

    const double c = 2.0 * tau_jko / (sigma * h);
    const bool shannon = kind.tag == EntropyKind::Tag::Shannon;
    const double m = kind.m;
    const double cm = shannon ? 0.0 : c * m / (m - 1.0);  // negative for m in (0,1)

    NodeVector out(v.size());
    for (int x = 0; x < v.size(); ++x) {
        const double w = v[x] / sigma;
        // psi(y) = (y - w) + c (log y + 1)            (Shannon)
        //        = (y - w) + cm y^(m-1)               (Renyi)
        // psi is increasing from -inf at 0+, so the positive root is unique.
        auto psi = [&](double y) {
            return shannon ? (y - w) + c * (std::log(y) + 1.0) : (y - w) + cm * std::pow(y, m - 1.0);
        };
        auto dpsi = [&](double y) {
            return shannon ? 1.0 + c / y : 1.0 + c * m * std::pow(y, m - 2.0);
        };
        double lo = 0.0;
        double hi = std::max(w, 1.0);
        while (psi(hi) < 0.0) hi *= 2.0;
        double y = std::clamp(std::max(w, 1e-12), 1e-300, hi);
        const double tol = 1e-12 * std::max(1.0, std::abs(w));
        for (int it = 0; it < 200; ++it) {
            const double f = psi(y);
            if (std::abs(f) <= tol) break;
            if (f > 0.0) hi = y;
            else lo = y;
            double next = y - f / dpsi(y);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            y = std::max(next, 1e-300);
        }
        out[x] = v[x] - sigma * y;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Projection onto the discrete continuity equation.
// ---------------------------------------------------------------------------

struct CEProjection {
    DensityPath rho;
    IntervalEdgeField m;
    NodeVector rho_b;            // free mode: projected endpoint
    IntervalNodeField multiplier;  // Lagrange multiplier phi
};

/// Projector onto CE_h(rho_A, rho_B) (fixed endpoints) or CE_h(rho_A) (free
/// endpoint), in the h-weighted space norm. The space-time elliptic matrix
/// is assembled once per (graph, grid, mode) and its sparse LU factorization
/// is cached; in fixed mode the matrix is singular with constant kernel and
/// is augmented by the mean-zero constraint row. Immutable after
/// construction; solves are reentrant.
class CEProjector {
  public:
    enum class Mode { FixedEndpoints, FreeEndpoint };

    CEProjector(const MarkovGraph& g, TimeGrid grid, Mode mode)
        : g_(&g), grid_(grid), mode_(mode) {
        const int n = grid.n_intervals;
        const int nx = g.vertex_count();
        const int dim = n * nx;
        const int size = mode == Mode::FixedEndpoints ? dim + 1 : dim;
        const double inv_h2 = static_cast<double>(n) * n;

        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<std::size_t>(dim) * 4 + g.edge_count() * n + dim);
        auto idx = [nx](int i, int x) { return i * nx + x; };

        // Time block: -(1/h^2) L_time (x) diag(pi). L_time is the Neumann
        // second-difference matrix; the free endpoint adds 1/2 to the last
        // diagonal entry (the endpoint update carries the factor 1/2).
        for (int i = 0; i < n; ++i) {
            double d = 0.0;
            if (i > 0) d += 1.0;
            if (i < n - 1) d += 1.0;
            if (i == n - 1 && mode == Mode::FreeEndpoint) d += 0.5;
            for (int x = 0; x < nx; ++x) {
                const double pix = g.pi()[x];
                if (d != 0.0) trip.emplace_back(idx(i, x), idx(i, x), -inv_h2 * d * pix);
                if (i > 0) trip.emplace_back(idx(i, x), idx(i - 1, x), inv_h2 * pix);
                if (i < n - 1) trip.emplace_back(idx(i, x), idx(i + 1, x), inv_h2 * pix);
            }
        }
        // Space block: pi(x) Laplacian, symmetric by detailed balance.
        for (int i = 0; i < n; ++i) {
            for (int e = 0; e < g.edge_count(); ++e) {
                const DirectedEdge& ed = g.edge(e);
                trip.emplace_back(idx(i, ed.from), idx(i, ed.to), g.pi()[ed.from] * ed.q);
            }
            for (int x = 0; x < nx; ++x)
                trip.emplace_back(idx(i, x), idx(i, x), -g.pi()[x] * g.row_sum(x));
        }
        if (mode == Mode::FixedEndpoints) {
            for (int k = 0; k < dim; ++k) {
                trip.emplace_back(k, dim, 1.0);
                trip.emplace_back(dim, k, 1.0);
            }
        }

        Eigen::SparseMatrix<double> s(size, size);
        s.setFromTriplets(trip.begin(), trip.end());
        s.makeCompressed();
        lu_.compute(s);
        if (lu_.info() != Eigen::Success)
            throw std::runtime_error("CEProjector: factorization of the space-time system failed");
    }

    Mode mode() const { return mode_; }
    const TimeGrid& grid() const { return grid_; }

    /// Fixed endpoints. Requires equal boundary masses.
    CEProjection project_fixed(const DensityPath& rho, const IntervalEdgeField& m,
                               const BoundaryPair& bc) const {
        if (mode_ != Mode::FixedEndpoints) throw std::logic_error("CEProjector: wrong mode");
        const double mass_a = inner_node(*g_, NodeVector::Ones(g_->vertex_count()), bc.rho_a);
        const double mass_b = inner_node(*g_, NodeVector::Ones(g_->vertex_count()), bc.rho_b);
        if (std::abs(mass_a - mass_b) > 1e-8)
            throw std::invalid_argument("CEProjector: boundary masses differ");
        return solve(rho, m, bc.rho_a, &bc.rho_b, nullptr);
    }

    /// Free endpoint: projects (rho, m, rho_B) onto CE_h(rho_A).
    CEProjection project_free(const DensityPath& rho, const IntervalEdgeField& m, const NodeVector& rho_B,
                              const NodeVector& rho_A) const {
        if (mode_ != Mode::FreeEndpoint) throw std::logic_error("CEProjector: wrong mode");
        return solve(rho, m, rho_A, nullptr, &rho_B);
    }

  private:
    CEProjection solve(const DensityPath& rho, const IntervalEdgeField& m, const NodeVector& rho_a,
                       const NodeVector* rho_b_pin, const NodeVector* rho_b_free) const {
        const int n = grid_.n_intervals;
        const int nx = g_->vertex_count();
        const int dim = n * nx;
        const double inv_h = static_cast<double>(n);

        Eigen::VectorXd f = Eigen::VectorXd::Zero(mode_ == Mode::FixedEndpoints ? dim + 1 : dim);
        for (int i = 0; i < n; ++i) {
            const NodeVector div_m = divergence(*g_, m.values[i]);
            for (int x = 0; x < nx; ++x) {
                const double left = i == 0 ? rho_a[x] : rho.values[i][x];
                double right;
                if (i == n - 1) {
                    right = rho_b_pin ? (*rho_b_pin)[x] : 0.5 * (rho.values[n][x] + (*rho_b_free)[x]);
                } else {
                    right = rho.values[i + 1][x];
                }
                f[i * nx + x] = -g_->pi()[x] * (inv_h * (right - left) + div_m[x]);
            }
        }

        const Eigen::VectorXd z = lu_.solve(f);

        CEProjection out{rho, m, NodeVector(), IntervalNodeField{grid_, {}}};
        out.multiplier.values.reserve(n);
        for (int i = 0; i < n; ++i)
            out.multiplier.values.push_back(Eigen::Map<const NodeVector>(z.data() + i * nx, nx));

        out.rho.values[0] = rho_a;
        for (int i = 1; i < n; ++i)
            out.rho.values[i] = rho.values[i] +
                                inv_h * (out.multiplier.values[i] - out.multiplier.values[i - 1]);
        if (rho_b_pin) {
            out.rho.values[n] = *rho_b_pin;
        } else {
            out.rho_b = 0.5 * (rho.values[n] + *rho_b_free - inv_h * out.multiplier.values[n - 1]);
            out.rho.values[n] = out.rho_b;
        }
        for (int i = 0; i < n; ++i) out.m.values[i] = m.values[i] + gradient(*g_, out.multiplier.values[i]);
        return out;
    }

    const MarkovGraph* g_;
    TimeGrid grid_;
    Mode mode_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

}  // namespace graphot
