#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace graphot {

/// Admissible averaging functions: concave, symmetric, 1-homogeneous means
/// with theta(0,s) = 0 and theta(s,s) = s. The arithmetic mean is not
/// admissible and deliberately absent.
///
/// Extension point: a new mean is a struct with the five static operations
/// of LogMean/GeoMean below (theta, partials, axis_limit, superdiff_origin,
/// surface); the projection machinery in prox.hpp is templated on it.
enum class MeanKind { Logarithmic, Geometric };

inline const char* mean_name(MeanKind k) {
    return k == MeanKind::Logarithmic ? "log" : "geo";
}

/// Point on the upper surface of the subgraph K = {0 <= v <= theta(s,t)},
/// parametrized along the ray direction q:
///   w(q) = (q^{1/2}, q^{-1/2}, theta(q^{1/2}, q^{-1/2}))
///   n(q) = (-d1 theta, -d2 theta, 1) at that point (outward normal).
struct SurfacePoint {
    double q;
    double w[3];
    double n[3];
};

/// theta and both partials evaluated at (e^{u/2}, e^{-u/2}); used by the
/// surface root finds, where the log-ratio u is the natural variable.
/// d1u, d2u are the u-derivatives of the partials along the curve, used for
/// Newton steps.
struct SurfaceEval {
    double w1, w2;    // e^{u/2}, e^{-u/2}
    double theta;     // theta(w1, w2)
    double d1, d2;    // partial derivatives at (w1, w2)
    double d1u, d2u;  // d/du of d1, d2
};

namespace detail {

constexpr double kDiagonalGuard = 1e-4;  // |log(s/t)| below this: Taylor path

/// (e^w - 1 - w) / w^2. For the logarithmic mean this is the first partial
/// along the unit-geometric-mean curve: d1 theta(s,t) = shape(log(t/s)).
/// Continuously extended by 1/2 at w = 0; 4th order Taylor inside the guard
/// band, where the direct formula cancels catastrophically.
inline double log_partial_shape(double w) {
    if (std::abs(w) < kDiagonalGuard) {
        return 0.5 + w / 6.0 + w * w / 24.0 + w * w * w / 120.0 + w * w * w * w / 720.0;
    }
    return (std::expm1(w) - w) / (w * w);
}

/// d/dw of log_partial_shape = ((e^w - 1) w - 2 (e^w - 1 - w)) / w^3.
inline double log_partial_shape_deriv(double w) {
    if (std::abs(w) < kDiagonalGuard) {
        return 1.0 / 6.0 + w / 12.0 + w * w / 40.0;
    }
    const double em = std::expm1(w);
    return (em * w - 2.0 * (em - w)) / (w * w * w);
}

/// Logarithmic mean for s, t > 0 via the stable ratio form
/// theta = s * d / log1p(d) with d = (t - s)/s; Taylor on the diagonal.
/// Ordered so that d >= 0 (d near -1 would lose all precision in log1p).
inline double log_mean_positive(double s, double t) {
    if (s > t) std::swap(s, t);
    const double u = std::log(s / t);
    if (std::abs(u) < kDiagonalGuard) {
        const double u2 = u * u;
        return std::sqrt(s * t) * (1.0 + u2 / 24.0 + u2 * u2 / 1920.0);
    }
    const double d = (t - s) / s;
    if (!std::isfinite(d)) return (t - s) / (std::log(t) - std::log(s));
    return s * d / std::log1p(d);
}

}  // namespace detail

/// Operations of the logarithmic mean theta(s,t) = (t - s)/(log t - log s).
struct LogMean {
    static constexpr MeanKind kind = MeanKind::Logarithmic;

    static double theta(double s, double t) {
        if (s == 0.0 || t == 0.0) return 0.0;
        return detail::log_mean_positive(s, t);
    }

    /// (d1, d2); requires s, t > 0. d1 = (r - 1 - log r)/log^2 r with r = t/s.
    static std::pair<double, double> partials(double s, double t) {
        const double v = std::log(t / s);
        return {detail::log_partial_shape(v), detail::log_partial_shape(-v)};
    }

    /// lim_{z->0} d2 theta(s, z) for s > 0.
    static double axis_limit(double /*s*/) { return std::numeric_limits<double>::infinity(); }

    /// Membership of z in the superdifferential of theta at the origin.
    /// Swaps z so that z1 >= z2 and inverts d1 theta(q^{-1/2}, q^{1/2}) on
    /// q in [1, inf) by safeguarded Newton in u = log q.
    static bool superdiff_origin(double z1, double z2) {
        if (!(std::min(z1, z2) > 0.0)) return false;
        if (z1 < z2) std::swap(z1, z2);
        if (z1 < 0.5) return false;  // max below 1/2: outside
        // Solve shape(u) = z1, shape increasing from 1/2 at u = 0.
        double hi = 1.0;
        while (detail::log_partial_shape(hi) < z1 && hi < 708.0) hi *= 2.0;
        hi = std::min(hi, 708.0);
        double lo = 0.0;
        double u = std::min(hi, 1.0);
        const double tol = 1e-12 * std::max(1.0, z1);
        for (int it = 0; it < 100; ++it) {
            const double f = detail::log_partial_shape(u) - z1;
            if (std::abs(f) <= tol) break;
            if (f > 0.0) hi = u;
            else lo = u;
            const double step = f / detail::log_partial_shape_deriv(u);
            double next = u - step;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            u = next;
        }
        return z2 >= detail::log_partial_shape(-u);
    }

    /// theta and partials at (e^{u/2}, e^{-u/2}); here log(t/s) = -u exactly.
    /// Everything derives from a single expm1: e^{-u}-1 = -em/(1+em).
    static SurfaceEval surface(double u) {
        SurfaceEval ev;
        if (std::abs(u) < detail::kDiagonalGuard) {
            const double u2 = u * u;
            ev.w1 = 1.0 + 0.5 * u + 0.125 * u2 + u2 * u / 48.0;
            ev.w2 = 1.0 - 0.5 * u + 0.125 * u2 - u2 * u / 48.0;
            ev.theta = 1.0 + u2 / 24.0 + u2 * u2 / 1920.0;
            ev.d1 = detail::log_partial_shape(-u);
            ev.d2 = detail::log_partial_shape(u);
            ev.d1u = -detail::log_partial_shape_deriv(-u);
            ev.d2u = detail::log_partial_shape_deriv(u);
            return ev;
        }
        const double em = std::expm1(u);          // e^u - 1
        const double em_m = -em / (1.0 + em);     // e^{-u} - 1
        const double inv_u2 = 1.0 / (u * u);
        ev.w1 = std::sqrt(1.0 + em);
        ev.w2 = 1.0 / ev.w1;
        ev.theta = (ev.w1 - ev.w2) / u;
        ev.d1 = (em_m + u) * inv_u2;
        ev.d2 = (em - u) * inv_u2;
        ev.d1u = -(em_m * u + 2.0 * (em_m + u)) * inv_u2 / u;
        ev.d2u = (em * u - 2.0 * (em - u)) * inv_u2 / u;
        return ev;
    }
};

/// Operations of the geometric mean theta(s,t) = sqrt(s t).
struct GeoMean {
    static constexpr MeanKind kind = MeanKind::Geometric;

    static double theta(double s, double t) { return std::sqrt(s * t); }

    static std::pair<double, double> partials(double s, double t) {
        const double r = std::sqrt(t / s);
        return {0.5 * r, 0.5 / r};
    }

    static double axis_limit(double /*s*/) { return std::numeric_limits<double>::infinity(); }

    /// Closed form: z in superdiff(0) iff z1 z2 >= 1/4 and min(z) > 0.
    static bool superdiff_origin(double z1, double z2) {
        return std::min(z1, z2) > 0.0 && z1 * z2 >= 0.25;
    }

    static SurfaceEval surface(double u) {
        SurfaceEval ev;
        ev.w1 = std::exp(0.5 * u);
        ev.w2 = 1.0 / ev.w1;
        ev.theta = 1.0;
        ev.d1 = 0.5 * ev.w2;  // 1/2 sqrt(t/s)
        ev.d2 = 0.5 * ev.w1;
        ev.d1u = -0.25 * ev.w2;
        ev.d2u = 0.25 * ev.w1;
        return ev;
    }
};

namespace detail {
template <typename F>
auto dispatch_mean(MeanKind kind, F&& f) {
    return kind == MeanKind::Logarithmic ? f(LogMean{}) : f(GeoMean{});
}
}  // namespace detail

/// Mean value theta(s,t) for s, t >= 0. Negative input is a domain error
/// (conceptually theta = -inf off the closed quadrant).
inline double theta(MeanKind kind, double s, double t) {
    if (s < 0.0 || t < 0.0) throw std::domain_error("theta: negative argument");
    return detail::dispatch_mean(kind, [&](auto m) { return decltype(m)::theta(s, t); });
}

/// (d1 theta, d2 theta) for s, t > 0; both positive, and by 1-homogeneity
/// s d1 + t d2 = theta(s,t).
inline std::pair<double, double> theta_partials(MeanKind kind, double s, double t) {
    if (!(s > 0.0) || !(t > 0.0)) throw std::domain_error("theta_partials: arguments must be positive");
    return detail::dispatch_mean(kind, [&](auto m) { return decltype(m)::partials(s, t); });
}

/// One-sided limit of the partial derivative toward the axis,
/// lim_{t->0+} d2 theta(s,t) for s > 0. +inf for both implemented means.
inline double boundary_partial_limit(MeanKind kind, double s) {
    if (!(s > 0.0)) throw std::domain_error("boundary_partial_limit: s must be positive");
    return detail::dispatch_mean(kind, [&](auto m) { return decltype(m)::axis_limit(s); });
}

/// Whether z lies in the superdifferential of theta at the origin, i.e.
/// theta(p) <= <z, p> for all p >= 0. Total function.
inline bool in_superdifferential_at_origin(MeanKind kind, double z1, double z2) {
    return detail::dispatch_mean(kind, [&](auto m) { return decltype(m)::superdiff_origin(z1, z2); });
}

/// Surface point w(q), n(q) on the graph of theta; q > 0.
inline SurfacePoint surface_point(MeanKind kind, double q) {
    if (!(q > 0.0)) throw std::domain_error("surface_point: q must be positive");
    const SurfaceEval ev =
        detail::dispatch_mean(kind, [&](auto m) { return decltype(m)::surface(std::log(q)); });
    return SurfacePoint{q, {ev.w1, ev.w2, ev.theta}, {-ev.d1, -ev.d2, 1.0}};
}

}  // namespace graphot
