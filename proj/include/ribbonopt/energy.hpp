#pragma once
////////////////////////////////////////////////////////////////////////////////
// energy.hpp
//
// Discrete bending energy of a framed flat ribbon in the zero-width limit,
//
//   E(theta)   = int (k^2 cos^2 theta + (theta' + tau)^2)^2 / (k^2 cos^2 theta)
//   E_eps      = same integrand with denominator k^2 cos^2 theta + eps^2,
//
// discretized by the midpoint rule with a forward-difference slope on every
// interval. With a = k^2 cos^2(theta_mid) and b = (theta' + tau_mid)^2 the
// per-interval integrand is (a + b)^2 / (a + eps^2). For eps = 0 the value at
// a = 0 is the monotone limit sup_eps: 0 when b = 0 and +inf otherwise.
////////////////////////////////////////////////////////////////////////////////

#include "curve.hpp"
#include "framing.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace ribbonopt {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

struct FramingComponents {
    double kappa_n;
    double tau_g;
};

/// Normal curvature and geodesic torsion of the curve relative to the ribbon.
inline FramingComponents framing_components(double kappa, double tau, double theta, double theta_prime) {
    return {kappa * std::cos(theta), theta_prime + tau};
}

/// (a + b)^2 / a written as a + 2b + b^2/a, with 0^2/0 := 0 and b^2/0 := +inf.
inline double integrand_extended(double a, double b) {
    if (a == 0.0) return b == 0.0 ? 0.0 : infinity;
    return a + 2.0 * b + b * b / a;
}

inline double integrand_regularized(double a, double b, double eps) {
    const double s = a + b;
    return s * s / (a + eps * eps);
}

struct EnergyReport {
    double E_value = 0.0;
    double eps_used = 0.0;  ///< 0 means the unregularized energy
    std::vector<double> per_interval;
    double J_measure = 0.0;  ///< length covered by midpoints with a > a_tol
    int zero_a_count = 0;    ///< midpoints with a == 0 exactly
    std::vector<int> infinite_intervals;
    std::vector<SingularPoint> singular_points;  ///< filled in by the analysis layer

    bool finite() const { return std::isfinite(E_value); }
};

enum class BoundaryKind { free, dirichlet };

struct BoundaryCondition {
    BoundaryKind kind = BoundaryKind::free;
    double a = 0.0;
    double b = 0.0;

    static BoundaryCondition free() { return {}; }
    static BoundaryCondition dirichlet(double a, double b) { return {BoundaryKind::dirichlet, a, b}; }
};

namespace detail {

inline void check_grid(const FieldSamples& fs, const FramingField& f) {
    if (!(fs.grid == f.grid))
        throw GridMismatch("field samples on N=" + std::to_string(fs.grid.intervals) +
                           ", l=" + std::to_string(fs.grid.length) + " but framing on N=" +
                           std::to_string(f.grid.intervals) + ", l=" + std::to_string(f.grid.length));
}

struct IntervalParts {
    double a, b;
};

inline IntervalParts interval_parts(const FieldSamples& fs, const FramingField& f, int i) {
    const double c = std::cos(f.mid_value(i));
    const double k = fs.kappa_mid[i];
    const double r = f.slope(i) + fs.tau_mid[i];
    return {k * k * c * c, r * r};
}

// Per-interval values are formed in extended precision so that energy
// differences stay resolvable near convergence, where a Newton step changes
// E by far less than one double ulp of the total.
struct WideParts {
    long double a, b;
};

inline WideParts wide_parts(const FieldSamples& fs, const FramingField& f, int i) {
    const long double t0 = f.theta[i], t1 = f.theta[i + 1];
    const long double c = std::cos(0.5L * (t0 + t1));
    const long double k = fs.kappa_mid[i];
    const long double r = (t1 - t0) / static_cast<long double>(f.h()) + fs.tau_mid[i];
    return {k * k * c * c, r * r};
}

inline long double wide_integrand(long double a, long double b, long double eps) {
    if (eps > 0.0L) {
        const long double s = a + b;
        return s * s / (a + eps * eps);
    }
    if (a == 0.0L) return b == 0.0L ? 0.0L : static_cast<long double>(infinity);
    return a + 2.0L * b + b * b / a;
}

/// Total discrete energy in extended precision (eps = 0: unregularized).
inline long double energy_wide(const FieldSamples& fs, const FramingField& f, double eps) {
    long double acc = 0.0L;
    const long double h = f.h();
    for (int i = 0; i < f.intervals(); ++i) {
        const auto [a, b] = wide_parts(fs, f, i);
        acc += h * wide_integrand(a, b, eps);
    }
    return acc;
}

inline EnergyReport evaluate(const FieldSamples& fs, const FramingField& f, double eps) {
    check_grid(fs, f);
    const int n = f.intervals();
    const double h = f.h();
    const double lam = lambda_bound(fs);
    const double a_tol = 1e-12 * lam * lam;
    EnergyReport rep;
    rep.eps_used = eps;
    rep.per_interval.resize(n);
    int in_j = 0;
    long double total = 0.0L;
    for (int i = 0; i < n; ++i) {
        const auto [a, b] = wide_parts(fs, f, i);
        const long double v = static_cast<long double>(h) * wide_integrand(a, b, eps);
        total += v;
        rep.per_interval[i] = static_cast<double>(v);
        if (a > a_tol) ++in_j;
        if (a == 0.0L) ++rep.zero_a_count;
        if (std::isinf(v)) rep.infinite_intervals.push_back(i);
    }
    rep.J_measure = in_j * h;
    rep.E_value = rep.infinite_intervals.empty() ? static_cast<double>(total) : infinity;
    return rep;
}

} // namespace detail

inline EnergyReport energy_E(const FieldSamples& fs, const FramingField& f) { return detail::evaluate(fs, f, 0.0); }

inline EnergyReport energy_E(const CurveSpec& c, const FramingField& f) {
    if (c.length() != f.grid.length) throw GridMismatch("curve length differs from framing grid length");
    return energy_E(eval_fields(c, f.intervals()), f);
}

inline EnergyReport energy_E_eps(const FieldSamples& fs, const FramingField& f, double eps) {
    if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
    return detail::evaluate(fs, f, eps);
}

inline EnergyReport energy_E_eps(const CurveSpec& c, const FramingField& f, double eps) {
    if (c.length() != f.grid.length) throw GridMismatch("curve length differs from framing grid length");
    return energy_E_eps(eval_fields(c, f.intervals()), f, eps);
}

/// Energy restricted to the nodes [a_idx, b_idx]: sum of the intervals between them.
inline double energy_E_interval(const FieldSamples& fs, const FramingField& f, int a_idx, int b_idx) {
    detail::check_grid(fs, f);
    if (a_idx < 0 || b_idx > f.intervals() || a_idx >= b_idx)
        throw InvalidArgument("interval indices must satisfy 0 <= a < b <= N");
    long double acc = 0.0L;
    for (int i = a_idx; i < b_idx; ++i) {
        const auto [a, b] = detail::wide_parts(fs, f, i);
        acc += static_cast<long double>(f.h()) * detail::wide_integrand(a, b, 0.0);
    }
    return static_cast<double>(acc);
}

inline double energy_E_interval(const CurveSpec& c, const FramingField& f, int a_idx, int b_idx) {
    return energy_E_interval(eval_fields(c, f.intervals()), f, a_idx, b_idx);
}

/// Tridiagonal symmetric matrix: diag has N+1 entries, off has N.
struct Tridiagonal {
    std::vector<double> diag, off;
};

namespace detail {

// Partial derivatives of F(mid, slope) = f(a(mid), b(slope)) with
// f(a, b) = (a + b)^2 / (a + eps^2). eps = 0 gives the unregularized
// integrand, valid only for a > 0.
template <class Real>
struct LocalDerivs {
    Real F_m, F_s;          // first derivatives
    Real F_mm, F_ms, F_ss;  // second derivatives
};

template <class Real>
LocalDerivs<Real> local_derivs(Real kappa, Real tau, Real mid, Real slope, Real eps) {
    const Real k2 = kappa * kappa;
    const Real c = std::cos(mid), sn = std::sin(mid);
    const Real a = k2 * c * c;
    const Real a_m = -2 * k2 * sn * c;
    const Real a_mm = -2 * k2 * (c * c - sn * sn);
    const Real r = slope + tau;
    const Real b = r * r;
    const Real b_s = 2 * r;
    const Real s = a + b;
    const Real d = a + eps * eps;
    const Real f_a = 2 * s / d - s * s / (d * d);
    const Real f_b = 2 * s / d;
    const Real dms = d - s;
    const Real f_aa = 2 * dms * dms / (d * d * d);
    const Real f_ab = 2 * dms / (d * d);
    const Real f_bb = 2 / d;
    return {f_a * a_m, f_b * b_s, f_aa * a_m * a_m + f_a * a_mm, f_ab * a_m * b_s, f_bb * b_s * b_s + f_b * 2};
}

// Accumulated in extended precision: near singular points the slope
// derivatives of neighbouring intervals are large and nearly cancel.
inline std::vector<double> gradient(const FieldSamples& fs, const FramingField& f, double eps, BoundaryKind bc) {
    check_grid(fs, f);
    using W = long double;
    const int n = f.intervals();
    const W h = f.h();
    std::vector<W> g(n + 1, 0.0L);
    for (int i = 0; i < n; ++i) {
        const W t0 = f.theta[i], t1 = f.theta[i + 1];
        const auto d = local_derivs<W>(fs.kappa_mid[i], fs.tau_mid[i], 0.5L * (t0 + t1), (t1 - t0) / h, eps);
        // d/dtheta_i of h*F: mid contributes 1/2, slope contributes -1/h.
        g[i] += 0.5L * h * d.F_m - d.F_s;
        g[i + 1] += 0.5L * h * d.F_m + d.F_s;
    }
    if (bc == BoundaryKind::dirichlet) g.front() = g.back() = 0.0L;
    return std::vector<double>(g.begin(), g.end());
}

inline Tridiagonal hessian(const FieldSamples& fs, const FramingField& f, double eps) {
    check_grid(fs, f);
    const int n = f.intervals();
    const double h = f.h();
    Tridiagonal H{std::vector<double>(n + 1, 0.0), std::vector<double>(n, 0.0)};
    for (int i = 0; i < n; ++i) {
        const auto d = local_derivs<double>(fs.kappa_mid[i], fs.tau_mid[i], f.mid_value(i), f.slope(i), eps);
        // h * J^T [[F_mm, F_ms], [F_ms, F_ss]] J with J = [[1/2, 1/2], [-1/h, 1/h]].
        const double mm = 0.25 * h * d.F_mm, ss = d.F_ss / h, ms = 0.5 * d.F_ms;
        H.diag[i] += mm - 2.0 * ms + ss;
        H.diag[i + 1] += mm + 2.0 * ms + ss;
        H.off[i] += mm - ss;
    }
    return H;
}

} // namespace detail

/// Exact gradient of the discrete E_eps with respect to the node values.
/// Under Dirichlet conditions the two endpoint entries are zero.
inline std::vector<double> gradient_E_eps(const FieldSamples& fs, const FramingField& f, double eps,
                                          BoundaryKind bc = BoundaryKind::free) {
    if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
    return detail::gradient(fs, f, eps, bc);
}

inline std::vector<double> gradient_E_eps(const CurveSpec& c, const FramingField& f, double eps,
                                          BoundaryKind bc = BoundaryKind::free) {
    return gradient_E_eps(eval_fields(c, f.intervals()), f, eps, bc);
}

/// Gradient of the unregularized discrete E; requires every midpoint to have a > 0.
inline std::vector<double> gradient_E(const FieldSamples& fs, const FramingField& f,
                                      BoundaryKind bc = BoundaryKind::free) {
    for (int i = 0; i < f.intervals(); ++i)
        if (!(detail::interval_parts(fs, f, i).a > 0.0))
            throw InvalidArgument("unregularized gradient undefined at a singular midpoint");
    return detail::gradient(fs, f, 0.0, bc);
}

inline Tridiagonal hessian_E_eps(const FieldSamples& fs, const FramingField& f, double eps) {
    if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
    return detail::hessian(fs, f, eps);
}

/// Discrete ||theta'||_{L4}^4 = sum h * slope^4.
inline double slope_l4_pow4(const FramingField& f) {
    double acc = 0.0;
    for (int i = 0; i < f.intervals(); ++i) {
        const double s = f.slope(i);
        acc += f.h() * s * s * s * s;
    }
    return acc;
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace ribbonopt
