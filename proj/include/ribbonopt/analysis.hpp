#pragma once
////////////////////////////////////////////////////////////////////////////////
// analysis.hpp
//
// Singular points of a framing (theta in pi/2 + pi*Z, where kappa_n = 0) and
// numerical certificates for the quantitative statements about them:
//
//  * interval bound  |theta(a) - theta(b)| >= A (b-a) - B^(1/2) (b-a)^(3/4) E_I^(1/4)
//    with A = min|tau|, B = max|kappa cos theta| on [a, b];
//  * lower bound on the number of singular points of a minimizer when tau is
//    constant and |tau| > n*pi/l + max|kappa|;
//  * an explicit isolation radius around a singular point with tau != 0;
//  * coercivity  Lambda^2 E >= ||theta'||_4^4 / 16 - Lambda^4 l  and the
//    Morrey (Hoelder-3/4) estimate.
//
// On the discrete level A, B and E_I are all taken at the quadrature
// midpoints; with those choices the interval bound, coercivity and Morrey
// inequalities hold exactly for the piecewise-linear framing, so any
// violation beyond rounding is a bug.
////////////////////////////////////////////////////////////////////////////////

#include "energy.hpp"
#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

namespace ribbonopt {

/// Absolute slack granted to every certified inequality.
inline constexpr double certificate_tol = 1e-9;

namespace detail {

inline double level(long k) { return std::numbers::pi / 2.0 + static_cast<double>(k) * std::numbers::pi; }

inline long nearest_level(double theta) {
    return std::lround((theta - std::numbers::pi / 2.0) / std::numbers::pi);
}

// Root of cos(theta(t)) for theta linear on [t0, t1] with theta(t0) = v0,
// theta(t1) = v1, restricted to the part of the segment where exactly the
// level k is within pi/2.
inline double bisect_level(double t0, double t1, double v0, double v1, long k, double tol) {
    const double L = level(k);
    auto theta = [&](double t) { return v0 + (v1 - v0) * (t - t0) / (t1 - t0); };
    auto t_at = [&](double v) { return t0 + (t1 - t0) * (v - v0) / (v1 - v0); };
    const double half = std::numbers::pi / 2.0;
    double lo = std::clamp(t_at(v1 > v0 ? L - half : L + half), t0, t1);
    double hi = std::clamp(t_at(v1 > v0 ? L + half : L - half), t0, t1);
    const bool neg_lo = std::cos(theta(lo)) < 0.0;
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double g = std::cos(theta(mid));
        if (std::abs(g) <= tol || hi - lo <= 1e-16 * std::max(1.0, std::abs(hi))) break;
        if ((g < 0.0) == neg_lo)
            lo = mid;
        else
            hi = mid;
    }
    return mid;
}

} // namespace detail

/// Scans cos(theta) on the piecewise-linear framing. Every level crossed
/// inside a segment is located by bisection; nodes with |cos theta| <= tol
/// are crossings when theta passes through the level there and tangencies
/// otherwise. A run of consecutive on-level nodes is a single tangency.
inline std::vector<SingularPoint> find_singular_points(const FramingField& f, double refine_tol = 1e-12) {
    if (!(refine_tol > 0.0)) throw InvalidArgument("refine_tol must be positive");
    const int n = f.intervals();
    const auto& th = f.theta;
    std::vector<char> on(n + 1);
    std::vector<long> kn(n + 1);
    for (int i = 0; i <= n; ++i) {
        on[i] = std::abs(std::cos(th[i])) <= refine_tol;
        kn[i] = detail::nearest_level(th[i]);
    }
    std::vector<SingularPoint> out;
    auto side = [&](int i, long k) {
        const double d = th[i] - detail::level(k);
        return (d > 0.0) - (d < 0.0);
    };

    for (int i = 0; i <= n;) {
        if (!on[i]) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 <= n && on[j + 1] && kn[j + 1] == kn[i]) ++j;
        const long k = kn[i];
        const int before = i > 0 ? side(i - 1, k) : 0;
        const int after = j < n ? side(j + 1, k) : 0;
        SingularPoint sp;
        sp.k = k;
        if (i == j && before * after < 0) {
            sp.kind = SingularKind::crossing;
            sp.t = f.grid.node(i);
            sp.bracket = {f.grid.node(std::max(i - 1, 0)), f.grid.node(std::min(i + 1, n))};
        } else {
            sp.kind = SingularKind::tangency;
            sp.t = 0.5 * (f.grid.node(i) + f.grid.node(j));
            sp.bracket = {f.grid.node(i), f.grid.node(j)};
        }
        out.push_back(sp);
        i = j + 1;
    }

    for (int i = 0; i < n; ++i) {
        const double v0 = th[i], v1 = th[i + 1];
        if (v0 == v1) continue;
        const double lo = std::min(v0, v1), hi = std::max(v0, v1);
        const long kmin = static_cast<long>(std::ceil((lo - std::numbers::pi / 2.0) / std::numbers::pi));
        const long kmax = static_cast<long>(std::floor((hi - std::numbers::pi / 2.0) / std::numbers::pi));
        for (long k = kmin - 1; k <= kmax + 1; ++k) {
            const double L = detail::level(k);
            if (!(L > lo && L < hi)) continue;
            if ((on[i] && kn[i] == k) || (on[i + 1] && kn[i + 1] == k)) continue;
            SingularPoint sp;
            sp.k = k;
            sp.kind = SingularKind::crossing;
            sp.t = detail::bisect_level(f.grid.node(i), f.grid.node(i + 1), v0, v1, k, refine_tol);
            sp.bracket = {f.grid.node(i), f.grid.node(i + 1)};
            out.push_back(sp);
        }
    }

    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    std::vector<SingularPoint> uniq;
    for (const auto& sp : out)
        if (uniq.empty() || sp.t - uniq.back().t > 1e-9 || sp.k != uniq.back().k) uniq.push_back(sp);
    return uniq;
}

struct IntervalBound {
    double a = 0.0, b = 0.0;
    double A = 0.0;   ///< min |tau| over the quadrature points in [a, b]
    double B = 0.0;   ///< max |kappa cos theta| over the quadrature points in [a, b]
    double E_I = 0.0;
    double lhs = 0.0;  ///< |theta(a) - theta(b)|
    double rhs = 0.0;  ///< A (b-a) - B^(1/2) (b-a)^(3/4) E_I^(1/4)
    bool violated = false;
};

inline IntervalBound check_interval_lemma(const FieldSamples& fs, const FramingField& f, int a_idx, int b_idx) {
    detail::check_grid(fs, f);
    if (a_idx < 0 || b_idx > f.intervals() || a_idx >= b_idx)
        throw InvalidArgument("interval indices must satisfy 0 <= a < b <= N");
    int sign = 0;
    auto track = [&](double tau) {
        const int s = (tau > 0.0) - (tau < 0.0);
        if (s == 0 || (sign != 0 && s != sign)) throw TorsionVanishes("torsion vanishes or changes sign on the interval");
        sign = s;
    };
    for (int i = a_idx; i <= b_idx; ++i) track(fs.tau_nodes[i]);
    IntervalBound r;
    r.a = f.grid.node(a_idx);
    r.b = f.grid.node(b_idx);
    r.A = std::numeric_limits<double>::infinity();
    for (int i = a_idx; i < b_idx; ++i) {
        track(fs.tau_mid[i]);
        r.A = std::min(r.A, std::abs(fs.tau_mid[i]));
        r.B = std::max(r.B, std::abs(fs.kappa_mid[i] * std::cos(f.mid_value(i))));
    }
    r.E_I = energy_E_interval(fs, f, a_idx, b_idx);
    const double len = r.b - r.a;
    r.lhs = std::abs(f.theta[a_idx] - f.theta[b_idx]);
    r.rhs = r.A * len - std::sqrt(r.B) * std::pow(len, 0.75) * std::pow(r.E_I, 0.25);
    if (std::isnan(r.rhs)) r.rhs = -std::numeric_limits<double>::infinity();  // B = 0 with E_I = inf
    r.violated = r.lhs < r.rhs - certificate_tol;
    return r;
}

/// True when every sample of tau agrees with the first one to 1e-12.
inline bool torsion_is_constant(const FieldSamples& fs) {
    const double t0 = fs.tau_nodes.front();
    for (auto* v : {&fs.tau_nodes, &fs.tau_mid})
        for (double x : *v)
            if (std::abs(x - t0) > 1e-12) return false;
    return true;
}

inline double max_abs_kappa(const FieldSamples& fs) {
    double m = 0.0;
    for (auto* v : {&fs.kappa_nodes, &fs.kappa_mid})
        for (double x : *v) m = std::max(m, std::abs(x));
    return m;
}

/// Largest n with |tau| > n*pi/l + max|kappa| (0 if none, or tau not constant).
inline int count_threshold(const FieldSamples& fs) {
    if (!torsion_is_constant(fs)) return 0;
    const double x = (std::abs(fs.tau_nodes.front()) - max_abs_kappa(fs)) * fs.grid.length / std::numbers::pi;
    if (!(x > 0.0)) return 0;
    int n = static_cast<int>(std::ceil(x)) - 1;
    return std::max(n, 0);
}

struct CountCheck {
    bool applicable = false;
    int count = 0;
    bool pass = true;
};

inline CountCheck verify_count_theorem(const CurveSpec& c, const SolveResult& result, int n) {
    if (n < 1) throw InvalidArgument("n must be a positive integer");
    if (!result.converged) throw InvalidArgument("count check needs a converged solve");
    const FieldSamples fs = eval_fields(c, result.theta_min.intervals());
    CountCheck out;
    out.count = static_cast<int>(find_singular_points(result.theta_min).size());
    out.applicable = torsion_is_constant(fs) &&
                     std::abs(fs.tau_nodes.front()) > n * std::numbers::pi / c.length() + max_abs_kappa(fs);
    out.pass = !out.applicable || out.count >= n;
    return out;
}

struct IsolationRadius {
    double eps_star = 0.0;
    double eps_cont = 0.0;   ///< |theta(t) - theta(t0)| <= pi on the window
    double eps_quant = 0.0;  ///< min_{I_eps}|tau| = Lambda^(1/4) eps^(1/8) E^(3/8)
    double tau_at_point = 0.0;
};

namespace detail {

// min |tau| over the grid samples inside [t0 - eps, t0 + eps] and at its clipped ends.
inline double min_abs_tau(const CurveSpec& c, const FieldSamples& fs, double t0, double eps) {
    const double lo = std::max(0.0, t0 - eps), hi = std::min(c.length(), t0 + eps);
    double m = std::min({std::abs(c.tau(lo)), std::abs(c.tau(hi)), std::abs(c.tau(t0))});
    const Grid& g = fs.grid;
    for (int i = 0; i <= g.intervals; ++i)
        if (g.node(i) >= lo && g.node(i) <= hi) m = std::min(m, std::abs(fs.tau_nodes[i]));
    for (int i = 0; i < g.intervals; ++i)
        if (g.midpoint(i) >= lo && g.midpoint(i) <= hi) m = std::min(m, std::abs(fs.tau_mid[i]));
    return m;
}

// Distance from t0 to the first point in direction dir where |theta - ref| > pi.
inline double window_reach(const FramingField& f, double t0, double ref, int dir) {
    const Grid& g = f.grid;
    const double h = g.h();
    int i = std::clamp(static_cast<int>(std::floor(t0 / h)), 0, g.intervals - 1);
    double t_prev = t0, v_prev = f(t0);
    int node = dir > 0 ? i + 1 : i;
    if (dir < 0 && g.node(node) >= t0) --node;
    for (; node >= 0 && node <= g.intervals; node += dir) {
        const double t = g.node(node), v = f.theta[node];
        if (std::abs(v - ref) > std::numbers::pi) {
            const double target = v > ref ? ref + std::numbers::pi : ref - std::numbers::pi;
            const double w = (target - v_prev) / (v - v_prev);
            return std::abs(t_prev + w * (t - t_prev) - t0);
        }
        t_prev = t;
        v_prev = v;
    }
    return std::numeric_limits<double>::infinity();
}

} // namespace detail

/// Radius eps* = min(eps_cont, eps_quant) of a window around a singular point
/// that contains no other singular point at the same level.
inline IsolationRadius isolation_radius(const CurveSpec& c, const FramingField& f, const SingularPoint& sp) {
    const FieldSamples fs = eval_fields(c, f.intervals());
    const double E = energy_E(fs, f).E_value;
    if (!std::isfinite(E)) throw InvalidArgument("isolation radius needs a framing of finite energy");
    IsolationRadius r;
    r.tau_at_point = c.tau(sp.t);
    if (r.tau_at_point == 0.0) throw ZeroTorsionAtPoint("torsion vanishes at the singular point t=" + std::to_string(sp.t));
    const double l = c.length();
    const double lam = lambda_bound(fs);
    const double scale = std::pow(lam, 0.25) * std::pow(E, 0.375);
    auto phi = [&](double eps) { return detail::min_abs_tau(c, fs, sp.t, eps) - scale * std::pow(eps, 0.125); };
    if (phi(l) > 0.0) {
        r.eps_quant = l;
    } else if (const double floor_eps = 1e-300 * l; !(phi(floor_eps) > 0.0)) {
        r.eps_quant = 0.0;
    } else {
        // bisection in log(eps): the root can be many decades below l
        double lo = std::log(floor_eps), hi = std::log(l);
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            (phi(std::exp(mid)) > 0.0 ? lo : hi) = mid;
        }
        r.eps_quant = std::exp(lo);
    }
    const double ref = detail::level(sp.k);
    r.eps_cont = std::min({detail::window_reach(f, sp.t, ref, +1), detail::window_reach(f, sp.t, ref, -1), l});
    r.eps_star = std::min(r.eps_cont, r.eps_quant);
    return r;
}

struct ProbeResult {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = true;
};

/// Lambda^2 E >= ||theta'||_4^4 / 16 - Lambda^4 l.
inline ProbeResult coercivity_probe(const FieldSamples& fs, const FramingField& f) {
    const double lam = lambda_bound(fs);
    const double E = energy_E(fs, f).E_value;
    ProbeResult r;
    r.lhs = lam * lam * E;
    r.rhs = slope_l4_pow4(f) / 16.0 - lam * lam * lam * lam * fs.grid.length;
    r.pass = r.lhs >= r.rhs - certificate_tol;
    return r;
}

/// The same bound with the literal subtracted term 2*Lambda*l. Reported for
/// information only: this constant is not implied by the argument.
inline ProbeResult coercivity_probe_literal(const FieldSamples& fs, const FramingField& f) {
    const double lam = lambda_bound(fs);
    ProbeResult r;
    r.lhs = lam * lam * energy_E(fs, f).E_value;
    r.rhs = slope_l4_pow4(f) / 16.0 - 2.0 * lam * fs.grid.length;
    r.pass = r.lhs >= r.rhs - certificate_tol;
    return r;
}

/// max over node pairs of |theta_i - theta_j| against |t_i - t_j|^(3/4) ||theta'||_4.
/// lhs/rhs are those of the pair with the smallest margin.
inline ProbeResult morrey_probe(const FramingField& f) {
    const double norm = std::pow(slope_l4_pow4(f), 0.25);
    const int n = f.intervals();
    ProbeResult r;
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            const double lhs = std::abs(f.theta[i] - f.theta[j]);
            const double rhs = std::pow(f.grid.node(j) - f.grid.node(i), 0.75) * norm;
            if (lhs - rhs > worst) {
                worst = lhs - rhs;
                r.lhs = lhs;
                r.rhs = rhs;
            }
        }
    r.pass = worst <= certificate_tol;
    return r;
}

struct IsolationCheck {
    bool applicable = false;  ///< some singular point with tau != 0 exists
    int pairs_checked = 0;
    int violations = 0;
    std::vector<IsolationRadius> radii;  ///< parallel to the point list; eps_star = 0 where not applicable
};

/// Every pair of singular points on the same level must be farther apart than
/// either point's isolation radius.
inline IsolationCheck check_isolation(const CurveSpec& c, const FramingField& f,
                                      const std::vector<SingularPoint>& points) {
    IsolationCheck out;
    std::vector<char> ok(points.size(), 0);
    for (const auto& sp : points) {
        IsolationRadius r;
        try {
            r = isolation_radius(c, f, sp);
            ok[out.radii.size()] = 1;
            out.applicable = true;
        } catch (const ZeroTorsionAtPoint&) {
        }
        out.radii.push_back(r);
    }
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (!ok[i] || !ok[j] || points[i].k != points[j].k) continue;
            ++out.pairs_checked;
            const double gap = std::abs(points[j].t - points[i].t);
            if (!(gap > std::max(out.radii[i].eps_star, out.radii[j].eps_star))) ++out.violations;
        }
    return out;
}

} // namespace ribbonopt
