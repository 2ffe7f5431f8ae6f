#pragma once
////////////////////////////////////////////////////////////////////////////////
// solver.hpp
//
// Minimizes the unregularized energy by continuation: E_eps is minimized for
// a decreasing sequence of eps, each stage warm-started from the previous
// one, and the final framing is scored with the extended (eps = 0) energy.
// Several starts (twist-following and constant framings at eight phase
// offsets) are run and the best one is kept.
////////////////////////////////////////////////////////////////////////////////

#include "energy.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace ribbonopt {

enum class StartKind { twist, constant };

/// theta(t) = offset - int_0^t tau (twist) or theta(t) = offset (constant).
struct StartRule {
    StartKind kind = StartKind::twist;
    double offset = 0.0;
};

inline std::string describe(const StartRule& r) {
    return std::string(r.kind == StartKind::twist ? "twist" : "constant") + ":" + std::to_string(r.offset);
}

/// Eight twist-following starts followed by eight constant starts, offsets k*pi/4.
inline std::vector<StartRule> default_start_rules() {
    std::vector<StartRule> rules;
    for (StartKind kind : {StartKind::twist, StartKind::constant})
        for (int k = 0; k < 8; ++k) rules.push_back({kind, k * std::numbers::pi / 4.0});
    return rules;
}

enum class Method { newton, gradient_descent };

struct SolverConfig {
    int N = 512;
    double eps0 = 1.0;
    double eps_ratio = 0.5;
    double eps_min = 1e-4;
    double grad_tol = 0.0;  ///< <= 0 selects the default 1e-8 * N
    int max_iters = 5000;
    BoundaryCondition bc;
    std::vector<StartRule> starts = default_start_rules();
    Method method = Method::newton;

    void validate() const {
        if (N < 2) throw InvalidArgument("solver.N must be >= 2");
        if (!(eps_min > 0.0)) throw InvalidArgument("solver.eps_min must be positive");
        if (!(eps0 > eps_min)) throw InvalidArgument("solver.eps0 must exceed solver.eps_min");
        if (!(eps_ratio > 0.0 && eps_ratio < 1.0)) throw InvalidArgument("solver.eps_ratio must lie in (0, 1)");
        if (!std::isfinite(grad_tol)) throw InvalidArgument("solver.grad_tol must be finite");
        if (max_iters < 1) throw InvalidArgument("solver.max_iters must be >= 1");
        if (bc.kind == BoundaryKind::dirichlet && !(std::isfinite(bc.a) && std::isfinite(bc.b)))
            throw InvalidArgument("dirichlet endpoint values must be finite");
    }

    /// Stationarity threshold on the max-norm of the discrete gradient. The
    /// Hessian of the discrete energy grows like N, and with it the smallest
    /// gradient a line search can still resolve, hence the scaling.
    double effective_grad_tol() const { return grad_tol > 0.0 ? grad_tol : 1e-8 * N; }

    /// eps0 * ratio^k while above eps_min, then eps_min itself.
    std::vector<double> eps_schedule() const {
        std::vector<double> eps;
        for (double e = eps0; e > eps_min; e *= eps_ratio) eps.push_back(e);
        eps.push_back(eps_min);
        return eps;
    }

    /// Endpoint values actually imposed: both shifted by the 2*pi-multiple that puts a in [0, 2*pi).
    std::pair<double, double> shifted_endpoints() const {
        const double s = two_pi_shift(bc.a);
        return {bc.a + s, bc.b + s};
    }
};

inline FramingField make_start(const CurveSpec& c, const SolverConfig& cfg, const StartRule& rule) {
    const Grid g{c.length(), cfg.N};
    auto f = FramingField::from_function(g, [&](double t) {
        return rule.kind == StartKind::twist ? rule.offset - c.tau_integral(t) : rule.offset;
    });
    if (cfg.bc.kind == BoundaryKind::dirichlet) {
        const auto [a, b] = cfg.shifted_endpoints();
        const double da = a - f.theta.front();
        const double db = b - f.theta.back();
        for (int i = 0; i < g.nodes(); ++i) f.theta[i] += da + (db - da) * (g.node(i) / g.length);
        f.theta.front() = a;
        f.theta.back() = b;
    }
    return f;
}

inline std::vector<FramingField> initial_guesses(const CurveSpec& c, const SolverConfig& cfg) {
    std::vector<FramingField> out;
    for (const auto& r : cfg.starts) out.push_back(make_start(c, cfg, r));
    return out;
}

struct StageResult {
    FramingField theta;
    double E_eps = 0.0;
    double grad_norm = 0.0;  ///< max-norm of the (boundary-masked) gradient
    int iterations = 0;
    bool converged = false;
    bool stalled = false;  ///< no step >= 1e-16 decreased the energy
    std::vector<double> energy_history;  ///< E_eps after every accepted iteration, starting value first
};

namespace detail {

// LDL^T of the shifted tridiagonal matrix; false if a pivot is not safely positive.
inline bool solve_shifted(const Tridiagonal& H, double shift, const std::vector<double>& rhs,
                          std::vector<double>& x) {
    const std::size_t n = H.diag.size();
    std::vector<double> D(n), L(n, 0.0);
    double scale = 0.0;
    for (double d : H.diag) scale = std::max(scale, std::abs(d));
    const double floor = 1e-14 * std::max(scale, 1e-300);
    D[0] = H.diag[0] + shift;
    if (!(D[0] > floor)) return false;
    for (std::size_t i = 1; i < n; ++i) {
        L[i] = H.off[i - 1] / D[i - 1];
        D[i] = H.diag[i] + shift - L[i] * H.off[i - 1];
        if (!(D[i] > floor)) return false;
    }
    x = rhs;
    for (std::size_t i = 1; i < n; ++i) x[i] -= L[i] * x[i - 1];
    for (std::size_t i = 0; i < n; ++i) x[i] /= D[i];
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= L[i + 1] * x[i + 1];
    return true;
}

inline std::vector<double> newton_direction(Tridiagonal H, const std::vector<double>& g, bool dirichlet) {
    const std::size_t n = g.size();
    if (dirichlet) {
        H.diag.front() = H.diag.back() = 1.0;
        H.off.front() = H.off.back() = 0.0;
    }
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -g[i];
    double scale = 0.0;
    for (double d : H.diag) scale = std::max(scale, std::abs(d));
    std::vector<double> p;
    double shift = 0.0;
    for (int attempt = 0; attempt < 60; ++attempt) {
        if (solve_shifted(H, shift, rhs, p)) {
            if (dirichlet) p.front() = p.back() = 0.0;
            return p;
        }
        shift = shift == 0.0 ? 1e-10 * std::max(scale, 1e-12) : 10.0 * shift;
    }
    return rhs;
}

inline double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
}

inline FramingField step(const FramingField& f, const std::vector<double>& p, double alpha) {
    FramingField out = f;
    for (std::size_t i = 0; i < p.size(); ++i) out.theta[i] += alpha * p[i];
    return out;
}

} // namespace detail

/// Descent on E_eps with Armijo backtracking (c1 = 1e-4, factor 0.5). The
/// direction is the Newton direction of the tridiagonal Hessian, shifted
/// until positive definite, falling back to steepest descent.
inline StageResult minimize_at_eps(const FieldSamples& fs, const FramingField& start, double eps,
                                   const SolverConfig& cfg) {
    if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
    detail::check_grid(fs, start);
    const bool dirichlet = cfg.bc.kind == BoundaryKind::dirichlet;
    const BoundaryKind bk = cfg.bc.kind;
    constexpr double c1 = 1e-4;
    constexpr double min_step = 1e-16;
    const double tol = cfg.effective_grad_tol();

    StageResult res;
    res.theta = start;
    long double E = detail::energy_wide(fs, res.theta, eps);
    res.E_eps = static_cast<double>(E);
    res.energy_history.push_back(res.E_eps);
    auto g = gradient_E_eps(fs, res.theta, eps, bk);
    res.grad_norm = max_abs(g);
    double gd_alpha = 1.0;

    while (res.grad_norm > tol && res.iterations < cfg.max_iters) {
        bool accepted = false;
        const int first_pass = cfg.method == Method::newton ? 0 : 1;
        for (int pass = first_pass; pass < 2 && !accepted; ++pass) {
            const bool newton = pass == 0;
            std::vector<double> p;
            if (newton) {
                p = detail::newton_direction(hessian_E_eps(fs, res.theta, eps), g, dirichlet);
            } else {
                p.resize(g.size());
                for (std::size_t i = 0; i < g.size(); ++i) p[i] = -g[i];
            }
            const double slope = detail::dot(g, p);
            if (!(slope < 0.0)) continue;
            double alpha = newton ? 1.0 : std::min(1.0, 2.0 * gd_alpha);
            for (; alpha >= min_step; alpha *= 0.5) {
                auto trial = detail::step(res.theta, p, alpha);
                const long double Et = detail::energy_wide(fs, trial, eps);
                // Strict decrease: once c1*alpha*slope rounds away, Et == E would
                // otherwise be accepted forever without progress.
                bool ok = Et < E && Et <= E + static_cast<long double>(c1 * alpha * slope);
                std::vector<double> gt;
                if (!ok && Et <= E) {
                    // Decrease lost in rounding: keep the step only if it is
                    // clearly more stationary.
                    gt = gradient_E_eps(fs, trial, eps, bk);
                    ok = max_abs(gt) <= 0.9 * res.grad_norm;
                }
                if (ok) {
                    if (gt.empty()) gt = gradient_E_eps(fs, trial, eps, bk);
                    res.theta = std::move(trial);
                    E = Et;
                    res.E_eps = static_cast<double>(Et);
                    g = std::move(gt);
                    res.grad_norm = max_abs(g);
                    if (!newton) gd_alpha = alpha;
                    accepted = true;
                    break;
                }
            }
        }
        if (!accepted) {
            res.stalled = true;
            break;
        }
        ++res.iterations;
        res.energy_history.push_back(res.E_eps);
    }
    res.converged = res.grad_norm <= tol;
    return res;
}

struct TraceEntry {
    double eps = 0.0;
    double E_eps_min = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct StartSummary {
    int index = 0;
    std::string label;
    double E = 0.0;
    bool converged = false;
};

struct SolveResult {
    FramingField theta_min;
    double E_min = infinity;
    std::vector<TraceEntry> eps_trace;
    int start_used = -1;
    std::string start_label;
    bool converged = false;
    std::vector<StartSummary> starts;
};

struct ContinuationResult {
    FramingField theta;
    double E = infinity;
    std::vector<TraceEntry> trace;
    bool converged = true;
};

/// Runs the eps schedule from one start.
inline ContinuationResult continuation(const FieldSamples& fs, const FramingField& start, const SolverConfig& cfg) {
    ContinuationResult out;
    out.theta = start;
    for (double eps : cfg.eps_schedule()) {
        auto stage = minimize_at_eps(fs, out.theta, eps, cfg);
        out.trace.push_back({eps, stage.E_eps, stage.iterations, stage.converged});
        out.converged = out.converged && stage.converged;
        out.theta = std::move(stage.theta);
    }
    out.E = energy_E(fs, out.theta).E_value;
    if (cfg.bc.kind == BoundaryKind::free) out.theta = normalized(std::move(out.theta));
    return out;
}

/// Best continuation over explicit starts. Converged runs are preferred; among
/// them the smallest E wins, ties within 1e-12 relative go to the lower index.
inline SolveResult solve_from(const CurveSpec& c, const SolverConfig& cfg, const std::vector<FramingField>& starts,
                              const std::vector<std::string>& labels = {}) {
    cfg.validate();
    if (starts.empty()) throw InvalidArgument("solver needs at least one start");
    const FieldSamples fs = eval_fields(c, cfg.N);
    SolveResult best;
    bool have = false;
    for (std::size_t s = 0; s < starts.size(); ++s) {
        auto run = continuation(fs, starts[s], cfg);
        const std::string label = s < labels.size() ? labels[s] : "start:" + std::to_string(s);
        best.starts.push_back({static_cast<int>(s), label, run.E, run.converged});
        bool better = !have;
        if (have) {
            if (run.converged != best.converged)
                better = run.converged;
            else
                better = run.E < best.E_min - 1e-12 * std::abs(best.E_min) ||
                         (std::isinf(best.E_min) && std::isfinite(run.E));
        }
        if (better) {
            have = true;
            best.theta_min = std::move(run.theta);
            best.E_min = run.E;
            best.eps_trace = std::move(run.trace);
            best.start_used = static_cast<int>(s);
            best.start_label = label;
            best.converged = run.converged;
        }
    }
    return best;
}

inline SolveResult solve(const CurveSpec& c, const SolverConfig& cfg) {
    cfg.validate();
    std::vector<std::string> labels;
    for (const auto& r : cfg.starts) labels.push_back(describe(r));
    return solve_from(c, cfg, initial_guesses(c, cfg), labels);
}

} // namespace ribbonopt
