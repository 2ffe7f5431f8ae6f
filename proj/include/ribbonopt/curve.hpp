#pragma once
////////////////////////////////////////////////////////////////////////////////
// curve.hpp
//
// Frenet curves given intrinsically by arc length, curvature and torsion.
// The position and Frenet frame are only reconstructed on demand (for ribbon
// export) by integrating the Frenet-Serret system.
////////////////////////////////////////////////////////////////////////////////

#include "errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ribbonopt {

using Vec3 = Eigen::Vector3d;

enum class Preset { helix, twisted_profile, constant_kappa_var_tau };

inline std::string_view to_string(Preset p) {
    switch (p) {
    case Preset::helix: return "helix";
    case Preset::twisted_profile: return "twisted_profile";
    case Preset::constant_kappa_var_tau: return "constant_kappa_var_tau";
    }
    return "?";
}

inline std::optional<Preset> preset_from_string(std::string_view s) {
    if (s == "helix") return Preset::helix;
    if (s == "twisted_profile") return Preset::twisted_profile;
    if (s == "constant_kappa_var_tau") return Preset::constant_kappa_var_tau;
    return std::nullopt;
}

struct PresetSource {
    Preset name;
    std::vector<double> params;
};

/// Node values on an increasing grid, interpolated piecewise linearly.
struct SampledSource {
    std::vector<double> grid;
    std::vector<double> kappa;
    std::vector<double> tau;
};

/// Uniform partition of [0, length] into `intervals` pieces.
struct Grid {
    double length = 1.0;
    int intervals = 2;

    double h() const { return length / intervals; }
    int nodes() const { return intervals + 1; }
    // i*h would leave the last node a rounding error away from `length`.
    double node(int i) const { return i == intervals ? length : i * h(); }
    double midpoint(int i) const { return (i + 0.5) * h(); }

    friend bool operator==(const Grid&, const Grid&) = default;
};

class CurveSpec {
public:
    using Source = std::variant<PresetSource, SampledSource>;

    CurveSpec(double length, Source source) : length_(length), source_(std::move(source)) {
        if (!(length_ > 0.0) || !std::isfinite(length_))
            throw InvalidArgument("curve length must be positive, got " + std::to_string(length_));
        std::visit([this](const auto& s) { validate(s); }, source_);
    }

    double length() const { return length_; }
    const Source& source() const { return source_; }
    bool is_sampled() const { return std::holds_alternative<SampledSource>(source_); }

    double kappa(double t) const {
        return std::visit([&](const auto& s) { return kappa_impl(s, t); }, source_);
    }
    double tau(double t) const {
        return std::visit([&](const auto& s) { return tau_impl(s, t); }, source_);
    }
    /// Exact value of int_0^t tau(s) ds for the stored model.
    double tau_integral(double t) const {
        return std::visit([&](const auto& s) { return tau_integral_impl(s, t); }, source_);
    }

private:
    static constexpr double two_pi = 2.0 * std::numbers::pi;

    void validate(const PresetSource& s) const {
        auto need = [&](std::size_t n) {
            if (s.params.size() != n)
                throw InvalidArgument(std::string(to_string(s.name)) + " expects " + std::to_string(n) +
                                      " parameters, got " + std::to_string(s.params.size()));
        };
        for (double p : s.params)
            if (!std::isfinite(p)) throw InvalidArgument("preset parameters must be finite");
        switch (s.name) {
        case Preset::helix: need(2); break;
        case Preset::twisted_profile:
            need(3);
            if (std::abs(s.params[2]) >= 1.0)
                throw InvalidArgument("twisted_profile amplitude must satisfy |A| < 1");
            break;
        case Preset::constant_kappa_var_tau: need(3); break;
        }
        if (!(s.params[0] > 0.0))
            throw InvalidArgument("preset curvature kappa0 must be positive, got " + std::to_string(s.params[0]));
    }

    void validate(const SampledSource& s) const {
        const auto m = s.grid.size();
        if (m < 2) throw InvalidArgument("sampled curve needs at least 2 grid nodes");
        if (s.kappa.size() != m || s.tau.size() != m)
            throw InvalidArgument("sampled curve: grid, kappa and tau must have equal lengths");
        if (s.grid.front() != 0.0) throw InvalidArgument("sampled curve: grid must start at 0");
        if (s.grid.back() != length_) throw InvalidArgument("sampled curve: grid must end at the curve length");
        for (std::size_t i = 1; i < m; ++i)
            if (!(s.grid[i] > s.grid[i - 1])) throw InvalidArgument("sampled curve: grid must be strictly increasing");
        for (std::size_t i = 0; i < m; ++i)
            if (!std::isfinite(s.kappa[i]) || !std::isfinite(s.tau[i]))
                throw InvalidArgument("sampled curve: values must be finite");
    }

    double kappa_impl(const PresetSource& s, double t) const {
        const auto& p = s.params;
        switch (s.name) {
        case Preset::helix: return p[0];
        case Preset::twisted_profile: return p[0] * (1.0 + p[2] * std::cos(two_pi * t / length_));
        case Preset::constant_kappa_var_tau: return p[0];
        }
        return 0.0;
    }
    double tau_impl(const PresetSource& s, double t) const {
        const auto& p = s.params;
        switch (s.name) {
        case Preset::helix: return p[1];
        case Preset::twisted_profile: return p[1] * (1.0 + p[2] * std::sin(two_pi * t / length_));
        case Preset::constant_kappa_var_tau: return p[1] + p[2] * t;
        }
        return 0.0;
    }
    double tau_integral_impl(const PresetSource& s, double t) const {
        const auto& p = s.params;
        switch (s.name) {
        case Preset::helix: return p[1] * t;
        case Preset::twisted_profile:
            return p[1] * (t + p[2] * length_ / two_pi * (1.0 - std::cos(two_pi * t / length_)));
        case Preset::constant_kappa_var_tau: return p[1] * t + 0.5 * p[2] * t * t;
        }
        return 0.0;
    }

    // Index j of the cell [grid[j], grid[j+1]] containing t (clamped).
    static std::size_t cell(const SampledSource& s, double t) {
        auto it = std::upper_bound(s.grid.begin(), s.grid.end(), t);
        std::size_t j = it == s.grid.begin() ? 0 : static_cast<std::size_t>(it - s.grid.begin()) - 1;
        return std::min(j, s.grid.size() - 2);
    }
    static double lerp(const SampledSource& s, const std::vector<double>& v, double t) {
        const std::size_t j = cell(s, t);
        const double w = (t - s.grid[j]) / (s.grid[j + 1] - s.grid[j]);
        return (1.0 - w) * v[j] + w * v[j + 1];
    }
    double kappa_impl(const SampledSource& s, double t) const { return lerp(s, s.kappa, t); }
    double tau_impl(const SampledSource& s, double t) const { return lerp(s, s.tau, t); }
    double tau_integral_impl(const SampledSource& s, double t) const {
        double acc = 0.0;
        std::size_t j = 0;
        for (; j + 1 < s.grid.size() && s.grid[j + 1] <= t; ++j)
            acc += 0.5 * (s.tau[j] + s.tau[j + 1]) * (s.grid[j + 1] - s.grid[j]);
        if (j + 1 < s.grid.size() && t > s.grid[j]) acc += 0.5 * (s.tau[j] + tau_impl(s, t)) * (t - s.grid[j]);
        return acc;
    }

    double length_;
    Source source_;
};

inline CurveSpec make_preset(Preset name, std::vector<double> params, double length) {
    return CurveSpec(length, PresetSource{name, std::move(params)});
}

inline CurveSpec make_sampled(std::vector<double> grid, std::vector<double> kappa, std::vector<double> tau) {
    const double l = grid.empty() ? 0.0 : grid.back();
    return CurveSpec(l, SampledSource{std::move(grid), std::move(kappa), std::move(tau)});
}

/// Curvature and torsion at the nodes and midpoints of a uniform grid.
struct FieldSamples {
    Grid grid;
    std::vector<double> kappa_nodes, tau_nodes;
    std::vector<double> kappa_mid, tau_mid;
};

inline FieldSamples eval_fields(const CurveSpec& c, int intervals) {
    if (intervals < 2) throw InvalidArgument("grid needs at least 2 intervals");
    FieldSamples f;
    f.grid = Grid{c.length(), intervals};
    const int n = intervals;
    f.kappa_nodes.resize(n + 1);
    f.tau_nodes.resize(n + 1);
    f.kappa_mid.resize(n);
    f.tau_mid.resize(n);
    for (int i = 0; i <= n; ++i) {
        const double t = f.grid.node(i);
        f.kappa_nodes[i] = c.kappa(t);
        f.tau_nodes[i] = c.tau(t);
        if (!(f.kappa_nodes[i] > 0.0)) throw NonPositiveCurvature(t, f.kappa_nodes[i]);
    }
    for (int i = 0; i < n; ++i) {
        const double t = f.grid.midpoint(i);
        f.kappa_mid[i] = c.kappa(t);
        f.tau_mid[i] = c.tau(t);
        if (!(f.kappa_mid[i] > 0.0)) throw NonPositiveCurvature(t, f.kappa_mid[i]);
    }
    return f;
}

/// Lambda = max(sup|tau|, sup|kappa|) over the nodes and midpoints of the grid.
inline double lambda_bound(const FieldSamples& f) {
    double m = 0.0;
    for (auto* v : {&f.kappa_nodes, &f.tau_nodes, &f.kappa_mid, &f.tau_mid})
        for (double x : *v) m = std::max(m, std::abs(x));
    return m;
}

struct FrenetFrame {
    double t = 0.0;
    Vec3 gamma = Vec3::Zero();
    Vec3 T = Vec3::UnitX();
    Vec3 P = Vec3::UnitY();
    Vec3 B = Vec3::UnitZ();
};

namespace detail {

struct FrenetRates {
    Vec3 dgamma, dT, dP, dB;
};

inline FrenetRates frenet_rates(const FrenetFrame& f, double kappa, double tau) {
    return {f.T, kappa * f.P, -kappa * f.T + tau * f.B, -tau * f.P};
}

inline FrenetFrame advance(const FrenetFrame& f, const FrenetRates& r, double dt) {
    FrenetFrame g = f;
    g.gamma += dt * r.dgamma;
    g.T += dt * r.dT;
    g.P += dt * r.dP;
    g.B += dt * r.dB;
    return g;
}

inline void orthonormalize(FrenetFrame& f) {
    f.T.normalize();
    f.P -= f.P.dot(f.T) * f.T;
    f.P.normalize();
    f.B = f.T.cross(f.P);
}

} // namespace detail

/// Classical RK4 on T' = kP, P' = -kT + tB, B' = -tP, gamma' = T, with a
/// Gram-Schmidt pass after every step. Frame 0 is (origin, e1, e2, e3).
inline std::vector<FrenetFrame> integrate_frenet(const CurveSpec& c, int intervals) {
    const FieldSamples fs = eval_fields(c, intervals);
    const double h = fs.grid.h();
    std::vector<FrenetFrame> out;
    out.reserve(intervals + 1);
    FrenetFrame cur;
    out.push_back(cur);
    for (int i = 0; i < intervals; ++i) {
        const double km = fs.kappa_mid[i], tm = fs.tau_mid[i];
        const auto k1 = detail::frenet_rates(cur, fs.kappa_nodes[i], fs.tau_nodes[i]);
        const auto k2 = detail::frenet_rates(detail::advance(cur, k1, 0.5 * h), km, tm);
        const auto k3 = detail::frenet_rates(detail::advance(cur, k2, 0.5 * h), km, tm);
        const auto k4 = detail::frenet_rates(detail::advance(cur, k3, h), fs.kappa_nodes[i + 1], fs.tau_nodes[i + 1]);
        cur.gamma += h / 6.0 * (k1.dgamma + 2.0 * k2.dgamma + 2.0 * k3.dgamma + k4.dgamma);
        cur.T += h / 6.0 * (k1.dT + 2.0 * k2.dT + 2.0 * k3.dT + k4.dT);
        cur.P += h / 6.0 * (k1.dP + 2.0 * k2.dP + 2.0 * k3.dP + k4.dP);
        cur.B += h / 6.0 * (k1.dB + 2.0 * k2.dB + 2.0 * k3.dB + k4.dB);
        detail::orthonormalize(cur);
        cur.t = fs.grid.node(i + 1);
        out.push_back(cur);
    }
    return out;
}

} // namespace ribbonopt
