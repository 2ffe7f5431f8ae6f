#pragma once

#include "curve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace ribbonopt {

/// Framing angle theta sampled at the nodes of a uniform grid; linear in between.
struct FramingField {
    Grid grid;
    std::vector<double> theta;

    FramingField() = default;
    FramingField(Grid g, std::vector<double> values) : grid(g), theta(std::move(values)) {
        if (grid.intervals < 2) throw InvalidArgument("framing grid needs at least 2 intervals");
        if (static_cast<int>(theta.size()) != grid.nodes())
            throw GridMismatch("framing has " + std::to_string(theta.size()) + " values for " +
                               std::to_string(grid.nodes()) + " nodes");
        for (double v : theta)
            if (!std::isfinite(v)) throw InvalidArgument("framing values must be finite");
    }

    int intervals() const { return grid.intervals; }
    double h() const { return grid.h(); }
    double slope(int i) const { return (theta[i + 1] - theta[i]) / grid.h(); }
    double mid_value(int i) const { return 0.5 * (theta[i] + theta[i + 1]); }

    /// Piecewise-linear evaluation at an arbitrary t in [0, l].
    double operator()(double t) const {
        const double h = grid.h();
        int i = static_cast<int>(std::floor(t / h));
        i = std::clamp(i, 0, grid.intervals - 1);
        const double w = (t - grid.node(i)) / h;
        return (1.0 - w) * theta[i] + w * theta[i + 1];
    }

    template <class F>
    static FramingField from_function(Grid g, F&& fn) {
        std::vector<double> v(g.nodes());
        for (int i = 0; i < g.nodes(); ++i) v[i] = fn(g.node(i));
        return FramingField(g, std::move(v));
    }
};

/// Shift by -2*pi*floor(theta(0)/(2*pi)) so that theta(0) lies in [0, 2*pi).
inline double two_pi_shift(double theta0) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return -two_pi * std::floor(theta0 / two_pi);
}

inline FramingField normalized(FramingField f) {
    const double s = two_pi_shift(f.theta.front());
    if (s != 0.0)
        for (double& v : f.theta) v += s;
    // Rounding in the shift can land exactly on 2*pi or a hair below 0.
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (f.theta.front() >= two_pi)
        for (double& v : f.theta) v -= two_pi;
    else if (f.theta.front() < 0.0)
        for (double& v : f.theta) v += two_pi;
    return f;
}

enum class SingularKind { crossing, tangency };

/// A parameter where theta = pi/2 + k*pi, i.e. kappa_n vanishes.
struct SingularPoint {
    double t = 0.0;
    long k = 0;
    SingularKind kind = SingularKind::crossing;
    std::pair<double, double> bracket{0.0, 0.0};
};

} // namespace ribbonopt
