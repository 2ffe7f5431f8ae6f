#pragma once

// Flat ribbon reconstruction from a framing: Darboux frames along the curve,
// the developable ruling field, a triangulated strip, and angle-defect
// diagnostics.

#include "curve.hpp"
#include "energy.hpp"
#include "framing.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <vector>

namespace ribbonopt {

/// Adapted frame (T, n, u = n x T) with n the rotated normal cos(theta) P + sin(theta) B.
struct DarbouxFrame {
    double t = 0.0;
    Vec3 gamma = Vec3::Zero();
    Vec3 T = Vec3::UnitX();
    Vec3 n = Vec3::UnitY();
    Vec3 u = Vec3::UnitZ();
};

inline std::vector<DarbouxFrame> darboux_frames(const std::vector<FrenetFrame>& frames, const FramingField& f) {
    if (static_cast<int>(frames.size()) != f.grid.nodes())
        throw GridMismatch("frame count does not match the framing grid");
    std::vector<DarbouxFrame> out(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const auto& fr = frames[i];
        if (std::abs(fr.t - f.grid.node(static_cast<int>(i))) > 1e-12 * std::max(1.0, f.grid.length))
            throw GridMismatch("frame parameters do not match the framing grid");
        const double th = f.theta[i];
        DarbouxFrame d;
        d.t = fr.t;
        d.gamma = fr.gamma;
        d.T = fr.T.normalized();
        d.n = (std::cos(th) * fr.P + std::sin(th) * fr.B).normalized();
        d.u = d.n.cross(d.T).normalized();
        out[i] = d;
    }
    return out;
}

/// theta' at the nodes: central difference inside, one-sided at the ends.
inline std::vector<double> node_slopes(const FramingField& f) {
    const int n = f.intervals();
    std::vector<double> s(n + 1);
    s[0] = f.slope(0);
    s[n] = f.slope(n - 1);
    for (int i = 1; i < n; ++i) s[i] = 0.5 * (f.slope(i - 1) + f.slope(i));
    return s;
}

/// Unit kernel direction of the shape operator, proportional to tau_g T - kappa_n u.
inline Vec3 ruling_direction(double kappa_n, double tau_g, const DarbouxFrame& fr) {
    if (std::abs(kappa_n) < 1e-12 && std::abs(tau_g) < 1e-12)
        throw DegenerateRuling("kappa_n and tau_g both vanish at t=" + std::to_string(fr.t));
    return (tau_g * fr.T - kappa_n * fr.u).normalized();
}

struct RulingField {
    std::vector<std::optional<Vec3>> d;  ///< empty where the ruling is undefined
    std::vector<double> angle;           ///< atan2(-kappa_n, tau_g); NaN where undefined
    std::vector<double> kappa_n, tau_g;
};

/// Rulings at every node, with signs flipped so that consecutive defined
/// directions have nonnegative inner product.
inline RulingField ruling_directions(const CurveSpec& c, const FramingField& f,
                                     const std::vector<DarbouxFrame>& frames) {
    if (static_cast<int>(frames.size()) != f.grid.nodes())
        throw GridMismatch("frame count does not match the framing grid");
    const auto slopes = node_slopes(f);
    const std::size_t m = frames.size();
    RulingField r;
    r.d.resize(m);
    r.angle.assign(m, std::numeric_limits<double>::quiet_NaN());
    r.kappa_n.resize(m);
    r.tau_g.resize(m);
    std::optional<Vec3> prev;
    for (std::size_t i = 0; i < m; ++i) {
        const double t = f.grid.node(static_cast<int>(i));
        const auto [kn, tg] = framing_components(c.kappa(t), c.tau(t), f.theta[i], slopes[i]);
        r.kappa_n[i] = kn;
        r.tau_g[i] = tg;
        try {
            Vec3 d = ruling_direction(kn, tg, frames[i]);
            if (prev && prev->dot(d) < 0.0) d = -d;
            r.d[i] = d;
            r.angle[i] = std::atan2(-kn, tg);
            prev = d;
        } catch (const DegenerateRuling&) {
            prev.reset();
        }
    }
    return r;
}

/// d'(t) by central differences inside each run of defined rulings
/// (one-sided at run ends, zero for isolated samples).
inline std::vector<Vec3> ruling_derivatives(const std::vector<DarbouxFrame>& frames, const RulingField& r) {
    const int m = static_cast<int>(frames.size());
    std::vector<Vec3> out(m, Vec3::Zero());
    for (int i = 0; i < m; ++i) {
        if (!r.d[i]) continue;
        const int lo = (i > 0 && r.d[i - 1]) ? i - 1 : i;
        const int hi = (i + 1 < m && r.d[i + 1]) ? i + 1 : i;
        if (lo != hi) out[i] = (*r.d[hi] - *r.d[lo]) / (frames[hi].t - frames[lo].t);
    }
    return out;
}

/// For x(t, s) = gamma(t) + s d(t): x_t x x_s = T x d + s d' x d vanishes at
/// s* = -(T x d).(d' x d) / |d' x d|^2; +inf when d' x d is at rounding level.
inline double regression_distance(const Vec3& T, const Vec3& d, const Vec3& dp) {
    const Vec3 q = dp.cross(d);
    if (q.norm() <= 1e-12) return std::numeric_limits<double>::infinity();
    return -T.cross(d).dot(q) / q.squaredNorm();
}

struct RibbonMesh {
    double width = 0.0;
    int across = 0;                ///< vertices per ruling
    std::vector<Vec3> vertices;
    std::vector<Vec3> normals;     ///< (T + s d') x d, normalized
    std::vector<std::array<int, 3>> faces;
    std::vector<double> ruling_angles;
    /// [first, last] vertex-row ranges of each connected strip; row r holds vertices r*across ...
    std::vector<std::pair<int, int>> segments;
    /// Per vertex row: signed distance along the ruling from the curve to the
    /// edge of regression (+inf when the rulings are locally parallel).
    std::vector<double> regression_distance;
};

/// Strip x(t, s) = gamma(t) + s d(t), s in [-w/2, w/2], triangulated on each
/// run of consecutive nodes where the ruling is defined.
inline RibbonMesh build_mesh(const std::vector<DarbouxFrame>& frames, const RulingField& rulings, double w,
                             int samples_across = 5) {
    if (!(w > 0.0)) throw InvalidArgument("ribbon width must be positive");
    if (samples_across < 2) throw InvalidArgument("samples_across must be at least 2");
    if (rulings.d.size() != frames.size()) throw GridMismatch("ruling count does not match frame count");
    RibbonMesh mesh;
    mesh.width = w;
    const auto dprime = ruling_derivatives(frames, rulings);
    mesh.across = samples_across;
    mesh.ruling_angles = rulings.angle;

    const int m = static_cast<int>(frames.size());
    int row = 0;
    for (int i = 0; i < m;) {
        if (!rulings.d[i]) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 < m && rulings.d[j + 1]) ++j;
        if (j > i) {
            const int first_row = row;
            for (int k = i; k <= j; ++k, ++row)
                for (int a = 0; a < samples_across; ++a) {
                    const double s = -0.5 * w + w * a / (samples_across - 1);
                    const Vec3& d = *rulings.d[k];
                    mesh.vertices.push_back(frames[k].gamma + s * d);
                    const Vec3 nv = (frames[k].T + s * dprime[k]).cross(d);
                    // On the edge of regression itself the tangent plane is undefined.
                    mesh.normals.push_back(nv.norm() > 1e-14 ? Vec3(nv.normalized()) : frames[k].n);
                }
            for (int k = i; k <= j; ++k)
                mesh.regression_distance.push_back(regression_distance(frames[k].T, *rulings.d[k], dprime[k]));
            for (int r = first_row; r + 1 < row; ++r)
                for (int a = 0; a + 1 < samples_across; ++a) {
                    const int v00 = r * samples_across + a, v01 = v00 + 1;
                    const int v10 = v00 + samples_across, v11 = v10 + 1;
                    mesh.faces.push_back({v00, v10, v11});
                    mesh.faces.push_back({v00, v11, v01});
                }
            mesh.segments.emplace_back(first_row, row - 1);
        }
        i = j + 1;
    }
    if (mesh.faces.empty()) throw EmptyMesh("no two consecutive samples with a defined ruling");
    return mesh;
}

inline double min_face_area(const RibbonMesh& mesh) {
    double a = std::numeric_limits<double>::infinity();
    for (const auto& fc : mesh.faces)
        a = std::min(a, 0.5 * (mesh.vertices[fc[1]] - mesh.vertices[fc[0]])
                                  .cross(mesh.vertices[fc[2]] - mesh.vertices[fc[0]])
                                  .norm());
    return a;
}

struct FlatnessReport {
    double max_defect = 0.0;
    double mean_defect = 0.0;
    double normal_drift_along_rulings = 0.0;
    int interior_vertices = 0;
    /// Same quantities restricted to rows whose edge of regression lies
    /// outside the strip (|s*| > w/2 on the row and both neighbours), i.e.
    /// where the strip is an immersed surface.
    double regular_max_defect = 0.0;
    double regular_mean_defect = 0.0;
    double regular_normal_drift = 0.0;
    int regular_interior_vertices = 0;
    int cusp_rows = 0;
};

namespace detail {

inline double corner_angle(const Vec3& p, const Vec3& q, const Vec3& r) {
    const Vec3 a = q - p, b = r - p;
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

inline double unsigned_angle(const Vec3& a, const Vec3& b) { return std::atan2(a.cross(b).norm(), a.dot(b)); }

} // namespace detail

/// Angle defect 2*pi - (sum of incident corner angles) at interior vertices,
/// and the largest angle between the vertex normals at the two ends of a ruling.
inline FlatnessReport flatness_report(const RibbonMesh& mesh) {
    if (mesh.faces.empty()) throw EmptyMesh("mesh has no faces");
    std::vector<double> angle_sum(mesh.vertices.size(), 0.0);
    for (const auto& fc : mesh.faces)
        for (int c = 0; c < 3; ++c)
            angle_sum[fc[c]] += detail::corner_angle(mesh.vertices[fc[c]], mesh.vertices[fc[(c + 1) % 3]],
                                                     mesh.vertices[fc[(c + 2) % 3]]);
    FlatnessReport rep;
    double total = 0.0, total_regular = 0.0;
    const int k = mesh.across;
    const double half = 0.5 * mesh.width;
    auto row_ok = [&](int r) {
        return r >= static_cast<int>(mesh.regression_distance.size()) || std::abs(mesh.regression_distance[r]) > half;
    };
    for (const auto& [r0, r1] : mesh.segments) {
        for (int r = r0; r <= r1; ++r) {
            const bool regular = row_ok(r) && (r == r0 || row_ok(r - 1)) && (r == r1 || row_ok(r + 1));
            if (!row_ok(r)) ++rep.cusp_rows;
            if (r > r0 && r < r1)
                for (int a = 1; a + 1 < k; ++a) {
                    const double defect = std::abs(2.0 * std::numbers::pi - angle_sum[r * k + a]);
                    rep.max_defect = std::max(rep.max_defect, defect);
                    total += defect;
                    ++rep.interior_vertices;
                    if (regular) {
                        rep.regular_max_defect = std::max(rep.regular_max_defect, defect);
                        total_regular += defect;
                        ++rep.regular_interior_vertices;
                    }
                }
            const double drift = detail::unsigned_angle(mesh.normals[r * k], mesh.normals[r * k + k - 1]);
            rep.normal_drift_along_rulings = std::max(rep.normal_drift_along_rulings, drift);
            if (regular) rep.regular_normal_drift = std::max(rep.regular_normal_drift, drift);
        }
    }
    rep.mean_defect = rep.interior_vertices > 0 ? total / rep.interior_vertices : 0.0;
    rep.regular_mean_defect =
        rep.regular_interior_vertices > 0 ? total_regular / rep.regular_interior_vertices : 0.0;
    return rep;
}

/// Wavefront OBJ: "v x y z" lines, then "vn" lines, then 1-based "f i j k" faces.
inline void write_obj(std::ostream& os, const RibbonMesh& mesh) {
    os.precision(17);
    for (const auto& v : mesh.vertices) os << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const auto& nv : mesh.normals) os << "vn " << nv.x() << ' ' << nv.y() << ' ' << nv.z() << '\n';
    for (const auto& fc : mesh.faces) os << "f " << fc[0] + 1 << ' ' << fc[1] + 1 << ' ' << fc[2] + 1 << '\n';
}

struct RibbonBuild {
    std::vector<DarbouxFrame> frames;
    RulingField rulings;
    RibbonMesh mesh;
};

/// Frenet integration, Darboux frames, rulings and mesh in one call.
inline RibbonBuild build_ribbon(const CurveSpec& c, const FramingField& f, double w, int samples_across = 5) {
    RibbonBuild b;
    b.frames = darboux_frames(integrate_frenet(c, f.intervals()), f);
    b.rulings = ruling_directions(c, f, b.frames);
    b.mesh = build_mesh(b.frames, b.rulings, w, samples_across);
    return b;
}

} // namespace ribbonopt
