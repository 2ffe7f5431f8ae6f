#include <ribbonopt/curve.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace ribbonopt;
using std::numbers::pi;

TEST(CurvePreset, HelixHasConstantFields) {
    const auto c = make_preset(Preset::helix, {1.0, 0.5}, 2 * pi);
    for (double t : {0.0, 1.0, 2 * pi}) {
        EXPECT_EQ(c.kappa(t), 1.0);
        EXPECT_EQ(c.tau(t), 0.5);
    }
    EXPECT_DOUBLE_EQ(c.tau_integral(2.0), 1.0);
}

TEST(CurvePreset, LinearTorsion) {
    const auto c = make_preset(Preset::constant_kappa_var_tau, {1.0, 0.0, 1.0}, 1.0);
    EXPECT_DOUBLE_EQ(c.tau(0.25), 0.25);
    EXPECT_DOUBLE_EQ(c.tau(1.0), 1.0);
    EXPECT_DOUBLE_EQ(c.tau_integral(1.0), 0.5);
}

TEST(CurvePreset, TwistedProfileIntegralMatchesQuadrature) {
    const auto c = make_preset(Preset::twisted_profile, {1.0, 0.8, 0.5}, 2.0);
    // composite Simpson with many panels as an independent reference
    const int n = 20000;
    double acc = c.tau(0.0) + c.tau(1.3);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * c.tau(1.3 * i / n);
    EXPECT_NEAR(c.tau_integral(1.3), acc * 1.3 / (3.0 * n), 1e-12);
}

TEST(CurvePreset, RejectsBadInput) {
    EXPECT_THROW(make_preset(Preset::helix, {-1.0, 0.5}, 1.0), InvalidArgument);
    EXPECT_THROW(make_preset(Preset::helix, {0.0, 0.5}, 1.0), InvalidArgument);
    EXPECT_THROW(make_preset(Preset::helix, {1.0, 0.5}, 0.0), InvalidArgument);
    EXPECT_THROW(make_preset(Preset::helix, {1.0, 0.5}, -2.0), InvalidArgument);
    EXPECT_THROW(make_preset(Preset::helix, {1.0}, 1.0), InvalidArgument);
    EXPECT_THROW(make_preset(Preset::twisted_profile, {1.0, 0.5, 1.0}, 1.0), InvalidArgument);
}

TEST(CurvePreset, NamesRoundTrip) {
    for (auto p : {Preset::helix, Preset::twisted_profile, Preset::constant_kappa_var_tau})
        EXPECT_EQ(preset_from_string(to_string(p)), p);
    EXPECT_FALSE(preset_from_string("spiral"));
}

TEST(EvalFields, HelixSamples) {
    const auto fs = eval_fields(make_preset(Preset::helix, {1.0, 0.5}, 2 * pi), 4);
    ASSERT_EQ(fs.kappa_nodes.size(), 5u);
    ASSERT_EQ(fs.tau_mid.size(), 4u);
    for (double k : fs.kappa_nodes) EXPECT_EQ(k, 1.0);
    for (double t : fs.tau_mid) EXPECT_EQ(t, 0.5);
}

TEST(EvalFields, SampledLinearInterpolation) {
    const auto fs = eval_fields(make_sampled({0.0, 1.0}, {1.0, 2.0}, {0.0, 0.0}), 2);
    ASSERT_EQ(fs.kappa_nodes.size(), 3u);
    EXPECT_DOUBLE_EQ(fs.kappa_nodes[0], 1.0);
    EXPECT_DOUBLE_EQ(fs.kappa_nodes[1], 1.5);
    EXPECT_DOUBLE_EQ(fs.kappa_nodes[2], 2.0);
    EXPECT_DOUBLE_EQ(fs.kappa_mid[0], 1.25);
}

TEST(EvalFields, NonPositiveCurvatureIsRejected) {
    const auto c = make_sampled({0.0, 0.5, 1.0}, {1.0, 0.0, 1.0}, {0.0, 0.0, 0.0});
    try {
        eval_fields(c, 2);
        FAIL() << "expected NonPositiveCurvature";
    } catch (const NonPositiveCurvature& e) {
        EXPECT_DOUBLE_EQ(e.t(), 0.5);
        EXPECT_EQ(e.kappa(), 0.0);
    }
}

TEST(EvalFields, NeedsTwoIntervals) {
    EXPECT_THROW(eval_fields(make_preset(Preset::helix, {1.0, 0.5}, 1.0), 1), InvalidArgument);
}

TEST(EvalFields, Deterministic) {
    const auto c = make_preset(Preset::twisted_profile, {1.3, -0.7, 0.4}, 2.5);
    const auto a = eval_fields(c, 97), b = eval_fields(c, 97);
    EXPECT_EQ(a.kappa_nodes, b.kappa_nodes);
    EXPECT_EQ(a.tau_nodes, b.tau_nodes);
    EXPECT_EQ(a.kappa_mid, b.kappa_mid);
    EXPECT_EQ(a.tau_mid, b.tau_mid);
}

TEST(SampledCurve, Validation) {
    EXPECT_THROW(make_sampled({0.0}, {1.0}, {0.0}), InvalidArgument);
    EXPECT_THROW(make_sampled({0.0, 0.5, 0.5, 1.0}, {1, 1, 1, 1}, {0, 0, 0, 0}), InvalidArgument);
    EXPECT_THROW(make_sampled({0.1, 1.0}, {1, 1}, {0, 0}), InvalidArgument);
    EXPECT_THROW(make_sampled({0.0, 1.0}, {1, 1, 1}, {0, 0}), InvalidArgument);
}

TEST(SampledCurve, TorsionIntegralIsTrapezoidal) {
    const auto c = make_sampled({0.0, 1.0, 3.0}, {1, 1, 1}, {1.0, 3.0, -1.0});
    EXPECT_DOUBLE_EQ(c.tau_integral(1.0), 2.0);
    EXPECT_DOUBLE_EQ(c.tau_integral(3.0), 4.0);
    EXPECT_DOUBLE_EQ(c.tau_integral(2.0), 2.0 + 0.5 * (3.0 + 1.0));
}

TEST(Lambda, MaxOverBothFields) {
    const auto fs = eval_fields(make_preset(Preset::constant_kappa_var_tau, {1.0, -3.0, 1.0}, 1.0), 8);
    EXPECT_DOUBLE_EQ(lambda_bound(fs), 3.0);
}

namespace {

double frame_error(const FrenetFrame& f) {
    double e = std::max({std::abs(f.T.dot(f.P)), std::abs(f.T.dot(f.B)), std::abs(f.P.dot(f.B))});
    for (const Vec3* v : {&f.T, &f.P, &f.B}) e = std::max(e, std::abs(v->norm() - 1.0));
    return e;
}

// Closed-form circle of unit curvature starting with T = e1, P = e2.
double circle_error(int N) {
    const auto frames = integrate_frenet(make_preset(Preset::helix, {1.0, 0.0}, 2 * pi), N);
    double e = 0.0;
    for (const auto& f : frames) e = std::max(e, (f.gamma - Vec3(std::sin(f.t), 1.0 - std::cos(f.t), 0.0)).norm());
    return e;
}

} // namespace

TEST(Frenet, CircleCloses) {
    const auto frames = integrate_frenet(make_preset(Preset::helix, {1.0, 0.0}, 2 * pi), 2000);
    ASSERT_EQ(frames.size(), 2001u);
    EXPECT_LT((frames.back().gamma - frames.front().gamma).norm(), 1e-6);
    EXPECT_EQ(frames.front().gamma, Vec3::Zero());
    EXPECT_EQ(frames.front().T, Vec3::UnitX());
    EXPECT_EQ(frames.front().P, Vec3::UnitY());
    EXPECT_EQ(frames.front().B, Vec3::UnitZ());
}

TEST(Frenet, FourthOrderOnCircle) {
    const double e1 = circle_error(100), e2 = circle_error(200);
    EXPECT_GT(e1 / e2, 12.0);
    EXPECT_LT(e1 / e2, 20.0);
}

TEST(Frenet, HelixRadiusAndPitch) {
    const double k = 1.0, tau = 0.5, w2 = k * k + tau * tau, w = std::sqrt(w2);
    const auto frames = integrate_frenet(make_preset(Preset::helix, {k, tau}, 4 * pi), 2000);
    // Axis along the Darboux vector tau T + kappa B through the centre of curvature.
    const Vec3 axis = (tau * Vec3::UnitX() + k * Vec3::UnitZ()) / w;
    const Vec3 centre = (k / w2) * Vec3::UnitY();
    auto radial = [&](const FrenetFrame& f) {
        const Vec3 r = f.gamma - centre;
        return Vec3(r - r.dot(axis) * axis);
    };
    const Vec3 r0 = radial(frames.front());
    for (const auto& f : frames) {
        EXPECT_NEAR(radial(f).norm(), 0.8, 1e-6);
        EXPECT_NEAR((f.gamma - centre).dot(axis), tau / w * f.t, 1e-6);
        if (f.t > 0.1 && w * f.t < 3.0) {
            // axial advance per radian of rotation about the axis
            const double turned = std::atan2(r0.cross(radial(f)).norm(), r0.dot(radial(f)));
            EXPECT_NEAR((f.gamma - centre).dot(axis) / turned, 0.4, 1e-6);
        }
    }
}

TEST(Frenet, StaysOrthonormalAndRightHanded) {
    const auto c = make_preset(Preset::twisted_profile, {2.0, -1.5, 0.6}, 7.0);
    for (const auto& f : integrate_frenet(c, 300)) {
        EXPECT_LE(frame_error(f), 1e-8);
        EXPECT_NEAR(f.T.cross(f.P).dot(f.B), 1.0, 1e-8);
    }
}

TEST(Frenet, NodesMatchGrid) {
    const auto frames = integrate_frenet(make_preset(Preset::helix, {1.0, 0.3}, 3.0), 7);
    const Grid g{3.0, 7};
    for (int i = 0; i <= 7; ++i) EXPECT_EQ(frames[i].t, g.node(i));
    EXPECT_EQ(frames.back().t, 3.0);
}
