#include <ribbonopt/io.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace ribbonopt;
using std::numbers::pi;

namespace {

std::string config_error_key(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "<no error>";
}

} // namespace

TEST(Json, NonFiniteNumbersBecomeStrings) {
    EXPECT_EQ(number_json(infinity).dump(), "\"inf\"");
    EXPECT_EQ(number_json(-infinity).dump(), "\"-inf\"");
    EXPECT_EQ(number_json(std::nan("")).dump(), "\"nan\"");
    EXPECT_EQ(number_json(0.25).dump(), "0.25");
}

TEST(Json, EnergyReportWithInfiniteInterval) {
    EnergyReport r;
    r.E_value = infinity;
    r.eps_used = 0.0;
    r.per_interval = {0.5, infinity, 0.25};
    r.infinite_intervals = {1};
    const auto j = energy_report_json(r);
    EXPECT_EQ(j["E"], "inf");
    EXPECT_EQ(j["per_interval"][1], "inf");
    EXPECT_EQ(j["per_interval"][2], 0.25);
    EXPECT_EQ(j["infinite_intervals"][0], 1);
}

TEST(Json, FormatNumberRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, 2.156151270577625, -1e-300, 6.02214076e23}) EXPECT_EQ(std::stod(format_number(v)), v);
    EXPECT_EQ(format_number(infinity), "inf");
}

TEST(Json, SolveResult) {
    SolveResult r;
    r.theta_min = FramingField::from_function(Grid{1.0, 2}, [](double t) { return t; });
    r.E_min = 1.5;
    r.converged = true;
    r.start_used = 3;
    r.start_label = "twist:0.785398";
    r.eps_trace = {{1.0, 0.5, 3, true}};
    r.starts = {{0, "a", infinity, false}};
    const auto j = solve_result_json(r, {{0.5, 0, SingularKind::tangency, {0.25, 0.75}}});
    EXPECT_EQ(j["E_min"], 1.5);
    EXPECT_EQ(j["N"], 2);
    EXPECT_EQ(j["theta0"], 0.0);
    EXPECT_EQ(j["start_label"], "twist:0.785398");
    EXPECT_EQ(j["eps_trace"][0]["iterations"], 3);
    EXPECT_EQ(j["starts"][0]["E"], "inf");
    EXPECT_EQ(j["singular_points"][0]["kind"], "tangency");
    EXPECT_EQ(j["singular_points"][0]["bracket"][1], 0.75);
}

TEST(Csv, RoundTrip) {
    const auto f = FramingField::from_function(Grid{2.5, 17}, [](double t) { return std::sin(3.0 * t) + 0.1; });
    std::stringstream ss;
    write_theta_csv(ss, f);
    EXPECT_EQ(ss.str().substr(0, 8), "t,theta\n");
    const auto g = read_theta_csv(ss);
    EXPECT_EQ(g.theta, f.theta);
    EXPECT_EQ(g.grid.length, 2.5);
    EXPECT_EQ(g.grid.intervals, 17);
}

TEST(Csv, RejectsMalformedInput) {
    std::istringstream no_header("0,1\n1,2\n");
    EXPECT_THROW(read_theta_csv(no_header), InvalidArgument);
    std::istringstream bad_row("t,theta\n0,1\n0.5 2\n1,3\n");
    EXPECT_THROW(read_theta_csv(bad_row), InvalidArgument);
    std::istringstream short_file("t,theta\n0,1\n");
    EXPECT_THROW(read_theta_csv(short_file), InvalidArgument);
}

TEST(Config, FullDocument) {
    const auto rc = parse_config_text(R"({
        "command": "solve",
        "curve": {"length": 6.283185307179586, "preset": "helix", "params": [1.0, 0.5]},
        "solver": {"N": 256, "eps0": 2.0, "eps_ratio": 0.25, "eps_min": 1e-3, "grad_tol": 1e-6,
                   "max_iters": 100, "method": "gradient_descent",
                   "bc": {"type": "dirichlet", "a": 0.0, "b": 1.0},
                   "starts": ["twist:0", "constant:1.5"]},
        "outputs": "runs/helix",
        "seed": 7,
        "mesh": {"width": 0.2, "samples_across": 3}
    })");
    EXPECT_EQ(*rc.command, "solve");
    ASSERT_TRUE(rc.curve);
    EXPECT_EQ(rc.curve->tau(1.0), 0.5);
    EXPECT_EQ(rc.solver.N, 256);
    EXPECT_EQ(rc.solver.eps0, 2.0);
    EXPECT_EQ(rc.solver.eps_ratio, 0.25);
    EXPECT_EQ(rc.solver.eps_min, 1e-3);
    EXPECT_EQ(rc.solver.grad_tol, 1e-6);
    EXPECT_EQ(rc.solver.max_iters, 100);
    EXPECT_EQ(rc.solver.method, Method::gradient_descent);
    EXPECT_EQ(rc.solver.bc.kind, BoundaryKind::dirichlet);
    EXPECT_EQ(rc.solver.bc.b, 1.0);
    ASSERT_EQ(rc.solver.starts.size(), 2u);
    EXPECT_EQ(rc.solver.starts[1].kind, StartKind::constant);
    EXPECT_EQ(rc.solver.starts[1].offset, 1.5);
    EXPECT_EQ(rc.outputs, "runs/helix");
    EXPECT_EQ(rc.seed, 7u);
    EXPECT_EQ(*rc.mesh.width, 0.2);
    EXPECT_EQ(rc.mesh.samples_across, 3);
}

TEST(Config, DefaultsWhenOmitted) {
    const auto rc = parse_config_text("{}");
    EXPECT_FALSE(rc.command);
    EXPECT_FALSE(rc.curve);
    EXPECT_EQ(rc.solver.N, 512);
    EXPECT_EQ(rc.solver.bc.kind, BoundaryKind::free);
    EXPECT_EQ(rc.outputs, "out");
    EXPECT_EQ(rc.mesh.width_fraction, 0.05);
}

TEST(Config, SampledCurve) {
    const auto rc = parse_config_text(
        R"({"curve": {"sampled": {"grid": [0, 0.5, 1], "kappa": [1, 2, 1], "tau": [0, 1, 0]}}})");
    ASSERT_TRUE(rc.curve);
    EXPECT_EQ(rc.curve->length(), 1.0);
    EXPECT_DOUBLE_EQ(rc.curve->kappa(0.25), 1.5);
    const auto back = curve_json(*rc.curve);
    EXPECT_EQ(back["sampled"]["kappa"][1], 2.0);
}

TEST(Config, ErrorsNameTheKey) {
    EXPECT_EQ(config_error_key(R"({"curve": {"lenght": 1, "preset": "helix", "params": [1, 1]}})"), "curve.lenght");
    EXPECT_EQ(config_error_key(R"({"solver": {"N": 1}})"), "solver.N");
    EXPECT_EQ(config_error_key(R"({"solver": {"N": 2.5}})"), "solver.N");
    EXPECT_EQ(config_error_key(R"({"solver": {"eps_ratio": 1.5}})"), "solver.eps_ratio");
    EXPECT_EQ(config_error_key(R"({"solver": {"method": "bfgs"}})"), "solver.method");
    EXPECT_EQ(config_error_key(R"({"solver": {"bc": {"type": "periodic"}}})"), "solver.bc.type");
    EXPECT_EQ(config_error_key(R"({"solver": {"starts": ["spiral:1"]}})"), "solver.starts[0]");
    EXPECT_EQ(config_error_key(R"({"curve": {"length": 1, "preset": "spiral", "params": []}})"), "curve.preset");
    EXPECT_EQ(config_error_key(R"({"curve": {"length": 1, "preset": "helix", "params": [-1, 0]}})"), "curve.params");
    EXPECT_EQ(config_error_key(R"({"sweep": {"tau": []}})"), "sweep.tau");
    EXPECT_EQ(config_error_key(R"({"seed": -3})"), "seed");
    EXPECT_EQ(config_error_key(R"({"command": "fly"})"), "command");
    EXPECT_EQ(config_error_key(R"({"mesh": {"samples_across": 1}})"), "mesh.samples_across");
    EXPECT_EQ(config_error_key(R"({"gradcheck": {"eps": [0.1, -1]}})"), "gradcheck.eps");
}

TEST(Config, MalformedJsonReportsLastKey) {
    EXPECT_EQ(config_error_key(R"({"solver": {"N": 64, "eps0": ]}})"), "solver.eps0");
    EXPECT_EQ(config_error_key("{"), "<root>");
    try {
        parse_config_text(R"({"curve": {"length": 1,, }})");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "curve.length");
        EXPECT_NE(std::string(e.what()).find("curve.length: malformed JSON"), std::string::npos);
    }
}

TEST(Config, MissingFile) {
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}
