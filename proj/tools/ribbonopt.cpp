// ribbonopt: batch front end for the ribbon framing solver.
//
//   ribbonopt solve|verify|sweep|export-mesh|gradcheck --config <path> [--out <dir>] [--seed <int>] [--paper-constant]
//
// Exit status: 0 success, 1 failed check or non-convergence, 2 configuration error.

#include <ribbonopt/verification.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace ribbonopt;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_fail = 1;
constexpr int exit_config = 2;

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool paper_constant = false;
};

void write_json(const fs::path& p, const json& j) {
    std::ofstream os(p);
    if (!os) throw ConfigError("outputs", "cannot write '" + p.string() + "'");
    os << j.dump(2) << '\n';
}

template <class F>
void write_file(const fs::path& p, F&& body) {
    std::ofstream os(p);
    if (!os) throw ConfigError("outputs", "cannot write '" + p.string() + "'");
    body(os);
}

const CurveSpec& require_curve(const RunConfig& rc) {
    if (!rc.curve) throw ConfigError("curve", "missing (required by this command)");
    return *rc.curve;
}

json solver_json(const SolverConfig& s) {
    json starts = json::array();
    for (const auto& r : s.starts) starts.push_back(describe(r));
    json bc = s.bc.kind == BoundaryKind::free ? json{{"type", "free"}} : json{{"type", "dirichlet"}, {"a", s.bc.a}, {"b", s.bc.b}};
    return {{"N", s.N},
            {"eps0", s.eps0},
            {"eps_ratio", s.eps_ratio},
            {"eps_min", s.eps_min},
            {"grad_tol", s.effective_grad_tol()},
            {"max_iters", s.max_iters},
            {"method", s.method == Method::newton ? "newton" : "gradient_descent"},
            {"bc", bc},
            {"starts", starts}};
}

json effective_config(const std::string& command, const RunConfig& rc) {
    json j{{"command", command}, {"solver", solver_json(rc.solver)}, {"outputs", rc.outputs}, {"seed", rc.seed}};
    if (rc.curve) j["curve"] = curve_json(*rc.curve);
    j["framing_convention"] = "n = cos(theta) P + sin(theta) B";
    return j;
}

int cmd_solve(const RunConfig& rc, const fs::path& out) {
    const CurveSpec& c = require_curve(rc);
    const SolveResult r = solve(c, rc.solver);
    const auto pts = find_singular_points(r.theta_min);
    json j = solve_result_json(r, pts);
    j["curve"] = curve_json(c);
    write_json(out / "result.json", j);
    write_file(out / "theta_min.csv", [&](std::ostream& os) { write_theta_csv(os, r.theta_min); });
    std::cout << "E_min = " << format_number(r.E_min) << "  start " << r.start_label << "  singular points "
              << pts.size() << (r.converged ? "" : "  (not converged)") << '\n';
    return r.converged ? exit_ok : exit_fail;
}

int cmd_verify(const RunConfig& rc, const fs::path& out) {
    const SuiteReport rep = run_verification_suite(rc.verify, rc.solver, rc.seed);
    write_json(out / "verify_report.json", rep.to_json());
    for (const auto& c : rep.checks)
        std::cout << to_string(c.status) << "  " << c.name << "  [" << c.instance << "]  lhs=" << format_number(c.lhs)
                  << " rhs=" << format_number(c.rhs) << '\n';
    std::cout << (rep.all_pass() ? "all checks passed" : "some checks FAILED") << '\n';
    return rep.all_pass() ? exit_ok : exit_fail;
}

int cmd_sweep(const RunConfig& rc, const fs::path& out) {
    if (!rc.sweep) throw ConfigError("sweep", "missing (required by this command)");
    const SweepConfig& sw = *rc.sweep;
    bool ok = true;
    std::ostringstream csv;
    csv << "tau,n_threshold,singular_count,E_min\n";
    for (double tau : sw.tau) {
        const CurveSpec c = make_preset(Preset::helix, {sw.kappa, tau}, sw.length);
        const SolveResult r = solve(c, rc.solver);
        const int n = count_threshold(eval_fields(c, rc.solver.N));
        const auto pts = find_singular_points(r.theta_min);
        ok = ok && r.converged;
        csv << format_number(tau) << ',' << n << ',' << pts.size() << ',' << format_number(r.E_min) << '\n';
        std::cout << "tau=" << format_number(tau) << "  n=" << n << "  singular=" << pts.size()
                  << "  E_min=" << format_number(r.E_min) << (r.converged ? "" : "  (not converged)") << '\n';
    }
    write_file(out / "sweep.csv", [&](std::ostream& os) { os << csv.str(); });
    return ok ? exit_ok : exit_fail;
}

int cmd_export_mesh(const RunConfig& rc, const fs::path& out) {
    const CurveSpec& c = require_curve(rc);
    FramingField f;
    bool converged = true;
    if (rc.mesh.theta_csv) {
        std::ifstream in(*rc.mesh.theta_csv);
        if (!in) throw ConfigError("mesh.theta_csv", "cannot open '" + *rc.mesh.theta_csv + "'");
        try {
            f = read_theta_csv(in);
        } catch (const std::exception& e) {
            throw ConfigError("mesh.theta_csv", e.what());
        }
        if (std::abs(f.grid.length - c.length()) > 1e-9 * c.length())
            throw ConfigError("mesh.theta_csv", "grid does not span the curve length");
    } else {
        const SolveResult r = solve(c, rc.solver);
        converged = r.converged;
        f = r.theta_min;
        write_file(out / "theta_min.csv", [&](std::ostream& os) { write_theta_csv(os, f); });
    }
    const double w = rc.mesh.width.value_or(rc.mesh.width_fraction * c.length());
    const RibbonBuild b = build_ribbon(c, f, w, rc.mesh.samples_across);
    const FlatnessReport fr = flatness_report(b.mesh);
    write_file(out / "ribbon.obj", [&](std::ostream& os) { write_obj(os, b.mesh); });
    json j = flatness_json(fr);
    j["width"] = w;
    j["vertices"] = b.mesh.vertices.size();
    j["faces"] = b.mesh.faces.size();
    j["min_face_area"] = min_face_area(b.mesh);
    write_json(out / "flatness.json", j);
    std::cout << "ribbon.obj: " << b.mesh.vertices.size() << " vertices, " << b.mesh.faces.size()
              << " faces; max defect " << format_number(fr.max_defect) << " (regular part "
              << format_number(fr.regular_max_defect) << ")\n";
    return converged ? exit_ok : exit_fail;
}

int cmd_gradcheck(const RunConfig& rc, const fs::path& out) {
    const auto& g = rc.gradcheck;
    const GradcheckResult r = gradcheck(rc.seed, g.N, g.instances, g.eps);
    const bool ok = r.max_rel_error <= g.tolerance;
    write_json(out / "gradcheck.json", {{"seed", rc.seed},
                                        {"N", g.N},
                                        {"instances", r.instances},
                                        {"eps", g.eps},
                                        {"max_rel_error", r.max_rel_error},
                                        {"tolerance", g.tolerance},
                                        {"pass", ok}});
    std::cout << "max relative gradient error " << format_number(r.max_rel_error) << " over " << r.components
              << " components (tolerance " << format_number(g.tolerance) << ")\n";
    return ok ? exit_ok : exit_fail;
}

int run(const std::string& command, const Options& opt) {
    RunConfig rc = opt.config.empty() ? RunConfig{} : load_config(opt.config);
    if (rc.command && *rc.command != command)
        throw ConfigError("command", "config is for '" + *rc.command + "', invoked as '" + command + "'");
    if (!opt.out.empty()) rc.outputs = opt.out;
    if (opt.seed) rc.seed = *opt.seed;
    if (opt.paper_constant) rc.verify.paper_constant = true;

    const fs::path out(rc.outputs);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) throw ConfigError("outputs", "cannot create directory '" + rc.outputs + "'");
    write_json(out / "config.json", effective_config(command, rc));

    if (command == "solve") return cmd_solve(rc, out);
    if (command == "verify") return cmd_verify(rc, out);
    if (command == "sweep") return cmd_sweep(rc, out);
    if (command == "export-mesh") return cmd_export_mesh(rc, out);
    return cmd_gradcheck(rc, out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimal-energy framings of flat ribbons"};
    app.require_subcommand(1);
    Options opt;
    for (const char* name : {"solve", "verify", "sweep", "export-mesh", "gradcheck"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", opt.config, "JSON run configuration");
        sub->add_option("--out", opt.out, "output directory (overrides config outputs)");
        sub->add_option("--seed", opt.seed, "seed for randomized suites (default 0)");
        sub->add_flag("--paper-constant", opt.paper_constant, "also report the literal coercivity constant");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_fail;
    }
}
