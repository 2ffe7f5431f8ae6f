#pragma once

// JSON/CSV serialization and the run-config parser. Configs are strict:
// unknown keys and type errors raise ConfigError carrying the dotted key.

#include "analysis.hpp"
#include "ribbon.hpp"
#include "solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace ribbonopt {

using json = nlohmann::json;

/// Finite numbers as-is; +-inf and NaN as the strings "inf", "-inf", "nan".
inline json number_json(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

inline json energy_report_json(const EnergyReport& r) {
    json per = json::array();
    for (double v : r.per_interval) per.push_back(number_json(v));
    json j{{"E", number_json(r.E_value)}, {"eps", r.eps_used}, {"per_interval", per}, {"J_measure", r.J_measure}};
    if (!r.infinite_intervals.empty()) j["infinite_intervals"] = r.infinite_intervals;
    return j;
}

inline std::string_view to_string(SingularKind k) { return k == SingularKind::crossing ? "crossing" : "tangency"; }

inline json singular_points_json(const std::vector<SingularPoint>& pts) {
    json a = json::array();
    for (const auto& p : pts)
        a.push_back({{"t", p.t}, {"k", p.k}, {"kind", to_string(p.kind)}, {"bracket", {p.bracket.first, p.bracket.second}}});
    return a;
}

inline json trace_json(const std::vector<TraceEntry>& trace) {
    json a = json::array();
    for (const auto& e : trace)
        a.push_back({{"eps", e.eps}, {"E_eps_min", number_json(e.E_eps_min)}, {"iterations", e.iterations},
                     {"converged", e.converged}});
    return a;
}

inline json solve_result_json(const SolveResult& r, const std::vector<SingularPoint>& pts) {
    json starts = json::array();
    for (const auto& s : r.starts)
        starts.push_back({{"index", s.index}, {"label", s.label}, {"E", number_json(s.E)}, {"converged", s.converged}});
    return {{"E_min", number_json(r.E_min)},
            {"converged", r.converged},
            {"start_used", r.start_used},
            {"start_label", r.start_label},
            {"N", r.theta_min.intervals()},
            {"theta0", r.theta_min.theta.empty() ? json(nullptr) : json(r.theta_min.theta.front())},
            {"eps_trace", trace_json(r.eps_trace)},
            {"singular_points", singular_points_json(pts)},
            {"starts", starts}};
}

inline json flatness_json(const FlatnessReport& f) {
    return {{"max_defect", f.max_defect},
            {"mean_defect", f.mean_defect},
            {"normal_drift_along_rulings", f.normal_drift_along_rulings},
            {"interior_vertices", f.interior_vertices},
            {"regular_max_defect", f.regular_max_defect},
            {"regular_mean_defect", f.regular_mean_defect},
            {"regular_normal_drift", f.regular_normal_drift},
            {"regular_interior_vertices", f.regular_interior_vertices},
            {"cusp_rows", f.cusp_rows}};
}

/// Shortest decimal form that round-trips.
inline std::string format_number(double v) {
    if (!std::isfinite(v)) return number_json(v).get<std::string>();
    return json(v).dump();
}

inline void write_theta_csv(std::ostream& os, const FramingField& f) {
    os << "t,theta\n";
    for (int i = 0; i < f.grid.nodes(); ++i) os << format_number(f.grid.node(i)) << ',' << format_number(f.theta[i]) << '\n';
}

inline FramingField read_theta_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("t,theta", 0) != 0) throw InvalidArgument("theta CSV must start with header t,theta");
    std::vector<double> t, th;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw InvalidArgument("malformed theta CSV row: " + line);
        t.push_back(std::stod(line.substr(0, comma)));
        th.push_back(std::stod(line.substr(comma + 1)));
    }
    if (t.size() < 3) throw InvalidArgument("theta CSV needs at least 3 rows");
    return FramingField(Grid{t.back(), static_cast<int>(t.size()) - 1}, std::move(th));
}

// ---------------------------------------------------------------------------
// Run configuration

struct SweepConfig {
    std::vector<double> tau;
    double kappa = 1.0;
    double length = 1.0;
};

struct MeshConfig {
    double width_fraction = 0.05;   ///< w = width_fraction * l unless width is set
    std::optional<double> width;
    int samples_across = 5;
    std::optional<std::string> theta_csv;  ///< mesh an existing framing instead of solving
};

struct GradcheckConfig {
    int N = 16;
    int instances = 20;
    std::vector<double> eps{1.0, 0.1, 1e-3};
    double tolerance = 1e-5;
};

struct VerifyConfig {
    int random_framings = 1000;
    int lemma_intervals = 100;  ///< per instance
    int N = 64;                 ///< grid for random-framing probes
    bool paper_constant = false;
};

struct RunConfig {
    std::optional<std::string> command;
    std::optional<CurveSpec> curve;
    SolverConfig solver;
    std::string outputs = "out";
    std::uint64_t seed = 0;
    std::optional<SweepConfig> sweep;
    MeshConfig mesh;
    GradcheckConfig gradcheck;
    VerifyConfig verify;
};

namespace detail {

inline std::string join_key(const std::string& base, const std::string& k) { return base.empty() ? k : base + "." + k; }

inline void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw ConfigError(join_key(path, it.key()), "unknown key");
}

inline double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
    return v;
}

inline int get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
    const auto v = j.get<long long>();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw ConfigError(path, "integer out of range");
    return static_cast<int>(v);
}

inline std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

inline bool get_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
    return j.get<bool>();
}

inline std::vector<double> get_numbers(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

inline CurveSpec parse_curve(const json& j, const std::string& path) {
    only_keys(j, path, {"length", "preset", "params", "sampled"});
    const bool has_preset = j.contains("preset"), has_sampled = j.contains("sampled");
    if (has_preset == has_sampled) throw ConfigError(path, "exactly one of preset or sampled is required");
    if (has_preset) {
        if (!j.contains("length")) throw ConfigError(join_key(path, "length"), "missing");
        const double l = get_number(j["length"], join_key(path, "length"));
        const auto name = get_string(j["preset"], join_key(path, "preset"));
        const auto p = preset_from_string(name);
        if (!p) throw ConfigError(join_key(path, "preset"), "unknown preset '" + name + "'");
        if (!j.contains("params")) throw ConfigError(join_key(path, "params"), "missing");
        const auto params = get_numbers(j["params"], join_key(path, "params"));
        try {
            return make_preset(*p, params, l);
        } catch (const InvalidArgument& e) {
            throw ConfigError(join_key(path, l > 0.0 ? "params" : "length"), e.what());
        }
    }
    if (j.contains("params")) throw ConfigError(join_key(path, "params"), "only valid with preset");
    const std::string sp = join_key(path, "sampled");
    only_keys(j["sampled"], sp, {"grid", "kappa", "tau"});
    for (const char* k : {"grid", "kappa", "tau"})
        if (!j["sampled"].contains(k)) throw ConfigError(join_key(sp, k), "missing");
    auto grid = get_numbers(j["sampled"]["grid"], join_key(sp, "grid"));
    auto kappa = get_numbers(j["sampled"]["kappa"], join_key(sp, "kappa"));
    auto tau = get_numbers(j["sampled"]["tau"], join_key(sp, "tau"));
    if (j.contains("length")) {
        const double l = get_number(j["length"], join_key(path, "length"));
        if (grid.empty() || grid.back() != l) throw ConfigError(join_key(path, "length"), "must equal the last grid node");
    }
    try {
        return make_sampled(std::move(grid), std::move(kappa), std::move(tau));
    } catch (const InvalidArgument& e) {
        throw ConfigError(sp, e.what());
    }
}

inline StartRule parse_start(const json& j, const std::string& path) {
    const auto s = get_string(j, path);
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ConfigError(path, "expected 'twist:<offset>' or 'constant:<offset>'");
    const auto kind = s.substr(0, colon);
    StartRule r;
    if (kind == "twist")
        r.kind = StartKind::twist;
    else if (kind == "constant")
        r.kind = StartKind::constant;
    else
        throw ConfigError(path, "unknown start kind '" + kind + "'");
    try {
        std::size_t used = 0;
        const auto rest = s.substr(colon + 1);
        r.offset = std::stod(rest, &used);
        if (used != rest.size() || !std::isfinite(r.offset)) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw ConfigError(path, "offset is not a finite number");
    }
    return r;
}

inline void parse_solver(const json& j, const std::string& path, SolverConfig& cfg) {
    only_keys(j, path, {"N", "eps0", "eps_ratio", "eps_min", "grad_tol", "max_iters", "bc", "starts", "method"});
    auto key = [&](const char* k) { return join_key(path, k); };
    if (j.contains("N")) cfg.N = get_int(j["N"], key("N"));
    if (j.contains("eps0")) cfg.eps0 = get_number(j["eps0"], key("eps0"));
    if (j.contains("eps_ratio")) cfg.eps_ratio = get_number(j["eps_ratio"], key("eps_ratio"));
    if (j.contains("eps_min")) cfg.eps_min = get_number(j["eps_min"], key("eps_min"));
    if (j.contains("grad_tol")) cfg.grad_tol = get_number(j["grad_tol"], key("grad_tol"));
    if (j.contains("max_iters")) cfg.max_iters = get_int(j["max_iters"], key("max_iters"));
    if (j.contains("method")) {
        const auto m = get_string(j["method"], key("method"));
        if (m == "newton")
            cfg.method = Method::newton;
        else if (m == "gradient_descent")
            cfg.method = Method::gradient_descent;
        else
            throw ConfigError(key("method"), "expected 'newton' or 'gradient_descent'");
    }
    if (j.contains("bc")) {
        const auto& b = j["bc"];
        const std::string bp = key("bc");
        if (b.is_string()) {
            if (b.get<std::string>() != "free") throw ConfigError(bp, "string form only accepts 'free'");
            cfg.bc = BoundaryCondition::free();
        } else {
            only_keys(b, bp, {"type", "a", "b"});
            if (!b.contains("type")) throw ConfigError(join_key(bp, "type"), "missing");
            const auto type = get_string(b["type"], join_key(bp, "type"));
            if (type == "free") {
                if (b.contains("a") || b.contains("b")) throw ConfigError(bp, "free boundary takes no endpoint values");
                cfg.bc = BoundaryCondition::free();
            } else if (type == "dirichlet") {
                for (const char* k : {"a", "b"})
                    if (!b.contains(k)) throw ConfigError(join_key(bp, k), "missing");
                cfg.bc = BoundaryCondition::dirichlet(get_number(b["a"], join_key(bp, "a")),
                                                      get_number(b["b"], join_key(bp, "b")));
            } else {
                throw ConfigError(join_key(bp, "type"), "expected 'free' or 'dirichlet'");
            }
        }
    }
    if (j.contains("starts")) {
        const auto& s = j["starts"];
        if (!s.is_array() || s.empty()) throw ConfigError(key("starts"), "expected a nonempty array");
        cfg.starts.clear();
        for (std::size_t i = 0; i < s.size(); ++i)
            cfg.starts.push_back(parse_start(s[i], key("starts") + "[" + std::to_string(i) + "]"));
    }
    try {
        cfg.validate();
    } catch (const InvalidArgument& e) {
        const std::string msg = e.what();
        const auto sp = msg.find(' ');
        throw ConfigError(msg.substr(0, sp), msg.substr(sp + 1));
    }
}

inline json parse_tracking_keys(const std::string& text) {
    std::vector<std::string> stack;
    std::string last;
    auto cb = [&](int depth, json::parse_event_t ev, json& parsed) {
        if (ev == json::parse_event_t::key) {
            stack.resize(static_cast<std::size_t>(depth));
            stack.push_back(parsed.get<std::string>());
            last.clear();
            for (const auto& s : stack) last = join_key(last, s);
        }
        return true;
    };
    try {
        return json::parse(text, cb);
    } catch (const json::parse_error& e) {
        throw ConfigError(last.empty() ? "<root>" : last, std::string("malformed JSON near this key: ") + e.what());
    }
}

} // namespace detail

inline RunConfig parse_config(const json& j) {
    using detail::join_key;
    detail::only_keys(j, "", {"command", "curve", "solver", "outputs", "seed", "sweep", "mesh", "gradcheck", "verify"});
    RunConfig rc;
    if (j.contains("command")) {
        rc.command = detail::get_string(j["command"], "command");
        static const std::set<std::string> known{"solve", "verify", "sweep", "export-mesh", "gradcheck"};
        if (!known.count(*rc.command)) throw ConfigError("command", "unknown command '" + *rc.command + "'");
    }
    if (j.contains("curve")) rc.curve = detail::parse_curve(j["curve"], "curve");
    if (j.contains("solver")) detail::parse_solver(j["solver"], "solver", rc.solver);
    if (j.contains("outputs")) rc.outputs = detail::get_string(j["outputs"], "outputs");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
            throw ConfigError("seed", "expected a nonnegative integer");
        rc.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("sweep")) {
        const auto& s = j["sweep"];
        detail::only_keys(s, "sweep", {"tau", "kappa", "length"});
        SweepConfig sc;
        if (!s.contains("tau")) throw ConfigError("sweep.tau", "missing");
        sc.tau = detail::get_numbers(s["tau"], "sweep.tau");
        if (sc.tau.empty()) throw ConfigError("sweep.tau", "must be a nonempty list");
        if (s.contains("kappa")) sc.kappa = detail::get_number(s["kappa"], "sweep.kappa");
        if (s.contains("length")) sc.length = detail::get_number(s["length"], "sweep.length");
        if (!(sc.kappa > 0.0)) throw ConfigError("sweep.kappa", "must be positive");
        if (!(sc.length > 0.0)) throw ConfigError("sweep.length", "must be positive");
        rc.sweep = sc;
    }
    if (j.contains("mesh")) {
        const auto& m = j["mesh"];
        detail::only_keys(m, "mesh", {"width", "width_fraction", "samples_across", "theta_csv"});
        if (m.contains("width")) {
            rc.mesh.width = detail::get_number(m["width"], "mesh.width");
            if (!(*rc.mesh.width > 0.0)) throw ConfigError("mesh.width", "must be positive");
        }
        if (m.contains("width_fraction")) {
            rc.mesh.width_fraction = detail::get_number(m["width_fraction"], "mesh.width_fraction");
            if (!(rc.mesh.width_fraction > 0.0)) throw ConfigError("mesh.width_fraction", "must be positive");
        }
        if (m.contains("samples_across")) {
            rc.mesh.samples_across = detail::get_int(m["samples_across"], "mesh.samples_across");
            if (rc.mesh.samples_across < 2) throw ConfigError("mesh.samples_across", "must be at least 2");
        }
        if (m.contains("theta_csv")) rc.mesh.theta_csv = detail::get_string(m["theta_csv"], "mesh.theta_csv");
    }
    if (j.contains("gradcheck")) {
        const auto& g = j["gradcheck"];
        detail::only_keys(g, "gradcheck", {"N", "instances", "eps", "tolerance"});
        if (g.contains("N")) rc.gradcheck.N = detail::get_int(g["N"], "gradcheck.N");
        if (g.contains("instances")) rc.gradcheck.instances = detail::get_int(g["instances"], "gradcheck.instances");
        if (g.contains("eps")) rc.gradcheck.eps = detail::get_numbers(g["eps"], "gradcheck.eps");
        if (g.contains("tolerance")) rc.gradcheck.tolerance = detail::get_number(g["tolerance"], "gradcheck.tolerance");
        if (rc.gradcheck.N < 2) throw ConfigError("gradcheck.N", "must be at least 2");
        if (rc.gradcheck.instances < 1) throw ConfigError("gradcheck.instances", "must be at least 1");
        if (rc.gradcheck.eps.empty()) throw ConfigError("gradcheck.eps", "must be nonempty");
        for (double e : rc.gradcheck.eps)
            if (!(e > 0.0)) throw ConfigError("gradcheck.eps", "values must be positive");
    }
    if (j.contains("verify")) {
        const auto& v = j["verify"];
        detail::only_keys(v, "verify", {"random_framings", "lemma_intervals", "N", "paper_constant"});
        if (v.contains("random_framings"))
            rc.verify.random_framings = detail::get_int(v["random_framings"], "verify.random_framings");
        if (v.contains("lemma_intervals"))
            rc.verify.lemma_intervals = detail::get_int(v["lemma_intervals"], "verify.lemma_intervals");
        if (v.contains("N")) rc.verify.N = detail::get_int(v["N"], "verify.N");
        if (v.contains("paper_constant")) rc.verify.paper_constant = detail::get_bool(v["paper_constant"], "verify.paper_constant");
        if (rc.verify.random_framings < 1) throw ConfigError("verify.random_framings", "must be at least 1");
        if (rc.verify.lemma_intervals < 1) throw ConfigError("verify.lemma_intervals", "must be at least 1");
        if (rc.verify.N < 2) throw ConfigError("verify.N", "must be at least 2");
    }
    return rc;
}

inline RunConfig parse_config_text(const std::string& text) { return parse_config(detail::parse_tracking_keys(text)); }

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

inline json curve_json(const CurveSpec& c) {
    json j{{"length", c.length()}};
    if (const auto* p = std::get_if<PresetSource>(&c.source())) {
        j["preset"] = to_string(p->name);
        j["params"] = p->params;
    } else {
        const auto& s = std::get<SampledSource>(c.source());
        j["sampled"] = {{"grid", s.grid}, {"kappa", s.kappa}, {"tau", s.tau}};
    }
    return j;
}

} // namespace ribbonopt
