#include "nsch/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "nsch/presets.hpp"
#include "nsch/snapshot.hpp"

namespace nsch {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& where) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0' || !std::isfinite(x)) throw ConfigError(where + ": expected a number, got '" + v + "'");
    return x;
}

long long to_int(const std::string& v, const std::string& where) {
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || *end != '\0') throw ConfigError(where + ": expected an integer, got '" + v + "'");
    return x;
}

bool to_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(where + ": expected true or false, got '" + v + "'");
}

std::string one_of(const std::string& v, std::initializer_list<const char*> allowed, const std::string& where) {
    for (const char* a : allowed)
        if (v == a) return v;
    std::string list;
    for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
    throw ConfigError(where + ": '" + v + "' is not one of " + list);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"grid.nx", [](RunConfig& c, auto& v, auto& w) { c.grid.nx = static_cast<int>(to_int(v, w)); }},
        {"grid.ny", [](RunConfig& c, auto& v, auto& w) { c.grid.ny = static_cast<int>(to_int(v, w)); }},
        {"grid.lx", [](RunConfig& c, auto& v, auto& w) { c.grid.lx = to_double(v, w); }},
        {"grid.ly", [](RunConfig& c, auto& v, auto& w) { c.grid.ly = to_double(v, w); }},
        {"time.T", [](RunConfig& c, auto& v, auto& w) { c.time.T = to_double(v, w); }},
        {"time.dt", [](RunConfig& c, auto& v, auto& w) { c.time.dt = to_double(v, w); }},
        {"physics.eta", [](RunConfig& c, auto& v, auto& w) { c.physics.eta = to_double(v, w); }},
        {"physics.nu_bar", [](RunConfig& c, auto& v, auto& w) { c.physics.nu_bar = to_double(v, w); }},
        {"physics.nu_amp", [](RunConfig& c, auto& v, auto& w) { c.physics.nu_amp = to_double(v, w); }},
        {"physics.mobility", [](RunConfig& c, auto& v, auto& w) { c.physics.mob_const = to_double(v, w); }},
        {"physics.mobility_amp", [](RunConfig& c, auto& v, auto& w) { c.physics.mob_amp = to_double(v, w); }},
        {"physics.nonconstant_mobility",
         [](RunConfig& c, auto& v, auto& w) { c.physics.nonconstant_mobility = to_bool(v, w); }},
        {"physics.stabilization", [](RunConfig& c, auto& v, auto& w) { c.physics.stabilization = to_double(v, w); }},
        {"initial.preset",
         [](RunConfig& c, auto& v, auto& w) {
             c.initial.preset = one_of(v, {"bubble", "equilibrium", "stripe", "snapshot"}, w);
         }},
        {"initial.radius", [](RunConfig& c, auto& v, auto& w) { c.initial.radius = to_double(v, w); }},
        {"initial.width", [](RunConfig& c, auto& v, auto& w) { c.initial.width = to_double(v, w); }},
        {"initial.value", [](RunConfig& c, auto& v, auto& w) { c.initial.value = to_double(v, w); }},
        {"initial.relax_time", [](RunConfig& c, auto& v, auto& w) { c.initial.relax_time = to_double(v, w); }},
        {"initial.velocity",
         [](RunConfig& c, auto& v, auto& w) { c.initial.velocity = one_of(v, {"zero", "vortex", "snapshot"}, w); }},
        {"initial.velocity_amplitude",
         [](RunConfig& c, auto& v, auto& w) { c.initial.velocity_amplitude = to_double(v, w); }},
        {"initial.phi_file", [](RunConfig& c, auto& v, auto&) { c.initial.phi_file = v; }},
        {"initial.v_file", [](RunConfig& c, auto& v, auto&) { c.initial.v_file = v; }},
        {"control.shape",
         [](RunConfig& c, auto& v, auto& w) { c.control.shape = one_of(v, {"zero", "strain", "snapshot"}, w); }},
        {"control.amplitude", [](RunConfig& c, auto& v, auto& w) { c.control.amplitude = to_double(v, w); }},
        {"control.file", [](RunConfig& c, auto& v, auto&) { c.control.file = v; }},
        {"cost.alpha1", [](RunConfig& c, auto& v, auto& w) { c.alpha1 = to_double(v, w); }},
        {"cost.alpha2", [](RunConfig& c, auto& v, auto& w) { c.alpha2 = to_double(v, w); }},
        {"cost.alpha3", [](RunConfig& c, auto& v, auto& w) { c.alpha3 = to_double(v, w); }},
        {"cost.target",
         [](RunConfig& c, auto& v, auto& w) { c.target.kind = one_of(v, {"generated", "initial", "snapshot"}, w); }},
        {"cost.target_shape",
         [](RunConfig& c, auto& v, auto& w) {
             c.target.control.shape = one_of(v, {"zero", "strain", "snapshot"}, w);
         }},
        {"cost.target_amplitude",
         [](RunConfig& c, auto& v, auto& w) { c.target.control.amplitude = to_double(v, w); }},
        {"cost.target_file", [](RunConfig& c, auto& v, auto&) { c.target.control.file = v; }},
        {"cost.phi_Q_file", [](RunConfig& c, auto& v, auto&) { c.target.phi_Q_file = v; }},
        {"cost.phi_Omega_file", [](RunConfig& c, auto& v, auto&) { c.target.phi_Omega_file = v; }},
        {"bounds.u_min",
         [](RunConfig& c, auto& v, auto& w) { c.bounds.lo[0] = c.bounds.lo[1] = to_double(v, w); }},
        {"bounds.u_max",
         [](RunConfig& c, auto& v, auto& w) { c.bounds.hi[0] = c.bounds.hi[1] = to_double(v, w); }},
        {"bounds.u_min_x", [](RunConfig& c, auto& v, auto& w) { c.bounds.lo[0] = to_double(v, w); }},
        {"bounds.u_min_y", [](RunConfig& c, auto& v, auto& w) { c.bounds.lo[1] = to_double(v, w); }},
        {"bounds.u_max_x", [](RunConfig& c, auto& v, auto& w) { c.bounds.hi[0] = to_double(v, w); }},
        {"bounds.u_max_y", [](RunConfig& c, auto& v, auto& w) { c.bounds.hi[1] = to_double(v, w); }},
        {"optimizer.tol", [](RunConfig& c, auto& v, auto& w) { c.optimizer.tol_rel = to_double(v, w); }},
        {"optimizer.tol_abs", [](RunConfig& c, auto& v, auto& w) { c.optimizer.tol_abs = to_double(v, w); }},
        {"optimizer.max_iter",
         [](RunConfig& c, auto& v, auto& w) { c.optimizer.max_iter = static_cast<int>(to_int(v, w)); }},
        {"optimizer.armijo_c1", [](RunConfig& c, auto& v, auto& w) { c.optimizer.armijo_c1 = to_double(v, w); }},
        {"optimizer.backtrack", [](RunConfig& c, auto& v, auto& w) { c.optimizer.backtrack = to_double(v, w); }},
        {"optimizer.max_halvings",
         [](RunConfig& c, auto& v, auto& w) { c.optimizer.max_halvings = static_cast<int>(to_int(v, w)); }},
        {"optimizer.initial_step",
         [](RunConfig& c, auto& v, auto& w) { c.optimizer.initial_step = to_double(v, w); }},
        {"output.dir", [](RunConfig& c, auto& v, auto&) { c.out_dir = v; }},
        {"output.snapshot_stride",
         [](RunConfig& c, auto& v, auto& w) { c.snapshot_stride = static_cast<int>(to_int(v, w)); }},
        {"run.threads", [](RunConfig& c, auto& v, auto& w) { c.threads = static_cast<int>(to_int(v, w)); }},
        {"run.seed",
         [](RunConfig& c, auto& v, auto& w) { c.seed = static_cast<std::uint64_t>(to_int(v, w)); }},
        {"verify.shape",
         [](RunConfig& c, auto& v, auto& w) {
             c.verify_control.shape = one_of(v, {"zero", "strain", "snapshot"}, w);
         }},
        {"verify.amplitude", [](RunConfig& c, auto& v, auto& w) { c.verify_control.amplitude = to_double(v, w); }},
        {"verify.h_amplitude", [](RunConfig& c, auto& v, auto& w) { c.verify_amplitude = to_double(v, w); }},
        {"verify.file", [](RunConfig& c, auto& v, auto&) { c.verify_control.file = v; }},
        {"verify.refine", [](RunConfig& c, auto& v, auto& w) { c.refine_duality = to_bool(v, w); }},
    };
    return table;
}

void require_file(const std::filesystem::path& p, const char* field) {
    if (p.empty()) throw ConfigError(std::string(field) + ": a snapshot path is required");
    if (!std::filesystem::exists(p)) throw ConfigError(std::string(field) + ": file '" + p.string() + "' does not exist");
}

}  // namespace

RunConfig parse_config(std::istream& is) {
    RunConfig cfg;
    std::string line;
    for (int lineno = 1; std::getline(is, line); ++lineno) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno);
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'section.key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.find('.') == std::string::npos) throw ConfigError(where + ": key '" + key + "' has no section");
        const auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError(where + ": unknown key '" + key + "'");
        it->second(cfg, value, where + " (" + key + ")");
    }
    validate_config(cfg);
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    return parse_config(in);
}

void validate_config(const RunConfig& cfg) {
    try {
        cfg.grid.validate();
    } catch (const GridError& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
    try {
        cfg.time.validate();
        cfg.physics.validate();
        cfg.bounds.validate();
        CostSpec weights{cfg.alpha1, cfg.alpha2, cfg.alpha3, {}, {}};
        if (weights.alpha1 < 0.0 || weights.alpha2 < 0.0 || weights.alpha3 < 0.0 ||
            !(weights.alpha1 + weights.alpha2 + weights.alpha3 > 0.0))
            throw ModelError("A6 violated: cost weights alpha1..alpha3 must be nonnegative and not all zeros");
    } catch (const ModelError& e) {
        std::string field = "physics";
        const std::string what = e.what();
        if (what.find("A6") != std::string::npos) field = "cost.alpha1..alpha3";
        else if (what.find("A4") != std::string::npos) field = "bounds";
        else if (what.find("time") == 0) field = "time";
        else if (what.find("A1") != std::string::npos) field = "physics.nu_bar/physics.nu_amp";
        else if (what.find("A2") != std::string::npos) field = "physics.mobility";
        throw ConfigError(field + ": " + what);
    }
    if (cfg.optimizer.max_iter < 0) throw ConfigError("optimizer.max_iter: must be nonnegative");
    if (!(cfg.optimizer.armijo_c1 > 0.0 && cfg.optimizer.armijo_c1 < 1.0))
        throw ConfigError("optimizer.armijo_c1: must lie in (0,1)");
    if (!(cfg.optimizer.backtrack > 0.0 && cfg.optimizer.backtrack < 1.0))
        throw ConfigError("optimizer.backtrack: must lie in (0,1)");
    if (cfg.optimizer.tol_rel < 0.0 || cfg.optimizer.tol_abs < 0.0) throw ConfigError("optimizer.tol: must be nonnegative");
    if (cfg.snapshot_stride < 0) throw ConfigError("output.snapshot_stride: must be nonnegative");
    if (cfg.threads < 1) throw ConfigError("run.threads: must be at least 1");
    if (cfg.initial.preset == "snapshot") require_file(cfg.initial.phi_file, "initial.phi_file");
    if (cfg.initial.velocity == "snapshot") require_file(cfg.initial.v_file, "initial.v_file");
    if (cfg.control.shape == "snapshot") require_file(cfg.control.file, "control.file");
    if (cfg.verify_control.shape == "snapshot") require_file(cfg.verify_control.file, "verify.file");
    if (cfg.target.kind == "generated" && cfg.target.control.shape == "snapshot")
        require_file(cfg.target.control.file, "cost.target_file");
    if (cfg.target.kind == "snapshot") {
        if (cfg.alpha1 != 0.0) require_file(cfg.target.phi_Q_file, "cost.phi_Q_file");
        if (cfg.alpha2 != 0.0) require_file(cfg.target.phi_Omega_file, "cost.phi_Omega_file");
    }
    if (cfg.initial.preset == "bubble" && !(cfg.initial.radius > 0.0)) throw ConfigError("initial.radius: must be positive");
    if (cfg.initial.preset == "stripe" && !(cfg.initial.width > 0.0)) throw ConfigError("initial.width: must be positive");
    if (cfg.initial.relax_time < 0.0) throw ConfigError("initial.relax_time: must be nonnegative");
}

ControlField make_control(const ControlSpec& spec, const GridSpec& grid, const TimeSpec& time) {
    using std::numbers::pi;
    const std::size_t nodes = static_cast<std::size_t>(time.n_steps()) + 1;
    if (spec.shape == "snapshot") {
        FaceField f = read_face_snapshot(spec.file);
        if (!(f.grid() == grid)) throw ConfigError("control.file: snapshot grid differs from the configured grid");
        f.clear_boundary();
        return ControlField(nodes, f);
    }
    FaceField f(grid);
    if (spec.shape == "strain") {
        const double a = spec.amplitude;
        const double kx = 2.0 * pi / grid.lx, ky = 2.0 * pi / grid.ly;
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i <= grid.nx; ++i)
                f.x(i, j) = a * ky * std::sin(kx * i * grid.hx()) * std::cos(ky * (j + 0.5) * grid.hy());
        for (int j = 0; j <= grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i)
                f.y(i, j) = -a * kx * std::cos(kx * (i + 0.5) * grid.hx()) * std::sin(ky * j * grid.hy());
        f.clear_boundary();
    }
    return ControlField(nodes, f);
}

Problem build_problem(const RunConfig& cfg) {
    Problem p;
    p.grid = cfg.grid;
    p.time = cfg.time;
    p.params = cfg.physics;
    p.bounds = cfg.bounds;
    const GridSpec& g = cfg.grid;

    const InitialSpec& in = cfg.initial;
    if (in.preset == "bubble") p.phi0 = bubble_phase(g, in.radius, p.params, in.relax_time);
    else if (in.preset == "stripe") p.phi0 = stripe_phase(g, in.width, p.params, in.relax_time);
    else if (in.preset == "equilibrium") p.phi0 = equilibrium_phase(g, in.value);
    else p.phi0 = read_scalar_snapshot(in.phi_file);
    if (!(p.phi0.grid() == g)) throw ConfigError("initial.phi_file: snapshot grid differs from the configured grid");

    if (in.velocity == "vortex") p.v0 = vortex_velocity(g, in.velocity_amplitude);
    else if (in.velocity == "snapshot") p.v0 = read_face_snapshot(in.v_file);
    else p.v0 = FaceField(g);
    if (!(p.v0.grid() == g)) throw ConfigError("initial.v_file: snapshot grid differs from the configured grid");

    p.cost.alpha1 = cfg.alpha1;
    p.cost.alpha2 = cfg.alpha2;
    p.cost.alpha3 = cfg.alpha3;
    const std::size_t nodes = static_cast<std::size_t>(cfg.time.n_steps()) + 1;
    if (cfg.target.kind == "generated") {
        const ControlField u_target = make_control(cfg.target.control, g, cfg.time);
        if (!p.bounds.contains(u_target))
            throw ConfigError("cost.target_amplitude: A4 violated, the target control leaves [u_min, u_max]");
        const Trajectory t = simulate(p.v0, p.phi0, u_target, cfg.time, p.params);
        for (const auto& s : t.states) p.cost.phi_Q.push_back(s.phi);
        p.cost.phi_Omega = t.states.back().phi;
    } else if (cfg.target.kind == "initial") {
        p.cost.phi_Q.assign(nodes, p.phi0);
        p.cost.phi_Omega = p.phi0;
    } else {
        if (cfg.alpha1 != 0.0) p.cost.phi_Q.assign(nodes, read_scalar_snapshot(cfg.target.phi_Q_file));
        p.cost.phi_Omega = cfg.alpha2 != 0.0 ? read_scalar_snapshot(cfg.target.phi_Omega_file) : ScalarField(g);
    }
    try {
        p.cost.validate(g, static_cast<int>(nodes));
    } catch (const ModelError& e) {
        throw ConfigError(std::string("cost: ") + e.what());
    }
    return p;
}

RunConfig refined(const RunConfig& cfg) {
    RunConfig r = cfg;
    r.grid.nx *= 2;
    r.grid.ny *= 2;
    r.time.dt *= 0.5;
    return r;
}

int effective_threads(const RunConfig& cfg) {
    if (const char* env = std::getenv("NSCH_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (*env == '\0' || *end != '\0' || n < 1) throw ConfigError("NSCH_THREADS: expected a positive integer");
        return static_cast<int>(n);
    }
    return cfg.threads;
}

}  // namespace nsch
