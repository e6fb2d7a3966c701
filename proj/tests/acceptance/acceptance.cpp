// One PASS/FAIL line per criterion on the desk configuration.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nsch/config.hpp"
#include "nsch/control.hpp"
#include "nsch/presets.hpp"
#include "nsch/spectral.hpp"

using namespace nsch;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

ScalarField random_cells(const GridSpec& g, std::mt19937_64& rng, double amp) {
    std::uniform_real_distribution<double> d(-amp, amp);
    ScalarField f(g);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = d(rng);
    return f;
}

ControlField random_control(const GridSpec& g, int nodes, std::mt19937_64& rng, double amp) {
    std::uniform_real_distribution<double> d(-amp, amp);
    ControlField u(nodes, FaceField(g));
    for (auto& f : u) {
        for (auto& x : f.xs()) x = d(rng);
        for (auto& y : f.ys()) y = d(rng);
        f.clear_boundary();
    }
    return u;
}

RunConfig desk() { return parse_config(fs::path(NSCH_SOURCE_DIR) / "configs" / "default.cfg"); }

Outcome from(const VerifyResult& r) {
    return {r.pass, fmt("value %.4e threshold %.3e", r.value, r.threshold) + " " + r.detail};
}

Outcome mass() {
    RunConfig cfg = desk();
    cfg.initial.velocity = "vortex";
    const Problem p = build_problem(cfg);
    const ControlField u = make_control(cfg.verify_control, p.grid, p.time);
    const Trajectory t = simulate(p.v0, p.phi0, u, p.time, p.params);
    const double m0 = mean(p.phi0);
    double worst = 0.0, speed = 0.0;
    for (const auto& s : t.states) {
        worst = std::max(worst, std::abs(mean(s.phi) - m0));
        speed = std::max(speed, max_abs(s.v));
    }
    return {t.n_steps() == 100 && speed > 0.1 && worst <= 1e-12,
            fmt("%.0f steps, max|v| %.3f, max drift %.3e", t.n_steps(), speed, worst)};
}

Outcome equilibrium() {
    const RunConfig cfg = desk();
    const GridSpec& g = cfg.grid;
    const Trajectory t = simulate(FaceField(g), equilibrium_phase(g, 1.0), zero_controls(g, cfg.time), cfg.time,
                                  cfg.physics);
    double worst = 0.0;
    for (int n = 0; n < t.n_steps(); ++n) {
        const State &a = t.states[n], &b = t.states[n + 1];
        worst = std::max({worst, max_abs(b.v - a.v), max_abs(b.phi - a.phi), max_abs(b.mu - a.mu),
                          max_abs(b.omega - a.omega), max_abs(b.p - a.p)});
    }
    worst = std::max(worst, max_abs(t.states.back().phi - ScalarField(g, 1.0)));
    return {t.n_steps() == 100 && worst <= 1e-13, fmt("%.0f steps, max change per step %.3e", t.n_steps(), worst)};
}

Outcome energy() { return from(verify_energy(build_problem(desk()))); }

// (a0 + a1(-L) + a2 L^2 + a3(-L)^3) x
ScalarField apply_poly(const std::array<double, 4>& a, const ScalarField& x) {
    const ScalarField l1 = laplacian(x), l2 = laplacian(l1), l3 = laplacian(l2);
    return a[0] * x - a[1] * l1 + a[2] * l2 - a[3] * l3;
}

Outcome solvers() {
    const RunConfig cfg = desk();
    const GridSpec& g = cfg.grid;
    std::mt19937_64 rng(cfg.seed);
    double worst = 0.0;
    const double dt = cfg.time.dt;
    const std::vector<std::array<double, 4>> symbols = {
        {1.0, 0.0, dt * cfg.physics.stabilization, dt}, {1.0, 0.3, 0.2, 0.1}, {0.5, 1.0, 0.0, 0.0}, {0.0, 1.0, 0.0, 0.0}};
    for (const auto& a : symbols) {
        ScalarField rhs = random_cells(g, rng, 1.0);
        if (a[0] == 0.0) rhs = rhs - ScalarField(g, mean(rhs));
        const ScalarField x = helmholtz_poly_solve(a, rhs);
        worst = std::max(worst, max_abs(apply_poly(a, x) - rhs) / max_abs(rhs));
    }
    ScalarField rhs = random_cells(g, rng, 1.0);
    rhs = rhs - ScalarField(g, mean(rhs));
    const ScalarField p = poisson_neumann(rhs);
    worst = std::max(worst, max_abs(-1.0 * laplacian(p) - rhs) / max_abs(rhs));

    // Dense 6x6 assembly of grad (cells -> interior faces) and div (interior faces -> cells).
    const GridSpec s{6, 6, 1.5, 2.1};
    std::vector<std::pair<bool, std::size_t>> faces;
    for (int j = 0; j < s.ny; ++j)
        for (int i = 1; i < s.nx; ++i) faces.push_back({true, static_cast<std::size_t>(j * (s.nx + 1) + i)});
    for (int j = 1; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) faces.push_back({false, static_cast<std::size_t>(j * s.nx + i)});
    const std::size_t nc = s.cells(), nf = faces.size();
    std::vector<double> G(nf * nc), D(nc * nf);
    for (std::size_t c = 0; c < nc; ++c) {
        ScalarField e(s);
        e[c] = 1.0;
        const FaceField gr = gradient_to_faces(e);
        for (std::size_t f = 0; f < nf; ++f)
            G[f * nc + c] = faces[f].first ? gr.xs()[faces[f].second] : gr.ys()[faces[f].second];
    }
    for (std::size_t f = 0; f < nf; ++f) {
        FaceField e(s);
        (faces[f].first ? e.xs() : e.ys())[faces[f].second] = 1.0;
        const ScalarField dv = divergence_of_faces(e);
        for (std::size_t c = 0; c < nc; ++c) D[c * nf + f] = dv[c];
    }
    double transpose_gap = 0.0, scale = 0.0;
    for (std::size_t c = 0; c < nc; ++c)
        for (std::size_t f = 0; f < nf; ++f) {
            transpose_gap = std::max(transpose_gap, std::abs(D[c * nf + f] + G[f * nc + c]));
            scale = std::max(scale, std::abs(G[f * nc + c]));
        }
    return {worst <= 1e-10 && transpose_gap <= 1e-14 * scale && scale > 0.0,
            fmt("max relative residual %.3e, |div + grad^T| %.3e", worst, transpose_gap)};
}

Outcome frechet() {
    const RunConfig cfg = desk();
    const Problem p = build_problem(cfg);
    return from(verify_frechet(p, make_control(cfg.verify_control, p.grid, p.time), cfg.seed, cfg.verify_amplitude));
}

Outcome duality() {
    const RunConfig cfg = desk();
    const RunConfig fine_cfg = refined(cfg);
    const Problem p = build_problem(cfg), fine = build_problem(fine_cfg);
    return from(verify_duality_refinement(p, make_control(cfg.verify_control, p.grid, p.time), fine,
                                          make_control(fine_cfg.verify_control, fine.grid, fine.time), cfg.seed,
                                          cfg.verify_amplitude));
}

Outcome gradient() {
    const RunConfig cfg = desk();
    const Problem p = build_problem(cfg);
    return from(verify_gradient(p, make_control(cfg.verify_control, p.grid, p.time), cfg.seed, cfg.verify_amplitude));
}

// Optimizer run shared by the optimizer and projection criteria.
struct OptimRun {
    OptimResult result;
    int iterates = 0;
    int outside = 0;
};

const OptimRun& optimizer_run() {
    static const OptimRun run = [] {
        const RunConfig cfg = desk();
        const Problem p = build_problem(cfg);
        OptimRun r;
        OptimOptions o = cfg.optimizer;
        o.on_iterate = [&](int, const ControlField& u) {
            ++r.iterates;
            if (!p.bounds.contains(u)) ++r.outside;
        };
        r.result = optimize(make_control(cfg.control, p.grid, p.time), p, o);
        return r;
    }();
    return run;
}

Outcome optimizer() {
    const OptimReport& rep = optimizer_run().result.report;
    bool monotone = true;
    double previous = INFINITY, J0 = rep.rows.front().cost.J, J = J0;
    int iters = 0;
    for (const auto& row : rep.rows) {
        if (!row.accepted) continue;
        monotone = monotone && row.cost.J <= previous;
        previous = J = row.cost.J;
        iters = row.iter;
    }
    const double limit = 1e-3 * rep.initial_grad_norm;
    const bool pass = monotone && iters <= 50 && J <= J0 / 10.0 && rep.final_stationarity <= limit;
    std::string d = fmt("%.0f iterations, J %.4e -> %.4e", iters, J0, J) +
                    fmt(", residual %.3e limit %.3e", rep.final_stationarity, limit) +
                    (monotone ? ", monotone" : ", NOT monotone");
    return {pass, d};
}

Outcome projection() {
    const RunConfig cfg = desk();
    const GridSpec g{16, 16, cfg.grid.lx, cfg.grid.ly};
    const int nodes = cfg.time.n_steps() + 1;
    const double dt = cfg.time.dt;
    const ControlBounds& b = cfg.bounds;
    std::mt19937_64 rng(cfg.seed);

    bool idempotent = true;
    double worst_ratio = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const ControlField a = random_control(g, nodes, rng, 60.0), c = random_control(g, nodes, rng, 60.0);
        const ControlField pa = project_admissible(a, b), pc = project_admissible(c, b);
        if (k < 10) {
            const ControlField ppa = project_admissible(pa, b);
            for (int n = 0; n < nodes; ++n) idempotent = idempotent && max_abs(ppa[n] - pa[n]) == 0.0;
            idempotent = idempotent && b.contains(pa);
        }
        ControlField da = pa, dc = a;
        for (int n = 0; n < nodes; ++n) {
            da[n] = pa[n] - pc[n];
            dc[n] = a[n] - c[n];
        }
        worst_ratio = std::max(worst_ratio, control_norm(da, dt) / control_norm(dc, dt));
    }
    const OptimRun& run = optimizer_run();
    const bool pass = idempotent && worst_ratio <= 1.0 && run.outside == 0 && run.iterates >= 2;
    return {pass, fmt("max ||Pa-Pb||/||a-b|| %.6f over 1000 pairs, %.0f iterates, %.0f outside the box", worst_ratio,
                      run.iterates, run.outside) +
                      (idempotent ? ", idempotent" : ", NOT idempotent")};
}

Outcome chemical_potential() {
    const GridSpec g = desk().grid;
    PhysParams p;
    p.eta = 0.0;
    const ScalarField mu = mu_of_phi(ScalarField(g, 2.0), p).mu;
    const double c = 2.0, oracle = (3 * c * c - 1 + p.eta) * (c * c * c - c);
    const double err = max_abs(mu - ScalarField(g, oracle));
    return {oracle == 66.0 && err <= 1e-12, fmt("oracle %.1f, max error %.3e", oracle, err)};
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int run_exe(const std::string& cmd, const fs::path& err) {
    const int status = std::system(("\"" + std::string(NSCH_EXE) + "\" " + cmd + " > /dev/null 2> \"" + err.string() + "\"").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome guardrails() {
    const fs::path d = fs::temp_directory_path() / "nsch_acceptance_guardrails";
    fs::remove_all(d);
    fs::create_directories(d);
    const std::string base = slurp(fs::path(NSCH_SOURCE_DIR) / "configs" / "default.cfg") +
                             "\noutput.dir = " + (d / "out").string() + "\n";
    std::ofstream(d / "mobility.cfg") << base << "physics.nonconstant_mobility = true\nphysics.mobility_amp = 0.1\n";
    std::ofstream(d / "alphas.cfg") << base << "cost.alpha1 = 0\ncost.alpha2 = 0\ncost.alpha3 = 0\n";

    const int mob = run_exe("optimize --config \"" + (d / "mobility.cfg").string() + "\"", d / "mobility.err");
    const std::string mob_err = slurp(d / "mobility.err");
    const int alphas = run_exe("optimize --config \"" + (d / "alphas.cfg").string() + "\"", d / "alphas.err");
    const std::string alphas_err = slurp(d / "alphas.err");
    const bool pass = mob == 2 && mob_err.find("constant unit mobility") != std::string::npos && alphas == 2 &&
                      alphas_err.find("A6") != std::string::npos;
    auto first_line = [](const std::string& s) { return s.substr(0, s.find('\n')); };
    return {pass, "mobility exit " + std::to_string(mob) + " [" + first_line(mob_err) + "]; zero weights exit " +
                      std::to_string(alphas) + " [" + first_line(alphas_err) + "]"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"mass conservation", mass},
        {"equilibrium fixed point", equilibrium},
        {"energy law", energy},
        {"solver exactness", solvers},
        {"frechet property", frechet},
        {"duality identity", duality},
        {"gradient check", gradient},
        {"optimizer", optimizer},
        {"projection properties", projection},
        {"constant-field chemical potential", chemical_potential},
        {"guardrails", guardrails},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2zu: %s  %s: %s (%.1fs)\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
