#include "nsch/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "nsch/config.hpp"
#include "nsch/snapshot.hpp"

namespace nsch {

namespace {

namespace fs = std::filesystem;

std::string node_name(const char* stem, int n, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%05d.%s", stem, n, ext);
    return buf;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw ConfigError("output: cannot write '" + p.string() + "'");
    return os;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    const Problem p = build_problem(cfg);
    const ControlField u = make_control(cfg.control, p.grid, p.time);
    const Trajectory traj = simulate(p.v0, p.phi0, u, p.time, p.params);
    {
        auto os = open_out(cfg.out_dir / "diagnostics.csv");
        write_diagnostics_csv(os, traj.diagnostics);
    }
    const int n_steps = traj.n_steps();
    for (int n = 0; n <= n_steps; ++n) {
        const bool due = n == n_steps || (cfg.snapshot_stride > 0 && n % cfg.snapshot_stride == 0);
        if (!due) continue;
        write_snapshot(cfg.out_dir / node_name("phi", n, "nschf"), "phi", traj.states[n].phi, traj.states[n].time);
        write_snapshot(cfg.out_dir / node_name("v", n, "nschv"), "v", traj.states[n].v, traj.states[n].time);
    }
    const Diagnostics& last = traj.diagnostics.back();
    char buf[256];
    std::snprintf(buf, sizeof buf, "simulate: %d steps, E(T) = %.10e, kinetic(T) = %.3e, energy-balance residual %.3e\n",
                  n_steps, last.energy, last.kinetic, energy_balance_residual(traj, u));
    out << buf;
    return kExitOk;
}

int cmd_optimize(const RunConfig& cfg, std::ostream& out) {
    require_adjoint_mobility(cfg.physics);
    const Problem p = build_problem(cfg);
    const ControlField u0 = make_control(cfg.control, p.grid, p.time);
    const OptimResult r = optimize(u0, p, cfg.optimizer);
    {
        auto os = open_out(cfg.out_dir / "optim.csv");
        write_optim_csv(os, r.report);
    }
    if (cfg.snapshot_stride > 0)
        for (int n = 0; n < static_cast<int>(r.u.size()); n += cfg.snapshot_stride)
            write_snapshot(cfg.out_dir / node_name("u", n, "nschv"), "u", r.u[n], p.time.time_at(n));
    const OptimRow& first = r.report.rows.front();
    const OptimRow& last = r.report.rows.back();
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "optimize: %d iterations, J %.6e -> %.6e, stationarity %.3e (||g0|| = %.3e), %s\n", last.iter,
                  first.cost.J, last.cost.J, r.report.final_stationarity, r.report.initial_grad_norm,
                  r.report.converged ? "converged (stationary point; global optimality not certified)"
                                     : r.report.diagnosis.c_str());
    out << buf;
    return r.report.line_search_failed ? kExitNumerical : kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::vector<std::string> checks, std::ostream& out) {
    if (checks.empty()) checks = {"mass", "energy", "frechet", "duality", "gradient"};
    const bool needs_adjoint = std::find(checks.begin(), checks.end(), "duality") != checks.end() ||
                               std::find(checks.begin(), checks.end(), "gradient") != checks.end();
    if (needs_adjoint) require_adjoint_mobility(cfg.physics);
    const Problem p = build_problem(cfg);
    const ControlField u = make_control(cfg.verify_control, p.grid, p.time);
    std::vector<VerifyResult> results;
    for (const auto& c : checks) {
        if (c == "mass") results.push_back(verify_mass(p, u));
        else if (c == "energy") results.push_back(verify_energy(p));
        else if (c == "frechet") results.push_back(verify_frechet(p, u, cfg.seed, cfg.verify_amplitude));
        else if (c == "gradient") results.push_back(verify_gradient(p, u, cfg.seed, cfg.verify_amplitude));
        else if (c == "duality") {
            if (cfg.refine_duality) {
                const RunConfig fine_cfg = refined(cfg);
                const Problem fine = build_problem(fine_cfg);
                results.push_back(verify_duality_refinement(
                    p, u, fine, make_control(fine_cfg.verify_control, fine.grid, fine.time), cfg.seed,
                    cfg.verify_amplitude));
            } else {
                results.push_back(verify_duality(p, u, cfg.seed, cfg.verify_amplitude));
            }
        }
    }
    auto os = open_out(cfg.out_dir / "verify.csv");
    os << "check,pass,value,threshold,seed,detail\n";
    bool all = true;
    for (const auto& r : results) {
        char buf[1024];
        std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g,%llu,\"%s\"\n", r.name.c_str(), r.pass ? 1 : 0, r.value,
                      r.threshold, static_cast<unsigned long long>(cfg.seed), r.detail.c_str());
        os << buf;
        std::snprintf(buf, sizeof buf, "%s %-8s value %.6e threshold %.3e  %s\n", r.pass ? "PASS" : "FAIL",
                      r.name.c_str(), r.value, r.threshold, r.detail.c_str());
        out << buf;
        all = all && r.pass;
    }
    return all ? kExitOk : kExitNumerical;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Navier-Stokes / Cahn-Hilliard membrane solver with optimal control"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    auto* sim = app.add_subcommand("simulate", "forward run; writes diagnostics.csv and snapshots");
    auto* opt = app.add_subcommand("optimize", "projected-gradient minimization; writes optim.csv");
    auto* ver = app.add_subcommand("verify", "identity checks: mass energy frechet duality gradient");
    std::vector<std::string> checks;
    ver->add_option("checks", checks, "subset of checks")
        ->check(CLI::IsMember({"mass", "energy", "frechet", "duality", "gradient"}));
    bool out_given = false, seed_given = false;
    for (auto* sub : {sim, opt, ver}) {
        sub->add_option("--config", config_path, "configuration file (section.key = value)")->required();
        sub->add_option_function<std::string>(
            "--out", [&](const std::string& v) { out_dir = v, out_given = true; }, "output directory");
        sub->add_option_function<std::uint64_t>(
            "--seed", [&](const std::uint64_t& v) { seed = v, seed_given = true; }, "seed for random directions");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        RunConfig cfg = parse_config(fs::path(config_path));
        if (out_given) cfg.out_dir = out_dir;
        if (seed_given) cfg.seed = seed;
        const int threads = effective_threads(cfg);
        fs::create_directories(cfg.out_dir);
        out << "threads " << threads << ", seed " << cfg.seed << "\n";
        if (*sim) return cmd_simulate(cfg, out);
        if (*opt) return cmd_optimize(cfg, out);
        return cmd_verify(cfg, checks, out);
    } catch (const SolverError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        // ConfigError, ModelError and GridError
        err << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SnapshotError& e) {
        err << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const fs::filesystem_error& e) {
        err << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace nsch
