#include "nsch/control.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "nsch/linearized.hpp"

namespace nsch {

namespace {

// Face inner product with half weight on the wall-normal faces.
double face_dot_walls(const FaceField& a, const FaceField& b) {
    const GridSpec& g = a.grid();
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) s += (i == 0 || i == g.nx ? 0.5 : 1.0) * a.x(i, j) * b.x(i, j);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) s += (j == 0 || j == g.ny ? 0.5 : 1.0) * a.y(i, j) * b.y(i, j);
    return s * g.cell_volume();
}

void require_shape(const ControlField& a, const ControlField& b, const char* what) {
    if (a.size() != b.size()) throw ModelError(std::string(what) + ": control series lengths differ");
}

double bound_at(const ControlField& field, double constant, std::size_t n, bool x, std::size_t k) {
    if (field.empty()) return constant;
    return x ? field[n].xs()[k] : field[n].ys()[k];
}

ControlField axpy_series(const ControlField& u, double s, const ControlField& h) {
    ControlField r = u;
    for (std::size_t n = 0; n < r.size(); ++n) r[n].axpy(s, h[n]);
    return r;
}

double reduced_cost(const Problem& p, const ControlField& u) {
    return evaluate_cost(simulate(p.v0, p.phi0, u, p.time, p.params), u, p.cost).J;
}

char* fmt(char* buf, std::size_t n, const char* f, double a, double b = 0.0, double c = 0.0) {
    std::snprintf(buf, n, f, a, b, c);
    return buf;
}

}  // namespace

double ControlBounds::radius() const {
    double r = std::max({std::abs(lo[0]), std::abs(lo[1]), std::abs(hi[0]), std::abs(hi[1])});
    for (const auto* series : {&lo_field, &hi_field})
        for (const auto& f : *series) r = std::max(r, max_abs(f));
    return r + 1.0;
}

void ControlBounds::validate() const {
    if (lo_field.size() != hi_field.size())
        throw ModelError("A4 violated: bound fields u_min and u_max must both be given");
    for (int c = 0; c < 2; ++c)
        if (!(lo[c] <= hi[c])) throw ModelError("A4 violated: u_min must not exceed u_max");
    for (std::size_t n = 0; n < lo_field.size(); ++n) {
        const auto check = [](std::span<const double> a, std::span<const double> b) {
            for (std::size_t k = 0; k < a.size(); ++k)
                if (!(a[k] <= b[k])) throw ModelError("A4 violated: u_min must not exceed u_max");
        };
        check(lo_field[n].xs(), hi_field[n].xs());
        check(lo_field[n].ys(), hi_field[n].ys());
    }
}

bool ControlBounds::contains(const ControlField& u) const {
    for (std::size_t n = 0; n < u.size(); ++n) {
        for (std::size_t k = 0; k < u[n].xs().size(); ++k) {
            const double x = u[n].xs()[k];
            if (x < bound_at(lo_field, lo[0], n, true, k) || x > bound_at(hi_field, hi[0], n, true, k)) return false;
        }
        for (std::size_t k = 0; k < u[n].ys().size(); ++k) {
            const double y = u[n].ys()[k];
            if (y < bound_at(lo_field, lo[1], n, false, k) || y > bound_at(hi_field, hi[1], n, false, k)) return false;
        }
    }
    return true;
}

double control_dot(const ControlField& a, const ControlField& b, double dt) {
    require_shape(a, b, "control_dot");
    double s = 0.0;
    for (std::size_t n = 0; n + 1 < a.size(); ++n) s += dt * face_dot_walls(a[n], b[n]);
    return s;
}

double control_norm(const ControlField& a, double dt) { return std::sqrt(control_dot(a, a, dt)); }

CostValue evaluate_cost(const Trajectory& traj, const ControlField& u, const CostSpec& cost) {
    const int n_steps = traj.n_steps();
    const double dt = traj.time.dt;
    if (static_cast<int>(u.size()) != n_steps + 1) throw ModelError("evaluate_cost: control/time grid mismatch");
    cost.validate(traj.grid(), n_steps + 1);
    CostValue c;
    if (cost.alpha1 != 0.0) {
        for (int n = 0; n <= n_steps; ++n) {
            const ScalarField d = traj.states[n].phi - cost.phi_Q[n];
            c.track += trapezoid_weight(n, n_steps, dt) * dot(d, d);
        }
        c.track *= 0.5 * cost.alpha1;
    }
    if (cost.alpha2 != 0.0) {
        const ScalarField d = traj.states.back().phi - cost.phi_Omega;
        c.terminal = 0.5 * cost.alpha2 * dot(d, d);
    }
    if (cost.alpha3 != 0.0) c.control = 0.5 * cost.alpha3 * control_dot(u, u, dt);
    c.J = c.track + c.terminal + c.control;
    return c;
}

ControlField reduced_gradient(const ControlField& u, const AdjointTrajectory& adj, const CostSpec& cost) {
    if (u.size() != adj.states.size()) throw ModelError("reduced_gradient: control/adjoint trajectory mismatch");
    ControlField g(u.size());
    for (std::size_t n = 0; n < u.size(); ++n) {
        g[n] = adj.states[n].va;
        g[n].axpy(cost.alpha3, u[n]);
    }
    return g;
}

ControlField project_admissible(const ControlField& u, const ControlBounds& bounds) {
    ControlField r = u;
    for (std::size_t n = 0; n < r.size(); ++n) {
        auto xs = r[n].xs();
        for (std::size_t k = 0; k < xs.size(); ++k)
            xs[k] = std::clamp(xs[k], bound_at(bounds.lo_field, bounds.lo[0], n, true, k),
                               bound_at(bounds.hi_field, bounds.hi[0], n, true, k));
        auto ys = r[n].ys();
        for (std::size_t k = 0; k < ys.size(); ++k)
            ys[k] = std::clamp(ys[k], bound_at(bounds.lo_field, bounds.lo[1], n, false, k),
                               bound_at(bounds.hi_field, bounds.hi[1], n, false, k));
    }
    return r;
}

double stationarity_residual(const ControlField& u, const ControlField& g, const ControlBounds& bounds, double step,
                             double dt) {
    if (!(step > 0.0)) throw ModelError("stationarity_residual: step must be positive");
    ControlField d = project_admissible(axpy_series(u, -step, g), bounds);
    for (std::size_t n = 0; n < d.size(); ++n) d[n] = u[n] - d[n];
    return control_norm(d, dt);
}

OptimResult optimize(const ControlField& u0, const Problem& problem, const OptimOptions& options) {
    require_adjoint_mobility(problem.params);
    problem.bounds.validate();
    const double dt = problem.time.dt;
    if (static_cast<int>(u0.size()) != problem.time.n_steps() + 1)
        throw ModelError("optimize: initial control has the wrong number of time nodes");
    if (!problem.bounds.contains(u0)) throw ModelError("A4 violated: initial control is not admissible");
    const double s0 = options.initial_step > 0.0 ? options.initial_step
                      : problem.cost.alpha3 > 0.0 ? 1.0 / problem.cost.alpha3
                                                  : 1.0;

    OptimResult res{u0, {}};
    OptimReport& rep = res.report;
    Trajectory traj = simulate(problem.v0, problem.phi0, res.u, problem.time, problem.params);
    CostValue cost = evaluate_cost(traj, res.u, problem.cost);
    double tol = options.tol_abs;
    if (options.on_iterate) options.on_iterate(0, res.u);

    for (int k = 0;; ++k) {
        const AdjointTrajectory adj = solve_adjoint(traj, problem.cost, problem.params);
        const ControlField g = reduced_gradient(res.u, adj, problem.cost);
        OptimRow row;
        row.iter = k;
        row.cost = cost;
        row.grad_norm = control_norm(g, dt);
        row.stationarity = stationarity_residual(res.u, g, problem.bounds, 1.0, dt);
        if (k == 0) {
            rep.initial_grad_norm = row.grad_norm;
            tol = std::max(tol, options.tol_rel * row.grad_norm);
        }
        rep.final_stationarity = row.stationarity;
        rep.final_gradient_norm = row.grad_norm;
        if (row.stationarity <= tol) {
            rep.converged = true;
            rep.rows.push_back(row);
            break;
        }
        if (k >= options.max_iter) {
            rep.diagnosis = "maximum number of iterations reached";
            rep.rows.push_back(row);
            break;
        }

        double s = s0;
        bool accepted = false;
        for (int h = 0; h <= options.max_halvings; ++h, s *= options.backtrack) {
            ControlField trial = project_admissible(axpy_series(res.u, -s, g), problem.bounds);
            ControlField step_vec = trial;
            for (std::size_t n = 0; n < trial.size(); ++n) step_vec[n] -= res.u[n];
            const double moved = control_norm(step_vec, dt);
            Trajectory trial_traj;
            try {
                trial_traj = simulate(problem.v0, problem.phi0, trial, problem.time, problem.params);
            } catch (const SolverError&) {
                continue;
            }
            const CostValue trial_cost = evaluate_cost(trial_traj, trial, problem.cost);
            // Projected Armijo test; equals J - c1 s ||g||^2 when no bound is active.
            if (trial_cost.J <= cost.J - options.armijo_c1 / s * moved * moved) {
                res.u = std::move(trial);
                traj = std::move(trial_traj);
                cost = trial_cost;
                accepted = true;
                if (options.on_iterate) options.on_iterate(k + 1, res.u);
                break;
            }
        }
        row.step = accepted ? s : s / options.backtrack;
        row.accepted = accepted;
        rep.rows.push_back(row);
        if (!accepted) {
            rep.line_search_failed = true;
            char buf[256];
            rep.diagnosis = fmt(buf, sizeof buf,
                                "line search failed after %g halvings: no sufficient decrease along the projected "
                                "gradient (stationarity %.3e, gradient norm %.3e); the gradient may be inaccurate "
                                "or the iterate is already stationary to working precision",
                                options.max_halvings, row.stationarity, row.grad_norm);
            break;
        }
    }
    return res;
}

void write_optim_csv(std::ostream& os, const OptimReport& report) {
    os << "iter,J,J_track,J_terminal,J_control,grad_norm,stationarity,step,accepted\n";
    char buf[512];
    for (const auto& r : report.rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.iter, r.cost.J,
                      r.cost.track, r.cost.terminal, r.cost.control, r.grad_norm, r.stationarity, r.step,
                      r.accepted ? 1 : 0);
        os << buf;
    }
}

// ---- verification ------------------------------------------------------------

ControlField random_smooth_control(const GridSpec& grid, const TimeSpec& time, std::uint64_t seed,
                                   double amplitude) {
    using std::numbers::pi;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    struct Mode {
        int p, q;
        double a, b0, b1;
    };
    // Every (p, q) in {1,2,3}^2 so that no parity class is missing.
    std::array<std::vector<Mode>, 2> modes;
    for (auto& comp : modes)
        for (int p = 1; p <= 3; ++p)
            for (int q = 1; q <= 3; ++q) {
                const double a = coef(rng), b0 = coef(rng), b1 = coef(rng);
                comp.push_back({p, q, a, b0, b1});
            }
    std::array<double, 2> scale{};
    for (int c = 0; c < 2; ++c) {
        double s = 0.0;
        for (const auto& md : modes[c]) s += std::abs(md.a) * (std::abs(md.b0) + std::abs(md.b1));
        scale[c] = s > 0.0 ? amplitude / s : 0.0;
    }
    const int n_steps = time.n_steps();
    ControlField h(static_cast<std::size_t>(n_steps) + 1, FaceField(grid));
    for (int n = 0; n <= n_steps; ++n) {
        const double t = time.time_at(n) / time.T;
        FaceField& f = h[n];
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i <= grid.nx; ++i) {
                const double x = i * grid.hx() / grid.lx, y = (j + 0.5) * grid.hy() / grid.ly;
                double s = 0.0;
                for (const auto& md : modes[0])
                    s += md.a * std::sin(md.p * pi * x) * std::cos(md.q * pi * y) * (md.b0 + md.b1 * std::cos(pi * t));
                f.x(i, j) = scale[0] * s;
            }
        for (int j = 0; j <= grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i) {
                const double x = (i + 0.5) * grid.hx() / grid.lx, y = j * grid.hy() / grid.ly;
                double s = 0.0;
                for (const auto& md : modes[1])
                    s += md.a * std::cos(md.p * pi * x) * std::sin(md.q * pi * y) * (md.b0 + md.b1 * std::cos(pi * t));
                f.y(i, j) = scale[1] * s;
            }
        f.clear_boundary();
    }
    return h;
}

VerifyResult verify_mass(const Problem& p, const ControlField& u) {
    const Trajectory traj = simulate(p.v0, p.phi0, u, p.time, p.params);
    const double m0 = mean(traj.states.front().phi);
    double worst = 0.0;
    for (const auto& s : traj.states) worst = std::max(worst, std::abs(mean(s.phi) - m0));
    char buf[160];
    return {"mass", worst <= 1e-12, worst, 1e-12,
            fmt(buf, sizeof buf, "max |mean(phi_n) - mean(phi_0)| over %g nodes", traj.states.size())};
}

VerifyResult verify_energy(const Problem& p) {
    const double dt = std::min(p.time.dt, 5e-4);
    double residual[2];
    bool monotone = true;
    for (int level = 0; level < 2; ++level) {
        TimeSpec t{p.time.T, dt / (1 << level)};
        const ControlField zero = zero_controls(p.grid, t);
        const Trajectory traj = simulate(p.v0, p.phi0, zero, t, p.params);
        for (std::size_t n = 1; n < traj.diagnostics.size(); ++n) {
            const auto& a = traj.diagnostics[n - 1];
            const auto& b = traj.diagnostics[n];
            if (b.kinetic + b.energy > a.kinetic + a.energy) monotone = false;
        }
        residual[level] = energy_balance_residual(traj, zero);
    }
    const double ratio = residual[0] / residual[1];
    char buf[256];
    return {"energy", monotone && ratio >= 1.7 && ratio <= 2.3, ratio, 1.7,
            fmt(buf, sizeof buf, "residual %.3e -> %.3e under dt halving (ratio in [1.7,2.3]); monotone=%g",
                residual[0], residual[1], monotone ? 1.0 : 0.0)};
}

namespace {

ControlField admissible_direction(const Problem& p, const ControlField& u, std::uint64_t seed, double amplitude) {
    ControlField h = random_smooth_control(p.grid, p.time, seed, amplitude);
    if (!p.bounds.contains(axpy_series(u, 0.1, h)) || !p.bounds.contains(u))
        throw ModelError("A4 violated: verification control u + 0.1 h leaves [u_min, u_max]");
    return h;
}

double trajectory_distance(const Trajectory& a, const Trajectory& b, const LinearizedTrajectory& lin, double eps) {
    const int n_steps = a.n_steps();
    double e = 0.0;
    for (int n = 0; n <= n_steps; ++n) {
        ScalarField d = a.states[n].phi - b.states[n].phi;
        d.axpy(-eps, lin.states[n].psi);
        e += trapezoid_weight(n, n_steps, a.time.dt) * dot(d, d);
    }
    return std::sqrt(e) / eps;
}

}  // namespace

VerifyResult verify_frechet(const Problem& p, const ControlField& u, std::uint64_t seed, double amplitude) {
    const ControlField h = admissible_direction(p, u, seed, amplitude);
    const Trajectory base = simulate(p.v0, p.phi0, u, p.time, p.params);
    const LinearizedTrajectory lin = solve_linearized(base, h, p.params);
    const auto e_at = [&](double eps) {
        return trajectory_distance(simulate(p.v0, p.phi0, axpy_series(u, eps, h), p.time, p.params), base, lin, eps);
    };
    double floor = std::numeric_limits<double>::infinity();
    for (double eps : {1e-3, 1e-4, 1e-5, 1e-6}) floor = std::min(floor, e_at(eps));
    const double e[3] = {e_at(1e-1), e_at(5e-2), e_at(2.5e-2)};
    // Ratios are required only while the finer error is still above 5x the floor.
    double worst = e[0] / e[1];
    bool pass = true;
    int tested = 0;
    for (int k = 0; k < 2; ++k) {
        if (e[k + 1] <= 5.0 * floor) break;
        const double ratio = e[k] / e[k + 1];
        worst = tested++ ? std::min(worst, ratio) : ratio;
        if (ratio < 1.8) pass = false;
    }
    char buf[256];
    std::snprintf(buf, sizeof buf, "e(0.1)=%.3e e(0.05)=%.3e e(0.025)=%.3e floor=%.3e, %d ratio(s) above the floor",
                  e[0], e[1], e[2], floor, tested);
    return {"frechet", pass, worst, 1.8, buf};
}

VerifyResult verify_duality(const Problem& p, const ControlField& u, std::uint64_t seed, double amplitude) {
    const ControlField h = admissible_direction(p, u, seed, amplitude);
    const Trajectory base = simulate(p.v0, p.phi0, u, p.time, p.params);
    const LinearizedTrajectory lin = solve_linearized(base, h, p.params);
    const AdjointTrajectory adj = solve_adjoint(base, p.cost, p.params);
    const int n_steps = base.n_steps();
    const double dt = p.time.dt;
    ControlField va(adj.states.size());
    for (std::size_t n = 0; n < va.size(); ++n) va[n] = adj.states[n].va;
    const double lhs = control_dot(h, va, dt);
    double rhs = 0.0;
    if (p.cost.alpha1 != 0.0)
        for (int n = 0; n <= n_steps; ++n)
            rhs += p.cost.alpha1 * trapezoid_weight(n, n_steps, dt) *
                   dot(base.states[n].phi - p.cost.phi_Q[n], lin.states[n].psi);
    if (p.cost.alpha2 != 0.0) rhs += p.cost.alpha2 * dot(base.states.back().phi - p.cost.phi_Omega, lin.states.back().psi);
    const double denom = std::abs(lhs) + std::abs(rhs);
    const double mismatch = denom > 0.0 ? std::abs(lhs - rhs) / denom : 0.0;
    char buf[256];
    return {"duality", mismatch <= 1e-2, mismatch, 1e-2,
            fmt(buf, sizeof buf, "int_Q h.va = %.6e, tracking pairing = %.6e", lhs, rhs)};
}

VerifyResult verify_duality_refinement(const Problem& coarse, const ControlField& u_coarse, const Problem& fine,
                                       const ControlField& u_fine, std::uint64_t seed, double amplitude) {
    const VerifyResult a = verify_duality(coarse, u_coarse, seed, amplitude);
    const VerifyResult b = verify_duality(fine, u_fine, seed, amplitude);
    char buf[256];
    return {"duality", a.pass && b.value < a.value, a.value, 1e-2,
            fmt(buf, sizeof buf, "relative mismatch %.3e at the base resolution, %.3e after halving h and dt", a.value,
                b.value)};
}

VerifyResult verify_gradient(const Problem& p, const ControlField& u, std::uint64_t seed, double amplitude) {
    const Trajectory base = simulate(p.v0, p.phi0, u, p.time, p.params);
    const ControlField g = reduced_gradient(u, solve_adjoint(base, p.cost, p.params), p.cost);
    constexpr double eps = 1e-3;
    double fd[3], ad[3];
    for (int k = 0; k < 3; ++k) {
        const ControlField h = admissible_direction(p, u, seed + k, amplitude);
        fd[k] = (reduced_cost(p, axpy_series(u, eps, h)) - reduced_cost(p, axpy_series(u, -eps, h))) / (2.0 * eps);
        ad[k] = control_dot(g, h, p.time.dt);
    }
    double dd = 0.0, ff = 0.0, aa = 0.0;
    for (int k = 0; k < 3; ++k) {
        dd += fd[k] * ad[k];
        ff += fd[k] * fd[k];
        aa += ad[k] * ad[k];
    }
    const double cosine = dd / std::sqrt(ff * aa);
    const double magnitude = std::abs(std::sqrt(aa) - std::sqrt(ff)) / std::sqrt(ff);
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "cosine %.6f (>= 0.999), magnitude error %.3e (<= 2e-2); fd = [%.6e %.6e %.6e], <g,h> = [%.6e %.6e "
                  "%.6e]",
                  cosine, magnitude, fd[0], fd[1], fd[2], ad[0], ad[1], ad[2]);
    return {"gradient", cosine >= 0.999 && magnitude <= 2e-2, cosine, 0.999, buf};
}

}  // namespace nsch
