#include "nsch/state.hpp"

#include <cmath>
#include <ostream>

#include "nsch/spectral.hpp"
#include "nsch/stencils.hpp"

namespace nsch {

namespace {

constexpr double kBlowUp = 1e6;

void check_scalar(const ScalarField& f, const char* what, int step) {
    if (!all_finite(f) || max_abs(f) > kBlowUp)
        throw SolverError(std::string("blow-up in ") + what + " at step " + std::to_string(step), step);
}

void check_faces(const FaceField& f, const char* what, int step) {
    if (!all_finite(f)) throw SolverError(std::string("blow-up in ") + what + " at step " + std::to_string(step), step);
}

// N(phi) = -L f(phi) + (f'(phi) + eta) omega(phi): mu without its L^2 phi part.
ScalarField lower_order_mu(const ScalarField& phi, const PhysParams& params) {
    ScalarField n = laplacian(map_field(phi, potential_f));
    const ScalarField omega = omega_of_phi(phi);
    for (std::size_t k = 0; k < n.size(); ++k) n[k] = -n[k] + (potential_fp(phi[k]) + params.eta) * omega[k];
    return n;
}

ScalarField viscosity_excess(const ScalarField& phi, const PhysParams& params) {
    return map_field(phi, [&](double s) { return viscosity(params, s).nu - params.nu_bar; });
}

double total_viscous_work(const FaceField& v, const ScalarField& phi, const PhysParams& params) {
    return -params.nu_bar * dot(face_laplacian(v), v) + stencil::viscous_work(viscosity_excess(phi, params), v);
}

Diagnostics diagnose(const State& s, int step, double diss_v, double diss_mu, const PhysParams& params) {
    const FreeEnergy e = free_energy(s.phi, params);
    Diagnostics d;
    d.step = step;
    d.time = s.time;
    d.mass = integral(s.phi);
    d.willmore = e.willmore;
    d.gl = e.gl;
    d.energy = e.total;
    d.kinetic = 0.5 * dot(s.v, s.v);
    d.dissipation_v = diss_v;
    d.dissipation_mu = diss_mu;
    d.divergence_max = max_abs(divergence_of_faces(s.v));
    return d;
}

}  // namespace

int TimeSpec::n_steps() const { return static_cast<int>(std::llround(T / dt)); }

void TimeSpec::validate() const {
    if (!(dt > 0.0) || !(T > 0.0)) throw ModelError("time: T and dt must be positive");
    if (std::abs(n_steps() * dt - T) > 1e-12 * std::max(1.0, T))
        throw ModelError("time: T must be an integer multiple of dt");
}

ControlSeries zero_controls(const GridSpec& grid, const TimeSpec& time) {
    return ControlSeries(static_cast<std::size_t>(time.n_steps()) + 1, FaceField(grid));
}

State make_state(const FaceField& v, const ScalarField& phi, const PhysParams& params, double time) {
    ChemicalPotential cp = mu_of_phi(phi, params);
    return {v, ScalarField(phi.grid()), phi, std::move(cp.mu), std::move(cp.omega), time};
}

ScalarField ch_step(const ScalarField& phi_n, const FaceField& v, double dt, const PhysParams& params, int step) {
    require_same_grid(phi_n.grid(), v.grid(), "ch_step");
    const double m = params.mob_const;
    ScalarField rhs = phi_n;
    rhs.axpy(dt * m, laplacian(lower_order_mu(phi_n, params)));
    rhs.axpy(dt * params.stabilization, laplacian(laplacian(phi_n)));
    rhs.axpy(-dt, advect_scalar(v, phi_n));
    if (params.nonconstant_mobility) {
        const ScalarField mu = mu_of_phi(phi_n, params).mu;
        const ScalarField excess = map_field(phi_n, [&](double s) { return mobility(params, s).m - m; });
        rhs.axpy(dt, divergence_of_faces(multiply(average_to_faces(excess), gradient_to_faces(mu))));
    }
    ScalarField next = helmholtz_poly_solve({1.0, 0.0, dt * params.stabilization, dt * m}, rhs);
    check_scalar(next, "phase field", step);
    return next;
}

FaceField velocity_tendency(const FaceField& v, const ScalarField& phi, const ScalarField& mu,
                            const PhysParams& params) {
    FaceField f = stencil::korteweg(mu, phi);
    f -= stencil::momentum_advection(v, v);
    f += stencil::viscous_stress_divergence(viscosity_excess(phi, params), v);
    return f;
}

NsStepResult implicit_velocity_solve(const FaceField& s, double dt, const PhysParams& params) {
    FaceField masked = s;
    masked.clear_boundary();
    Projection first = project_divergence_free(masked, dt);
    Projection second = project_divergence_free(face_helmholtz_solve(dt * params.nu_bar, first.velocity), dt);
    second.pressure += first.pressure;
    return {std::move(second.velocity), std::move(second.pressure)};
}

NsStepResult ns_step(const FaceField& v_n, const ScalarField& phi_n, const ScalarField& mu_n, const FaceField& u_n,
                     double dt, const PhysParams& params, int step) {
    require_same_grid(v_n.grid(), phi_n.grid(), "ns_step");
    require_same_grid(v_n.grid(), u_n.grid(), "ns_step control");
    FaceField s = v_n;
    FaceField rate = velocity_tendency(v_n, phi_n, mu_n, params);
    rate += u_n;
    s.axpy(dt, rate);
    NsStepResult r = implicit_velocity_solve(s, dt, params);
    check_faces(r.v, "velocity", step);
    check_scalar(r.p, "pressure", step);
    return r;
}

Trajectory simulate(const FaceField& v0, const ScalarField& phi0, const ControlSeries& u, const TimeSpec& time,
                    const PhysParams& params) {
    time.validate();
    params.validate();
    require_same_grid(v0.grid(), phi0.grid(), "simulate");
    const GridSpec& g = phi0.grid();
    const int n_steps = time.n_steps();
    if (static_cast<int>(u.size()) != n_steps + 1)
        throw ModelError("simulate: control series has " + std::to_string(u.size()) + " entries, expected " +
                         std::to_string(n_steps + 1));
    if (!all_finite(phi0) || !all_finite(v0)) throw ModelError("simulate: non-finite initial data");
    if (v0.max_boundary_normal() != 0.0) throw ModelError("simulate: initial velocity must vanish on the wall");
    if (max_abs(divergence_of_faces(v0)) > 1e-8 * std::max(1.0, max_abs(v0) / std::min(g.hx(), g.hy())))
        throw ModelError("simulate: initial velocity is not divergence-free");

    Trajectory traj;
    traj.time = time;
    traj.states.reserve(n_steps + 1);
    traj.diagnostics.reserve(n_steps + 1);
    traj.states.push_back(make_state(v0, phi0, params, 0.0));
    traj.diagnostics.push_back(diagnose(traj.states.back(), 0, 0.0, 0.0, params));

    double diss_v = 0.0;
    double diss_mu = 0.0;
    for (int n = 0; n < n_steps; ++n) {
        const State& cur = traj.states.back();
        NsStepResult ns = ns_step(cur.v, cur.phi, cur.mu, u[n], time.dt, params, n);
        ScalarField phi = ch_step(cur.phi, ns.v, time.dt, params, n);
        State next = make_state(ns.v, phi, params, time.time_at(n + 1));
        next.p = std::move(ns.p);

        diss_v += time.dt * total_viscous_work(next.v, next.phi, params);
        const FaceField grad_mu = gradient_to_faces(next.mu);
        const ScalarField mob = map_field(next.phi, [&](double s) { return mobility(params, s).m; });
        diss_mu += time.dt * dot(multiply(average_to_faces(mob), grad_mu), grad_mu);

        traj.states.push_back(std::move(next));
        traj.diagnostics.push_back(diagnose(traj.states.back(), n + 1, diss_v, diss_mu, params));
    }
    return traj;
}

void write_diagnostics_csv(std::ostream& os, const std::vector<Diagnostics>& diags) {
    os << "step,time,mass,energy,willmore,gl,kinetic,dissipation_v,dissipation_mu,divergence_max\n";
    char buf[512];
    for (const auto& d : diags) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", d.step, d.time,
                      d.mass, d.energy, d.willmore, d.gl, d.kinetic, d.dissipation_v, d.dissipation_mu,
                      d.divergence_max);
        os << buf;
    }
}

double energy_balance_residual(const Trajectory& traj, const ControlSeries& u) {
    const Diagnostics& first = traj.diagnostics.front();
    const Diagnostics& last = traj.diagnostics.back();
    double work = 0.0;
    for (int n = 0; n < traj.n_steps(); ++n) work += traj.time.dt * dot(u[n], traj.states[n + 1].v);
    return (last.kinetic + last.energy + last.dissipation_v + last.dissipation_mu) - (first.kinetic + first.energy) -
           work;
}

}  // namespace nsch
