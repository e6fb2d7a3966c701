#include "nsch/linearized.hpp"

#include "nsch/spectral.hpp"
#include "nsch/stencils.hpp"

namespace nsch {

namespace {

void check(const LinearizedState& s, int step) {
    if (!all_finite(s.w) || !all_finite(s.psi) || max_abs(s.psi) > 1e6)
        throw SolverError("blow-up in sensitivity at step " + std::to_string(step), step);
}

}  // namespace

LinearizedState zero_linearized(const GridSpec& grid, double time) {
    return {FaceField(grid), ScalarField(grid), ScalarField(grid), ScalarField(grid), ScalarField(grid), time};
}

ScalarField linearized_omega(const ScalarField& psi, const State& base) {
    ScalarField r = laplacian(psi);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = -r[k] + potential_fp(base.phi[k]) * psi[k];
    return r;
}

ScalarField linearized_mu(const ScalarField& psi, const ScalarField& w_aux, const State& base,
                          const PhysParams& params) {
    ScalarField r = laplacian(w_aux);
    for (std::size_t k = 0; k < r.size(); ++k) {
        const double s = base.phi[k];
        r[k] = -r[k] + (potential_fp(s) + params.eta) * w_aux[k] + potential_fpp(s) * base.omega[k] * psi[k];
    }
    return r;
}

LinearizedState linearized_step(const State& base_n, const State& base_np1, const LinearizedState& lin_n,
                                const FaceField& h_n, double dt, const PhysParams& params, int step,
                                TransportLevel level) {
    const GridSpec& g = base_n.phi.grid();
    require_same_grid(g, lin_n.psi.grid(), "linearized_step");
    require_same_grid(g, h_n.grid(), "linearized_step control");
    const ScalarField& psi = lin_n.psi;
    const ScalarField& phi = base_n.phi;

    // Velocity: derivative of s = v + dt (korteweg + advection + variable viscosity + u).
    const ScalarField w_aux = linearized_omega(psi, base_n);
    const ScalarField theta = linearized_mu(psi, w_aux, base_n, params);
    const ScalarField nu_excess = map_field(phi, [&](double s) { return viscosity(params, s).nu - params.nu_bar; });
    const ScalarField nu_prime_psi =
        multiply(map_field(phi, [&](double s) { return viscosity(params, s).nu_prime; }), psi);

    FaceField rate = stencil::korteweg(theta, phi);
    rate += stencil::korteweg(base_n.mu, psi);
    rate -= stencil::momentum_advection(lin_n.w, base_n.v);
    rate -= stencil::momentum_advection(base_n.v, lin_n.w);
    rate += stencil::viscous_stress_divergence(nu_excess, lin_n.w);
    rate += stencil::viscous_stress_divergence(nu_prime_psi, base_n.v);
    rate += h_n;
    FaceField s = lin_n.w;
    s.axpy(dt, rate);
    NsStepResult vel = implicit_velocity_solve(s, dt, params);

    // Phase field: derivative of the explicit part of ch_step, same implicit symbol.
    const double m = params.mob_const;
    ScalarField lower = laplacian(multiply(map_field(phi, potential_fp), psi));
    for (std::size_t k = 0; k < lower.size(); ++k) {
        const double p = phi[k];
        lower[k] = -lower[k] + potential_fpp(p) * base_n.omega[k] * psi[k] + (potential_fp(p) + params.eta) * w_aux[k];
    }
    ScalarField rhs = psi;
    rhs.axpy(dt * m, laplacian(lower));
    rhs.axpy(dt * params.stabilization, laplacian(laplacian(psi)));
    rhs.axpy(-dt, stencil::scalar_flux_divergence(vel.v, phi));
    const FaceField& transport = level == TransportLevel::end_of_step ? base_np1.v : base_n.v;
    rhs.axpy(-dt, stencil::scalar_flux_divergence(transport, psi));
    if (params.nonconstant_mobility) {
        const ScalarField excess = map_field(phi, [&](double x) { return mobility(params, x).m - m; });
        const ScalarField m_prime_psi = multiply(map_field(phi, [&](double x) { return mobility(params, x).m_prime; }), psi);
        FaceField flux = multiply(average_to_faces(m_prime_psi), gradient_to_faces(base_n.mu));
        flux += multiply(average_to_faces(excess), gradient_to_faces(theta));
        rhs.axpy(dt, divergence_of_faces(flux));
    }
    ScalarField psi_next = helmholtz_poly_solve({1.0, 0.0, dt * params.stabilization, dt * m}, rhs);

    LinearizedState out;
    out.w = std::move(vel.v);
    out.q = std::move(vel.p);
    out.w_aux = linearized_omega(psi_next, base_np1);
    out.theta = linearized_mu(psi_next, out.w_aux, base_np1, params);
    out.psi = std::move(psi_next);
    out.time = base_np1.time;
    check(out, step);
    return out;
}

LinearizedTrajectory solve_linearized(const Trajectory& base, const ControlSeries& h, const PhysParams& params,
                                      TransportLevel level) {
    const int n_steps = base.n_steps();
    if (static_cast<int>(h.size()) != n_steps + 1)
        throw ModelError("solve_linearized: direction has " + std::to_string(h.size()) + " entries, expected " +
                         std::to_string(n_steps + 1));
    LinearizedTrajectory out;
    out.states.reserve(n_steps + 1);
    out.states.push_back(zero_linearized(base.grid(), 0.0));
    for (int n = 0; n < n_steps; ++n)
        out.states.push_back(linearized_step(base.states[n], base.states[n + 1], out.states.back(), h[n],
                                             base.time.dt, params, n, level));
    return out;
}

}  // namespace nsch
