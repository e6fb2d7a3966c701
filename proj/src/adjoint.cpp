#include "nsch/adjoint.hpp"

#include "nsch/spectral.hpp"
#include "nsch/stencils.hpp"

namespace nsch {

namespace {

// Transpose of the frozen velocity tendency w -> -adv(w,v) - adv(v,w) + V(nu - nu_bar, w).
FaceField velocity_tendency_transpose(const FaceField& r, const State& base, const PhysParams& params) {
    const ScalarField nu_excess =
        map_field(base.phi, [&](double s) { return viscosity(params, s).nu - params.nu_bar; });
    FaceField out = stencil::viscous_stress_divergence(nu_excess, r);
    out -= stencil::momentum_advection_transport_transpose(base.v, r);
    out -= stencil::momentum_advection_transported_transpose(base.v, r);
    return out;
}

// (-L + a) x
ScalarField shifted_neg_laplacian(const ScalarField& x, const ScalarField& a) {
    ScalarField r = laplacian(x);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = -r[k] + a[k] * x[k];
    return r;
}

}  // namespace

void require_adjoint_mobility(const PhysParams& params) {
    if (!params.constant_unit_mobility())
        throw ModelError(
            "optimality system precondition violated: the adjoint and the optimizer require constant unit mobility "
            "m = 1");
}

void complete_adjoint(AdjointState& a, const State& base, const PhysParams& params) {
    a.mua = laplacian(a.phia);
    a.mua *= -1.0;
    a.mua -= stencil::face_dot_to_cells(gradient_to_faces(base.phi), a.va);
    a.omegaa = laplacian(a.mua);
    for (std::size_t k = 0; k < a.omegaa.size(); ++k)
        a.omegaa[k] = -a.omegaa[k] + (potential_fp(base.phi[k]) + params.eta) * a.mua[k];
}

AdjointState adjoint_terminal(const State& base_T, const CostSpec& cost, const PhysParams& params) {
    const GridSpec& g = base_T.phi.grid();
    AdjointState a{FaceField(g), ScalarField(g), ScalarField(g), {}, {}, base_T.time};
    if (cost.alpha2 != 0.0) {
        a.phia = base_T.phi - cost.phi_Omega;
        a.phia *= cost.alpha2;
    }
    complete_adjoint(a, base_T, params);
    return a;
}

AdjointState adjoint_step(const State& base_n, const State& base_np1, const AdjointState& adj_np1,
                          const ScalarField& source_np1, double dt, const PhysParams& params, int step) {
    require_adjoint_mobility(params);
    const GridSpec& g = base_n.phi.grid();
    require_same_grid(g, adj_np1.phia.grid(), "adjoint_step");
    const ScalarField& phi = base_n.phi;

    // Multipliers of (w_{n+1}, psi_{n+1}) including their own later use.
    FaceField lam_w = adj_np1.va;
    lam_w.axpy(dt, velocity_tendency_transpose(adj_np1.va, base_np1, params));
    ScalarField lam_psi = adj_np1.phia + source_np1;

    const ScalarField xi = helmholtz_poly_solve({1.0, 0.0, dt * params.stabilization, dt}, lam_psi);

    // w_{n+1} also transports phi_n inside the phase-field update.
    FaceField sigma = lam_w;
    sigma.axpy(-dt, stencil::scalar_flux_divergence_transpose_velocity(phi, xi));
    NsStepResult proj = implicit_velocity_solve(sigma, dt, params);

    const ScalarField fp = map_field(phi, potential_fp);
    const ScalarField fp_eta = map_field(phi, [&](double s) { return potential_fp(s) + params.eta; });
    const ScalarField fpp_omega = multiply(map_field(phi, potential_fpp), base_n.omega);

    // Explicit phase-field part, transposed.
    const ScalarField lxi = laplacian(xi);
    ScalarField lower_t = shifted_neg_laplacian(multiply(fp_eta, lxi), fp);
    ScalarField phia = xi;
    {
        ScalarField dn = multiply(fpp_omega, lxi);
        dn -= multiply(fp, laplacian(lxi));
        dn += lower_t;
        phia.axpy(dt, dn);
    }
    phia.axpy(dt * params.stabilization, laplacian(lxi));
    phia.axpy(-dt, stencil::scalar_flux_divergence_transpose_scalar(base_np1.v, xi));

    // Velocity couplings through theta, psi and nu'(phi) psi.
    const FaceField& rho = proj.v;
    const ScalarField k_mu = stencil::korteweg_mu_transpose(phi, rho);
    ScalarField theta_t = shifted_neg_laplacian(shifted_neg_laplacian(k_mu, fp_eta), fp);
    theta_t += multiply(fpp_omega, k_mu);
    ScalarField couple = std::move(theta_t);
    couple += stencil::korteweg_phi_transpose(base_n.mu, rho);
    couple += multiply(map_field(phi, [&](double s) { return viscosity(params, s).nu_prime; }),
                       stencil::viscous_stress_coefficient_transpose(base_n.v, rho));
    phia.axpy(dt, couple);

    AdjointState out;
    out.va = proj.v;
    out.pa = std::move(proj.p);
    out.phia = std::move(phia);
    out.time = base_n.time;
    complete_adjoint(out, base_n, params);
    if (!all_finite(out.va) || !all_finite(out.phia))
        throw SolverError("blow-up in adjoint at step " + std::to_string(step), step);
    return out;
}

double trapezoid_weight(int n, int n_steps, double dt) { return (n == 0 || n == n_steps) ? 0.5 * dt : dt; }

AdjointTrajectory solve_adjoint(const Trajectory& base, const CostSpec& cost, const PhysParams& params) {
    require_adjoint_mobility(params);
    const int n_steps = base.n_steps();
    const GridSpec& g = base.grid();
    cost.validate(g, n_steps + 1);
    const double dt = base.time.dt;

    AdjointTrajectory out;
    out.states.resize(n_steps + 1);
    out.states[n_steps] = adjoint_terminal(base.states[n_steps], cost, params);
    for (int n = n_steps - 1; n >= 0; --n) {
        ScalarField source(g);
        if (cost.alpha1 != 0.0) {
            source = base.states[n + 1].phi - cost.phi_Q[n + 1];
            source *= cost.alpha1 * trapezoid_weight(n + 1, n_steps, dt);
        }
        out.states[n] = adjoint_step(base.states[n], base.states[n + 1], out.states[n + 1], source, dt, params, n);
    }
    return out;
}

}  // namespace nsch
