#include "nsch/constitutive.hpp"

#include <cmath>

namespace nsch {

double PhysParams::nu_min() const { return nu_bar - std::abs(nu_amp); }

double PhysParams::mob_min() const {
    // tanh^2 ranges over [0,1).
    return nonconstant_mobility ? mob_const + std::min(mob_amp, 0.0) : mob_const;
}

void PhysParams::validate() const {
    if (eps != 1.0) throw ModelError("interface thickness eps is fixed at 1");
    if (!std::isfinite(eta)) throw ModelError("eta must be finite");
    if (!(nu_min() > 0.0))
        throw ModelError("A1 positivity violated: nu_bar - |nu_amp| = " + std::to_string(nu_min()) +
                         " must be > 0");
    if (!(mob_min() > 0.0))
        throw ModelError("A2 positivity violated: mobility lower bound " + std::to_string(mob_min()) +
                         " must be > 0");
    if (!(stabilization >= 0.0)) throw ModelError("stabilization constant must be nonnegative");
}

Viscosity viscosity(const PhysParams& params, double s) {
    const double ch = std::cosh(s);
    return {params.nu_bar + params.nu_amp * std::tanh(s), params.nu_amp / (ch * ch)};
}

Mobility mobility(const PhysParams& params, double s) {
    if (!params.nonconstant_mobility) return {params.mob_const, 0.0};
    const double t = std::tanh(s);
    return {params.mob_const + params.mob_amp * t * t, 2.0 * params.mob_amp * t * (1.0 - t * t)};
}

ScalarField omega_of_phi(const ScalarField& phi) {
    ScalarField omega = laplacian(phi);
    for (std::size_t k = 0; k < omega.size(); ++k) omega[k] = -omega[k] + potential_f(phi[k]);
    return omega;
}

ChemicalPotential mu_of_phi(const ScalarField& phi, const PhysParams& params) {
    ScalarField omega = omega_of_phi(phi);
    ScalarField mu = laplacian(omega);
    for (std::size_t k = 0; k < mu.size(); ++k)
        mu[k] = -mu[k] + (potential_fp(phi[k]) + params.eta) * omega[k];
    return {std::move(mu), std::move(omega)};
}

FreeEnergy free_energy(const ScalarField& phi, const PhysParams& params) {
    const ScalarField omega = omega_of_phi(phi);
    const double willmore = 0.5 * dot(omega, omega);
    const FaceField grad = gradient_to_faces(phi);
    const double gl = params.eta * (0.5 * dot(grad, grad) + integral(map_field(phi, potential_F)));
    return {willmore + gl, willmore, gl};
}

ConstraintIntegrals constraint_integrals(const ScalarField& phi) {
    const FaceField grad = gradient_to_faces(phi);
    double bulk = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k) bulk += potential_F(phi[k]);
    bulk *= phi.grid().cell_volume();
    return {integral(phi), 0.5 * dot(grad, grad) + bulk};
}

void CostSpec::validate(const GridSpec& grid, int n_nodes) const {
    if (alpha1 < 0.0 || alpha2 < 0.0 || alpha3 < 0.0)
        throw ModelError("A6 violated: cost weights alpha1..alpha3 must be nonnegative and not all zeros");
    if (!(alpha1 + alpha2 + alpha3 > 0.0))
        throw ModelError("A6 violated: cost weights alpha1..alpha3 must be nonnegative and not all zeros");
    if (n_nodes >= 0 && alpha1 > 0.0 && static_cast<int>(phi_Q.size()) != n_nodes)
        throw ModelError("cost target phi_Q has " + std::to_string(phi_Q.size()) + " nodes, expected " +
                         std::to_string(n_nodes));
    for (const auto& f : phi_Q) {
        require_same_grid(f.grid(), grid, "cost target phi_Q");
        if (!all_finite(f)) throw ModelError("cost target phi_Q must be finite");
    }
    if (alpha2 > 0.0) {
        require_same_grid(phi_Omega.grid(), grid, "cost target phi_Omega");
        if (!all_finite(phi_Omega)) throw ModelError("cost target phi_Omega must be finite");
    }
}

}  // namespace nsch
