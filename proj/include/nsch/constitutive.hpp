#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "nsch/grid.hpp"

namespace nsch {

/// Raised when model parameters break one of the structural assumptions
/// A1-A6 (positivity of viscosity/mobility, admissible bounds, cost weights).
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Potential { quartic };

struct PhysParams {
    double eta = 0.0;
    double eps = 1.0;  // interface thickness; frozen at 1
    // nu(s) = nu_bar + nu_amp * tanh(s)
    double nu_bar = 1.0;
    double nu_amp = 0.2;
    // m(s) = mob_const (+ mob_amp * tanh(s)^2 when nonconstant_mobility)
    double mob_const = 1.0;
    double mob_amp = 0.0;
    bool nonconstant_mobility = false;
    double stabilization = 2.0;

    Potential potential = Potential::quartic;
    // Growth metadata of the split F = F1 + F2 (F1 = F, F2 = 0 for the quartic).
    double gamma1 = 1.0;
    double gamma2 = 1.0;
    double c_F = 0.0;

    double nu_min() const;
    double mob_min() const;
    bool constant_unit_mobility() const { return !nonconstant_mobility && mob_const == 1.0; }

    /// Throws ModelError naming the violated assumption.
    void validate() const;
};

// Quartic double well F(s) = (s^2-1)^2/4 and its derivatives.
inline double potential_F(double s) { return 0.25 * (s * s - 1.0) * (s * s - 1.0); }
inline double potential_f(double s) { return s * s * s - s; }
inline double potential_fp(double s) { return 3.0 * s * s - 1.0; }
inline double potential_fpp(double s) { return 6.0 * s; }

struct Viscosity {
    double nu;
    double nu_prime;
};
Viscosity viscosity(const PhysParams& params, double s);

struct Mobility {
    double m;
    double m_prime;
};
Mobility mobility(const PhysParams& params, double s);

/// Applies a scalar law pointwise.
template <class Fn>
ScalarField map_field(const ScalarField& f, Fn&& fn) {
    ScalarField r(f.grid());
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = fn(f[k]);
    return r;
}

/// omega = -Laplacian(phi) + f(phi)
ScalarField omega_of_phi(const ScalarField& phi);

struct ChemicalPotential {
    ScalarField mu;
    ScalarField omega;
};

/// mu = -Laplacian(omega) + (f'(phi) + eta) omega
ChemicalPotential mu_of_phi(const ScalarField& phi, const PhysParams& params);

struct FreeEnergy {
    double total;
    double willmore;  // 1/2 ||omega||^2
    double gl;        // eta * (1/2 ||grad phi||^2 + int F(phi))
};
FreeEnergy free_energy(const ScalarField& phi, const PhysParams& params);

struct ConstraintIntegrals {
    double volume;  // A(phi) = int phi
    double area;    // B(phi) = int (1/2 |grad phi|^2 + F(phi))
};
ConstraintIntegrals constraint_integrals(const ScalarField& phi);

/// Tracking cost weights and targets. phi_Q holds one field per time node.
struct CostSpec {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double alpha3 = 0.0;
    std::vector<ScalarField> phi_Q;
    ScalarField phi_Omega;

    /// Checks A6 and, when n_nodes >= 0, that phi_Q covers every node.
    void validate(const GridSpec& grid, int n_nodes = -1) const;
};

}  // namespace nsch
