#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "nsch/adjoint.hpp"

namespace nsch {

/// Controls are piecewise constant in time: entry n acts on [t_n, t_{n+1}).
/// The last entry (node N) is carried for shape only and does not influence
/// the state.
using ControlField = ControlSeries;

/// Componentwise box [lo, hi] for the control. Constant bounds are used
/// unless lo_field/hi_field are given (one FaceField per node, same shape as
/// the controls).
struct ControlBounds {
    std::array<double, 2> lo{-1.0, -1.0};
    std::array<double, 2> hi{1.0, 1.0};
    ControlField lo_field;
    ControlField hi_field;

    /// max over components and nodes of |bound|, plus 1.
    double radius() const;
    /// Throws ModelError citing A4 unless lo <= hi everywhere.
    void validate() const;
    bool contains(const ControlField& u) const;
};

/// L2(Q) inner product of controls: left-rectangle rule in time (exact for
/// piecewise constant controls) and face quadrature in space with half weight
/// on the wall-normal faces.
double control_dot(const ControlField& a, const ControlField& b, double dt);
double control_norm(const ControlField& a, double dt);

struct CostValue {
    double J = 0.0;
    double track = 0.0;
    double terminal = 0.0;
    double control = 0.0;
};

/// J = alpha1/2 int_Q |phi - phi_Q|^2 + alpha2/2 int |phi(T) - phi_Omega|^2
///     + alpha3/2 ||u||^2_Q, tracking term by the trapezoid rule on nodes.
CostValue evaluate_cost(const Trajectory& traj, const ControlField& u, const CostSpec& cost);

/// g = alpha3 u + va, node by node (va at node N is zero).
ControlField reduced_gradient(const ControlField& u, const AdjointTrajectory& adj, const CostSpec& cost);

/// Componentwise clamp to the box.
ControlField project_admissible(const ControlField& u, const ControlBounds& bounds);

/// ||u - P(u - step g)||_Q.
double stationarity_residual(const ControlField& u, const ControlField& g, const ControlBounds& bounds, double step,
                             double dt);

/// Everything a forward/backward solve needs.
struct Problem {
    GridSpec grid;
    TimeSpec time;
    PhysParams params;
    ScalarField phi0;
    FaceField v0;
    CostSpec cost;
    ControlBounds bounds;
};

struct OptimOptions {
    int max_iter = 50;
    double tol_rel = 1e-3;  // stop when the stationarity residual <= tol_rel * ||g_0||
    double tol_abs = 0.0;
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    int max_halvings = 30;
    double initial_step = 0.0;  // <= 0: 1/alpha3, or 1 when alpha3 = 0
    /// Called with u0 and with every accepted iterate.
    std::function<void(int iter, const ControlField& u)> on_iterate;
};

struct OptimRow {
    int iter = 0;
    CostValue cost;
    double grad_norm = 0.0;
    double stationarity = 0.0;
    double step = 0.0;
    bool accepted = true;
};

struct OptimReport {
    std::vector<OptimRow> rows;
    bool converged = false;
    bool line_search_failed = false;
    std::string diagnosis;
    double initial_grad_norm = 0.0;
    /// Fixed-point residual ||u - P(u - (alpha3 u + va))|| at the returned control.
    double final_stationarity = 0.0;
    double final_gradient_norm = 0.0;
};

struct OptimResult {
    ControlField u;
    OptimReport report;
};

/// Projected gradient with Armijo backtracking. Throws ModelError when the
/// mobility is not the constant 1 or u0 is not admissible.
OptimResult optimize(const ControlField& u0, const Problem& problem, const OptimOptions& options = {});

/// iter,J,J_track,J_terminal,J_control,grad_norm,stationarity,step,accepted
void write_optim_csv(std::ostream& os, const OptimReport& report);

// ---- verification identities ----------------------------------------------

struct VerifyResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

/// Smooth perturbation from seeded low sine modes in space times a
/// smooth time profile; the same seed gives the same continuous field on any
/// grid. |h| <= amplitude, wall-normal faces zero.
ControlField random_smooth_control(const GridSpec& grid, const TimeSpec& time, std::uint64_t seed,
                                   double amplitude = 1.0);

/// max_n |mean(phi_n) - mean(phi_0)| <= 1e-12.
VerifyResult verify_mass(const Problem& problem, const ControlField& u);
/// Uncontrolled run at dt_e = min(dt, 5e-4) and dt_e/2: kinetic + free energy
/// non-increasing in both, energy-balance residual ratio in [1.7, 2.3].
VerifyResult verify_energy(const Problem& problem);
/// e(eps) = ||S(u + eps h) - S(u) - eps psi||_Q / eps over eps = 0.1, 0.05,
/// 0.025 halves (ratio >= 1.8) unless already within 5x of the floor, the
/// smallest e over eps = 1e-3 .. 1e-6.
VerifyResult verify_frechet(const Problem& problem, const ControlField& u, std::uint64_t seed,
                            double amplitude = 1.0);
/// Relative mismatch of <h, va>_Q against the tracking pairing of psi from
/// solve_linearized; passes at <= 1e-2.
VerifyResult verify_duality(const Problem& problem, const ControlField& u, std::uint64_t seed,
                            double amplitude = 1.0);
/// verify_duality on both levels; passes when the coarse mismatch is within
/// 1e-2 and the refined one is strictly smaller.
VerifyResult verify_duality_refinement(const Problem& coarse, const ControlField& u_coarse, const Problem& fine,
                                       const ControlField& u_fine, std::uint64_t seed, double amplitude = 1.0);
/// The direction checks draw h = random_smooth_control(..., amplitude) and
/// throw ModelError when u + 0.1 h leaves the admissible box.
/// Central differences of the reduced cost along 3 seeded directions against
/// <g, h>_Q: cosine >= 0.999 and relative magnitude error <= 2e-2.
VerifyResult verify_gradient(const Problem& problem, const ControlField& u, std::uint64_t seed,
                             double amplitude = 1.0);

}  // namespace nsch
