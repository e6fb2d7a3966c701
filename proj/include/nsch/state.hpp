#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsch/constitutive.hpp"
#include "nsch/grid.hpp"

namespace nsch {

/// Numerical failure during a time march (non-finite values, |phi| > 1e6).
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, int step) : std::runtime_error(what), step_(step) {}
    int step() const { return step_; }

private:
    int step_;
};

struct TimeSpec {
    double T = 0.1;
    double dt = 1e-3;

    int n_steps() const;
    double time_at(int n) const { return n * dt; }
    /// Throws ModelError unless dt > 0 and T is an integer multiple of dt.
    void validate() const;
};

/// One control (body force) field per time node t_0..t_N; the step
/// t_n -> t_{n+1} uses entry n.
using ControlSeries = std::vector<FaceField>;

ControlSeries zero_controls(const GridSpec& grid, const TimeSpec& time);

struct State {
    FaceField v;
    ScalarField p;
    ScalarField phi;
    ScalarField mu;
    ScalarField omega;
    double time = 0.0;
};

/// Builds a state at rest pressure with (mu, omega) recomputed from phi.
State make_state(const FaceField& v, const ScalarField& phi, const PhysParams& params, double time);

struct Diagnostics {
    int step = 0;
    double time = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    double willmore = 0.0;
    double gl = 0.0;
    double kinetic = 0.0;
    double dissipation_v = 0.0;   // accumulated viscous work
    double dissipation_mu = 0.0;  // accumulated int m |grad mu|^2
    double divergence_max = 0.0;
};

struct Trajectory {
    TimeSpec time;
    std::vector<State> states;
    std::vector<Diagnostics> diagnostics;

    const GridSpec& grid() const { return states.front().phi.grid(); }
    int n_steps() const { return static_cast<int>(states.size()) - 1; }
};

/// Cahn-Hilliard update with implicit (I + dt m (-L)^3 + dt S L^2) and the
/// transport field v (the freshly projected velocity).
ScalarField ch_step(const ScalarField& phi_n, const FaceField& v, double dt, const PhysParams& params,
                    int step = -1);

struct NsStepResult {
    FaceField v;
    ScalarField p;
};

/// Projection-method velocity update with explicit transport, capillary
/// force, variable-viscosity remainder and forcing u.
NsStepResult ns_step(const FaceField& v_n, const ScalarField& phi_n, const ScalarField& mu_n,
                     const FaceField& u_n, double dt, const PhysParams& params, int step = -1);

/// Explicit velocity tendency without the forcing:
/// -div(v (x) v) + div(2(nu(phi)-nu_bar) Dv) + avg(mu) grad(phi).
FaceField velocity_tendency(const FaceField& v, const ScalarField& phi, const ScalarField& mu,
                            const PhysParams& params);

/// Applies P (I - dt nu_bar L_faces)^{-1} P; returns the combined pressure.
NsStepResult implicit_velocity_solve(const FaceField& s, double dt, const PhysParams& params);

Trajectory simulate(const FaceField& v0, const ScalarField& phi0, const ControlSeries& u, const TimeSpec& time,
                    const PhysParams& params);

/// Diagnostics CSV: step,time,mass,energy,willmore,gl,kinetic,dissipation_v,
/// dissipation_mu,divergence_max.
void write_diagnostics_csv(std::ostream& os, const std::vector<Diagnostics>& d);

/// Energy-balance residual at the final node of a run:
/// kinetic + E + accumulated dissipation - (kinetic_0 + E_0) - work of u.
double energy_balance_residual(const Trajectory& traj, const ControlSeries& u);

}  // namespace nsch
