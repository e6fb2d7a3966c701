#pragma once

#include <vector>

#include "nsch/linearized.hpp"

namespace nsch {

/// Backward (adjoint) fields at one time node. va is the velocity multiplier
/// that drives the reduced gradient; mua and omegaa are derived from
/// (phia, va) and the base phase field.
struct AdjointState {
    FaceField va;
    ScalarField pa;
    ScalarField phia;
    ScalarField mua;
    ScalarField omegaa;
    double time = 0.0;
};

/// Throws ModelError unless the mobility is the constant 1.
void require_adjoint_mobility(const PhysParams& params);

/// mua = -L phia - grad(phi).va and omegaa = -L mua + (f'(phi) + eta) mua.
void complete_adjoint(AdjointState& a, const State& base, const PhysParams& params);

/// va = 0, phia = alpha2 (phi_T - phi_Omega).
AdjointState adjoint_terminal(const State& base_T, const CostSpec& cost, const PhysParams& params);

/// One backward step t_{n+1} -> t_n: the transpose of linearized_step about
/// (base_n, base_np1). source_np1 is the tracking load at t_{n+1}
/// (alpha1 times the trapezoid weight times phi - phi_Q), added to phia.
AdjointState adjoint_step(const State& base_n, const State& base_np1, const AdjointState& adj_np1,
                          const ScalarField& source_np1, double dt, const PhysParams& params, int step = -1);

struct AdjointTrajectory {
    std::vector<AdjointState> states;  // index = time node
};

/// Trapezoid weight of node n on [0, T] with N steps.
double trapezoid_weight(int n, int n_steps, double dt);

AdjointTrajectory solve_adjoint(const Trajectory& base, const CostSpec& cost, const PhysParams& params);

}  // namespace nsch
