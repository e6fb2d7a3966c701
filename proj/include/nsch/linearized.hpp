#pragma once

#include <vector>

#include "nsch/state.hpp"

namespace nsch {

/// Sensitivity (w, q, psi, theta, w_aux) of the state with respect to a
/// control perturbation h.
struct LinearizedState {
    FaceField w;
    ScalarField q;
    ScalarField psi;
    ScalarField theta;  // derivative of mu along psi
    ScalarField w_aux;  // -L psi + f'(phi) psi, derivative of omega along psi
    double time = 0.0;
};

/// Zero sensitivity; theta and w_aux vanish with psi.
LinearizedState zero_linearized(const GridSpec& grid, double time = 0.0);

/// w_aux = -L psi + f'(phi) psi.
ScalarField linearized_omega(const ScalarField& psi, const State& base);

/// theta = (-L + f'(phi) + eta) w_aux + f''(phi) omega psi.
ScalarField linearized_mu(const ScalarField& psi, const ScalarField& w_aux, const State& base,
                          const PhysParams& params);

/// Time level of the transport velocity v in the v.grad(psi) term.
/// begin_of_step freezes every coefficient at base_n; end_of_step uses the
/// freshly projected base velocity exactly as ch_step does, which makes the
/// step the exact derivative of the forward step.
enum class TransportLevel { begin_of_step, end_of_step };

/// Derivative of one forward step (ns_step then ch_step) about the base pair
/// (base_n, base_np1) in the direction (lin_n, h_n), with the same implicit
/// symbols as the forward scheme.
LinearizedState linearized_step(const State& base_n, const State& base_np1, const LinearizedState& lin_n,
                                 const FaceField& h_n, double dt, const PhysParams& params, int step = -1,
                                 TransportLevel level = TransportLevel::begin_of_step);

struct LinearizedTrajectory {
    std::vector<LinearizedState> states;
};

/// Marches the sensitivity from zero initial data; h needs one entry per node.
LinearizedTrajectory solve_linearized(const Trajectory& base, const ControlSeries& h, const PhysParams& params,
                                      TransportLevel level = TransportLevel::begin_of_step);

}  // namespace nsch
