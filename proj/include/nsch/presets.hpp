#pragma once

#include "nsch/constitutive.hpp"
#include "nsch/grid.hpp"

namespace nsch {

/// phi = c everywhere.
ScalarField equilibrium_phase(const GridSpec& grid, double c = 1.0);

/// Centered disc phi = tanh((R - r)/sqrt(2)) followed by relax_time of
/// velocity-free phase-field flow (100 substeps). The raw tanh profile does
/// not satisfy the higher-order wall conditions of the sixth-order operator;
/// the short relaxation removes the resulting stiff boundary layer.
ScalarField bubble_phase(const GridSpec& grid, double radius, const PhysParams& params, double relax_time = 0.05);

/// Vertical band of the given width centered in the box, relaxed like the bubble.
ScalarField stripe_phase(const GridSpec& grid, double width, const PhysParams& params, double relax_time = 0.05);

/// Divergence-free rotating flow with no-slip walls, built from the corner
/// streamfunction A sin^2(pi x/lx) sin^2(pi y/ly).
FaceField vortex_velocity(const GridSpec& grid, double amplitude);

}  // namespace nsch
