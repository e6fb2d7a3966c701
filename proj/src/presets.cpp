#include "nsch/presets.hpp"

#include <cmath>
#include <numbers>

#include "nsch/state.hpp"
#include "nsch/stencils.hpp"

namespace nsch {

namespace {

constexpr int kRelaxSteps = 100;

ScalarField relax(ScalarField phi, const PhysParams& params, double relax_time) {
    if (relax_time <= 0.0) return phi;
    const FaceField still(phi.grid());
    for (int k = 0; k < kRelaxSteps; ++k) phi = ch_step(phi, still, relax_time / kRelaxSteps, params);
    return phi;
}

}  // namespace

ScalarField equilibrium_phase(const GridSpec& grid, double c) { return ScalarField(grid, c); }

ScalarField bubble_phase(const GridSpec& grid, double radius, const PhysParams& params, double relax_time) {
    const double cx = 0.5 * grid.lx;
    const double cy = 0.5 * grid.ly;
    ScalarField phi = sample_cells(
        grid, [&](double x, double y) { return std::tanh((radius - std::hypot(x - cx, y - cy)) / std::sqrt(2.0)); });
    return relax(std::move(phi), params, relax_time);
}

ScalarField stripe_phase(const GridSpec& grid, double width, const PhysParams& params, double relax_time) {
    const double cx = 0.5 * grid.lx;
    ScalarField phi = sample_cells(
        grid, [&](double x, double) { return std::tanh((0.5 * width - std::abs(x - cx)) / std::sqrt(2.0)); });
    return relax(std::move(phi), params, relax_time);
}

FaceField vortex_velocity(const GridSpec& grid, double amplitude) {
    using std::numbers::pi;
    stencil::NodeField psi(grid);
    for (int j = 1; j < grid.ny; ++j)
        for (int i = 1; i < grid.nx; ++i) {
            const double sx = std::sin(pi * i / grid.nx);
            const double sy = std::sin(pi * j / grid.ny);
            psi(i, j) = amplitude * sx * sx * sy * sy;
        }
    FaceField v(grid);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i <= grid.nx; ++i) v.x(i, j) = (psi(i, j + 1) - psi(i, j)) / grid.hy();
    for (int j = 0; j <= grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) v.y(i, j) = -(psi(i + 1, j) - psi(i, j)) / grid.hx();
    return v;
}

}  // namespace nsch
