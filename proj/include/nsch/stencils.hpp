#pragma once

// MAC coupling stencils shared by the forward, linearized and backward
// solvers. Every operator that the backward solver needs has an explicit
// transpose with respect to the hx*hy-weighted cell/face inner products.
// Face-valued results always have zero boundary normal components.

#include <vector>

#include "nsch/grid.hpp"

namespace nsch::stencil {

/// Values on the (nx+1) x (ny+1) cell corners, index j*(nx+1) + i.
struct NodeField {
    GridSpec grid;
    std::vector<double> v;

    explicit NodeField(const GridSpec& g) : grid(g), v(g.nodes(), 0.0) {}
    double& operator()(int i, int j) { return v[static_cast<std::size_t>(j) * (grid.nx + 1) + i]; }
    double operator()(int i, int j) const { return v[static_cast<std::size_t>(j) * (grid.nx + 1) + i]; }
};

/// Symmetric velocity gradient: xx and yy at cells, xy at corners.
/// Tangential wall values use odd ghost reflection (no-slip).
struct Strain {
    ScalarField xx;
    ScalarField yy;
    NodeField xy;
};

Strain strain(const FaceField& v);
FaceField strain_transpose(const Strain& s);

/// Trapezoid weight of a corner: 1 inside, 1/2 on edges, 1/4 at domain corners.
double node_weight(const GridSpec& g, int i, int j);

/// Average of the adjacent cells onto each corner (edges use 2, corners 1).
NodeField cells_to_nodes(const ScalarField& c);
ScalarField cells_to_nodes_transpose(const NodeField& n);

/// div(2 c Dv) realized as -Strain^T diag(2c, 2c, 4 w c_node) Strain v.
FaceField viscous_stress_divergence(const ScalarField& c, const FaceField& v);

/// Transpose of the map c -> viscous_stress_divergence(c, v) applied to r.
ScalarField viscous_stress_coefficient_transpose(const FaceField& v, const FaceField& r);

/// Discrete viscous work 2 int c |Dv|^2 (equals -<viscous_stress_divergence(c,v), v>).
double viscous_work(const ScalarField& c, const FaceField& v);

/// Conservative momentum transport div(a (x) b) with transport field a.
FaceField momentum_advection(const FaceField& a, const FaceField& b);

/// Transpose of a -> momentum_advection(a, b) applied to r.
FaceField momentum_advection_transport_transpose(const FaceField& b, const FaceField& r);

/// Transpose of b -> momentum_advection(a, b) applied to r.
FaceField momentum_advection_transported_transpose(const FaceField& a, const FaceField& r);

/// Capillary force: two-cell average of mu times the face difference of phi.
FaceField korteweg(const ScalarField& mu, const ScalarField& phi);

/// Transpose of mu -> korteweg(mu, phi) applied to r.
ScalarField korteweg_mu_transpose(const ScalarField& phi, const FaceField& r);

/// Transpose of phi -> korteweg(mu, phi) applied to r.
ScalarField korteweg_phi_transpose(const ScalarField& mu, const FaceField& r);

/// div(v * avg(f)) without the divergence-free check of advect_scalar.
ScalarField scalar_flux_divergence(const FaceField& v, const ScalarField& f);

/// Transpose of f -> scalar_flux_divergence(v, f) applied to r.
ScalarField scalar_flux_divergence_transpose_scalar(const FaceField& v, const ScalarField& r);

/// Transpose of v -> scalar_flux_divergence(v, f) applied to r.
FaceField scalar_flux_divergence_transpose_velocity(const ScalarField& f, const ScalarField& r);

/// Cell average of the face product a.b: (1/2) sum over the four faces.
ScalarField face_dot_to_cells(const FaceField& a, const FaceField& b);

}  // namespace nsch::stencil
