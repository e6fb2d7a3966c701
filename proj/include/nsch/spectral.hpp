#pragma once

#include <array>
#include <vector>

#include "nsch/grid.hpp"

namespace nsch {

/// Cosine-mode amplitudes of a cell field. The field is reconstructed as
///   f(i,j) = sum_{p,q} amp[q*nx+p] cos(pi p (i+1/2)/nx) cos(pi q (j+1/2)/ny),
/// so a constant c has amp[0] = c. eig holds the matching eigenvalue of the
/// 5-point Neumann Laplacian for every mode.
struct SpectralCoeffs {
    GridSpec grid;
    std::vector<double> amp;
    std::vector<double> eig;

    double mode(int p, int q) const { return amp[static_cast<std::size_t>(q) * grid.nx + p]; }
};

/// lambda_{pq} = -[(2-2cos(pi p/nx))/hx^2 + (2-2cos(pi q/ny))/hy^2]
double laplacian_eigenvalue(const GridSpec& grid, int p, int q);

SpectralCoeffs cosine_transform(const ScalarField& f);
ScalarField inverse_cosine_transform(const SpectralCoeffs& c);

/// Solves (a0 I + a1 (-L) + a2 L^2 + a3 (-L)^3) x = rhs for the Neumann
/// Laplacian L. A vanishing constant-mode symbol selects the zero-mean
/// solution and needs mean(rhs) = 0.
ScalarField helmholtz_poly_solve(const std::array<double, 4>& a, const ScalarField& rhs);

/// Zero-mean solution of -L p = rhs.
ScalarField poisson_neumann(const ScalarField& rhs);

/// Solves (I - c * face_laplacian) x = rhs for c >= 0 with no-slip walls.
FaceField face_helmholtz_solve(double c, const FaceField& rhs);

}  // namespace nsch
