#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsch {

/// Raised when a precondition on grid shapes or field contents is violated.
class GridError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Uniform rectangular grid [0,lx] x [0,ly] split into nx x ny cells.
struct GridSpec {
    int nx = 0;
    int ny = 0;
    double lx = 1.0;
    double ly = 1.0;

    double hx() const { return lx / nx; }
    double hy() const { return ly / ny; }
    double cell_volume() const { return hx() * hy(); }
    double area() const { return lx * ly; }

    std::size_t cells() const { return static_cast<std::size_t>(nx) * ny; }
    std::size_t x_faces() const { return static_cast<std::size_t>(nx + 1) * ny; }
    std::size_t y_faces() const { return static_cast<std::size_t>(nx) * (ny + 1); }
    std::size_t nodes() const { return static_cast<std::size_t>(nx + 1) * (ny + 1); }

    /// Throws GridError unless nx, ny >= 4 and both lengths are positive.
    void validate() const;

    bool operator==(const GridSpec&) const = default;
};

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what);

/// Cell-centered scalar, stored row-major: index j*nx + i.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const GridSpec& grid, double fill = 0.0);

    const GridSpec& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    double& operator()(int i, int j) { return values_[static_cast<std::size_t>(j) * grid_.nx + i]; }
    double operator()(int i, int j) const { return values_[static_cast<std::size_t>(j) * grid_.nx + i]; }
    double& operator[](std::size_t k) { return values_[k]; }
    double operator[](std::size_t k) const { return values_[k]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double s);
    /// this += s * o
    ScalarField& axpy(double s, const ScalarField& o);

private:
    GridSpec grid_{};
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
ScalarField operator-(ScalarField a);

/// Staggered (MAC) vector field. x-components live on the (nx+1) x ny
/// vertical faces (index j*(nx+1) + i, face i sits at x = i*hx), y-components
/// on the nx x (ny+1) horizontal faces (index j*nx + i, face j at y = j*hy).
class FaceField {
public:
    FaceField() = default;
    explicit FaceField(const GridSpec& grid, double fill = 0.0);

    const GridSpec& grid() const { return grid_; }

    double& x(int i, int j) { return x_[static_cast<std::size_t>(j) * (grid_.nx + 1) + i]; }
    double x(int i, int j) const { return x_[static_cast<std::size_t>(j) * (grid_.nx + 1) + i]; }
    double& y(int i, int j) { return y_[static_cast<std::size_t>(j) * grid_.nx + i]; }
    double y(int i, int j) const { return y_[static_cast<std::size_t>(j) * grid_.nx + i]; }

    std::span<double> xs() { return x_; }
    std::span<const double> xs() const { return x_; }
    std::span<double> ys() { return y_; }
    std::span<const double> ys() const { return y_; }

    /// Zero the normal component on the domain boundary.
    void clear_boundary();
    double max_boundary_normal() const;

    FaceField& operator+=(const FaceField& o);
    FaceField& operator-=(const FaceField& o);
    FaceField& operator*=(double s);
    FaceField& axpy(double s, const FaceField& o);

private:
    GridSpec grid_{};
    std::vector<double> x_;
    std::vector<double> y_;
};

FaceField operator+(FaceField a, const FaceField& b);
FaceField operator-(FaceField a, const FaceField& b);
FaceField operator*(double s, FaceField a);
FaceField operator-(FaceField a);

// Quadrature. Cells and faces both carry the weight hx*hy.
double integral(const ScalarField& f);
double mean(const ScalarField& f);
double dot(const ScalarField& a, const ScalarField& b);
double dot(const FaceField& a, const FaceField& b);
double norm(const ScalarField& f);
double norm(const FaceField& f);
double max_abs(const ScalarField& f);
double max_abs(const FaceField& f);
bool all_finite(const ScalarField& f);
bool all_finite(const FaceField& f);

/// Samples g(x, y) at cell centers.
template <class Fn>
ScalarField sample_cells(const GridSpec& grid, Fn&& g) {
    ScalarField f(grid);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            f(i, j) = g((i + 0.5) * grid.hx(), (j + 0.5) * grid.hy());
    return f;
}

/// Pointwise a*b.
ScalarField multiply(const ScalarField& a, const ScalarField& b);
FaceField multiply(const FaceField& a, const FaceField& b);

// ---- discrete calculus -----------------------------------------------------

/// 5-point Laplacian with mirror ghost cells (homogeneous Neumann).
ScalarField laplacian(const ScalarField& f);

/// Face differences of f; boundary normal faces are zero.
FaceField gradient_to_faces(const ScalarField& f);

/// Net face flux per cell divided by the cell volume.
ScalarField divergence_of_faces(const FaceField& w);

/// Two-cell arithmetic average onto interior faces; boundary faces zero.
FaceField average_to_faces(const ScalarField& f);

/// Transpose of average_to_faces with respect to the cell/face inner products.
ScalarField average_to_faces_transpose(const FaceField& w);

/// Face-flux divergence div(v f) with f averaged to faces.
ScalarField advect_scalar(const FaceField& v, const ScalarField& f);

/// Result of a pressure projection.
struct Projection {
    FaceField velocity;
    ScalarField pressure;
};

/// Removes the gradient part of v: returns v - dt*grad(p) with zero-mean p
/// solving -Laplacian(p) = -div(v)/dt.
Projection project_divergence_free(const FaceField& v, double dt);

/// Discrete Leray projector P (project_divergence_free without the pressure).
FaceField leray(const FaceField& v);

/// Vector Laplacian on faces with no-slip walls (odd ghost reflection for the
/// tangential direction); boundary normal faces stay zero.
FaceField face_laplacian(const FaceField& w);

}  // namespace nsch
