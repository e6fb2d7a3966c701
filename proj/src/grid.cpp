#include "nsch/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nsch/spectral.hpp"

namespace nsch {

void GridSpec::validate() const {
    if (nx < 4 || ny < 4)
        throw GridError("grid needs nx >= 4 and ny >= 4, got " + std::to_string(nx) + "x" +
                        std::to_string(ny));
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
        throw GridError("grid edge lengths must be positive and finite");
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
    if (!(a == b)) throw GridError(std::string("grid mismatch in ") + what);
}

// ---- ScalarField -----------------------------------------------------------

ScalarField::ScalarField(const GridSpec& grid, double fill) : grid_(grid), values_(grid.cells(), fill) {}

ScalarField& ScalarField::operator+=(const ScalarField& o) { return axpy(1.0, o); }
ScalarField& ScalarField::operator-=(const ScalarField& o) { return axpy(-1.0, o); }

ScalarField& ScalarField::operator*=(double s) {
    for (auto& v : values_) v *= s;
    return *this;
}

ScalarField& ScalarField::axpy(double s, const ScalarField& o) {
    require_same_grid(grid_, o.grid_, "ScalarField arithmetic");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * o.values_[k];
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }
ScalarField operator-(ScalarField a) { return a *= -1.0; }

// ---- FaceField -------------------------------------------------------------

FaceField::FaceField(const GridSpec& grid, double fill)
    : grid_(grid), x_(grid.x_faces(), fill), y_(grid.y_faces(), fill) {}

void FaceField::clear_boundary() {
    for (int j = 0; j < grid_.ny; ++j) {
        x(0, j) = 0.0;
        x(grid_.nx, j) = 0.0;
    }
    for (int i = 0; i < grid_.nx; ++i) {
        y(i, 0) = 0.0;
        y(i, grid_.ny) = 0.0;
    }
}

double FaceField::max_boundary_normal() const {
    double m = 0.0;
    for (int j = 0; j < grid_.ny; ++j) m = std::max({m, std::abs(x(0, j)), std::abs(x(grid_.nx, j))});
    for (int i = 0; i < grid_.nx; ++i) m = std::max({m, std::abs(y(i, 0)), std::abs(y(i, grid_.ny))});
    return m;
}

FaceField& FaceField::operator+=(const FaceField& o) { return axpy(1.0, o); }
FaceField& FaceField::operator-=(const FaceField& o) { return axpy(-1.0, o); }

FaceField& FaceField::operator*=(double s) {
    for (auto& v : x_) v *= s;
    for (auto& v : y_) v *= s;
    return *this;
}

FaceField& FaceField::axpy(double s, const FaceField& o) {
    require_same_grid(grid_, o.grid_, "FaceField arithmetic");
    for (std::size_t k = 0; k < x_.size(); ++k) x_[k] += s * o.x_[k];
    for (std::size_t k = 0; k < y_.size(); ++k) y_[k] += s * o.y_[k];
    return *this;
}

FaceField operator+(FaceField a, const FaceField& b) { return a += b; }
FaceField operator-(FaceField a, const FaceField& b) { return a -= b; }
FaceField operator*(double s, FaceField a) { return a *= s; }
FaceField operator-(FaceField a) { return a *= -1.0; }

// ---- quadrature ------------------------------------------------------------

namespace {
double plain_dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}
double span_max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}
bool span_finite(std::span<const double> a) {
    return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}
}  // namespace

double integral(const ScalarField& f) {
    const auto v = f.values();
    return std::accumulate(v.begin(), v.end(), 0.0) * f.grid().cell_volume();
}

double mean(const ScalarField& f) { return integral(f) / f.grid().area(); }

double dot(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "dot");
    return plain_dot(a.values(), b.values()) * a.grid().cell_volume();
}

double dot(const FaceField& a, const FaceField& b) {
    require_same_grid(a.grid(), b.grid(), "dot");
    return (plain_dot(a.xs(), b.xs()) + plain_dot(a.ys(), b.ys())) * a.grid().cell_volume();
}

double norm(const ScalarField& f) { return std::sqrt(dot(f, f)); }
double norm(const FaceField& f) { return std::sqrt(dot(f, f)); }
double max_abs(const ScalarField& f) { return span_max_abs(f.values()); }
double max_abs(const FaceField& f) { return std::max(span_max_abs(f.xs()), span_max_abs(f.ys())); }
bool all_finite(const ScalarField& f) { return span_finite(f.values()); }
bool all_finite(const FaceField& f) { return span_finite(f.xs()) && span_finite(f.ys()); }

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "multiply");
    ScalarField r(a.grid());
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = a[k] * b[k];
    return r;
}

FaceField multiply(const FaceField& a, const FaceField& b) {
    require_same_grid(a.grid(), b.grid(), "multiply");
    FaceField r(a.grid());
    for (std::size_t k = 0; k < r.xs().size(); ++k) r.xs()[k] = a.xs()[k] * b.xs()[k];
    for (std::size_t k = 0; k < r.ys().size(); ++k) r.ys()[k] = a.ys()[k] * b.ys()[k];
    return r;
}

// ---- stencils --------------------------------------------------------------

ScalarField laplacian(const ScalarField& f) {
    const GridSpec& g = f.grid();
    const double ax = 1.0 / (g.hx() * g.hx());
    const double ay = 1.0 / (g.hy() * g.hy());
    ScalarField r(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double c = f(i, j);
            const double w = i > 0 ? f(i - 1, j) : c;
            const double e = i < g.nx - 1 ? f(i + 1, j) : c;
            const double s = j > 0 ? f(i, j - 1) : c;
            const double n = j < g.ny - 1 ? f(i, j + 1) : c;
            r(i, j) = ax * ((e - c) - (c - w)) + ay * ((n - c) - (c - s));
        }
    }
    return r;
}

FaceField gradient_to_faces(const ScalarField& f) {
    const GridSpec& g = f.grid();
    FaceField r(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) r.x(i, j) = (f(i, j) - f(i - 1, j)) / g.hx();
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) r.y(i, j) = (f(i, j) - f(i, j - 1)) / g.hy();
    return r;
}

ScalarField divergence_of_faces(const FaceField& w) {
    const GridSpec& g = w.grid();
    ScalarField r(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            r(i, j) = (w.x(i + 1, j) - w.x(i, j)) / g.hx() + (w.y(i, j + 1) - w.y(i, j)) / g.hy();
    return r;
}

FaceField average_to_faces(const ScalarField& f) {
    const GridSpec& g = f.grid();
    FaceField r(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) r.x(i, j) = 0.5 * (f(i, j) + f(i - 1, j));
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) r.y(i, j) = 0.5 * (f(i, j) + f(i, j - 1));
    return r;
}

ScalarField average_to_faces_transpose(const FaceField& w) {
    const GridSpec& g = w.grid();
    ScalarField r(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 1; i < g.nx; ++i) {
            r(i, j) += 0.5 * w.x(i, j);
            r(i - 1, j) += 0.5 * w.x(i, j);
        }
    }
    for (int j = 1; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            r(i, j) += 0.5 * w.y(i, j);
            r(i, j - 1) += 0.5 * w.y(i, j);
        }
    }
    return r;
}

ScalarField advect_scalar(const FaceField& v, const ScalarField& f) {
    require_same_grid(v.grid(), f.grid(), "advect_scalar");
    const GridSpec& g = v.grid();
    const double scale = std::max(1.0, max_abs(v) / std::min(g.hx(), g.hy()));
    if (max_abs(divergence_of_faces(v)) > 1e-8 * scale)
        throw GridError("advect_scalar: transport field is not discretely divergence-free");
    FaceField flux = average_to_faces(f);
    for (std::size_t k = 0; k < flux.xs().size(); ++k) flux.xs()[k] *= v.xs()[k];
    for (std::size_t k = 0; k < flux.ys().size(); ++k) flux.ys()[k] *= v.ys()[k];
    return divergence_of_faces(flux);
}

Projection project_divergence_free(const FaceField& v, double dt) {
    if (!(dt > 0.0)) throw GridError("project_divergence_free: dt must be positive");
    if (v.max_boundary_normal() != 0.0)
        throw GridError("project_divergence_free: boundary normal velocity must be zero");
    ScalarField rhs = divergence_of_faces(v);
    rhs *= -1.0 / dt;
    // Zero net flux through no-slip walls; drop the roundoff mean.
    const double m = mean(rhs);
    for (auto& x : rhs.values()) x -= m;
    ScalarField p = poisson_neumann(rhs);
    FaceField out = v;
    out.axpy(-dt, gradient_to_faces(p));
    return {std::move(out), std::move(p)};
}

FaceField leray(const FaceField& v) {
    FaceField masked = v;
    masked.clear_boundary();
    return project_divergence_free(masked, 1.0).velocity;
}

FaceField face_laplacian(const FaceField& w) {
    const GridSpec& g = w.grid();
    const double ax = 1.0 / (g.hx() * g.hx());
    const double ay = 1.0 / (g.hy() * g.hy());
    FaceField r(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 1; i < g.nx; ++i) {
            const double c = w.x(i, j);
            const double s = j > 0 ? w.x(i, j - 1) : -c;
            const double n = j < g.ny - 1 ? w.x(i, j + 1) : -c;
            r.x(i, j) = ax * (w.x(i + 1, j) - 2.0 * c + w.x(i - 1, j)) + ay * (n - 2.0 * c + s);
        }
    }
    for (int j = 1; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double c = w.y(i, j);
            const double west = i > 0 ? w.y(i - 1, j) : -c;
            const double east = i < g.nx - 1 ? w.y(i + 1, j) : -c;
            r.y(i, j) = ax * (east - 2.0 * c + west) + ay * (w.y(i, j + 1) - 2.0 * c + w.y(i, j - 1));
        }
    }
    return r;
}

}  // namespace nsch
