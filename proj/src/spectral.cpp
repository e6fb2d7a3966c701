#include "nsch/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

namespace nsch {

namespace {

// FFTW's planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

/// Out-of-place 2D real-to-real transform on a rows x cols row-major array.
class R2RPlan {
public:
    R2RPlan(int rows, int cols, fftw_r2r_kind row_kind, fftw_r2r_kind col_kind)
        : n_(static_cast<std::size_t>(rows) * cols) {
        std::lock_guard lock(planner_mutex());
        in_ = fftw_alloc_real(n_);
        out_ = fftw_alloc_real(n_);
        plan_ = fftw_plan_r2r_2d(rows, cols, in_, out_, row_kind, col_kind, FFTW_ESTIMATE);
    }
    ~R2RPlan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
    }
    R2RPlan(const R2RPlan&) = delete;
    R2RPlan& operator=(const R2RPlan&) = delete;

    double* in() { return in_; }
    const double* out() const { return out_; }
    void run() { fftw_execute(plan_); }

private:
    std::size_t n_;
    double* in_ = nullptr;
    double* out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

R2RPlan& plan_for(int rows, int cols, fftw_r2r_kind row_kind, fftw_r2r_kind col_kind) {
    using Key = std::tuple<int, int, int, int>;
    thread_local std::map<Key, std::unique_ptr<R2RPlan>> cache;
    auto& slot = cache[Key{rows, cols, static_cast<int>(row_kind), static_cast<int>(col_kind)}];
    if (!slot) slot = std::make_unique<R2RPlan>(rows, cols, row_kind, col_kind);
    return *slot;
}

/// 1D eigenvalue of the second difference on n points with spacing h.
double second_difference_eig(int p, int n, double h) {
    return -(2.0 - 2.0 * std::cos(std::numbers::pi * p / n)) / (h * h);
}

// Unnormalized DCT-II of a cell field, rows = y.
std::vector<double> dct2(const ScalarField& f) {
    const GridSpec& g = f.grid();
    R2RPlan& plan = plan_for(g.ny, g.nx, FFTW_REDFT10, FFTW_REDFT10);
    std::copy(f.values().begin(), f.values().end(), plan.in());
    plan.run();
    return {plan.out(), plan.out() + g.cells()};
}

ScalarField dct3(const GridSpec& g, const std::vector<double>& coeffs) {
    R2RPlan& plan = plan_for(g.ny, g.nx, FFTW_REDFT01, FFTW_REDFT01);
    std::copy(coeffs.begin(), coeffs.end(), plan.in());
    plan.run();
    ScalarField f(g);
    std::copy(plan.out(), plan.out() + g.cells(), f.values().begin());
    return f;
}

// Applies x -> symbol^{-1} x in the cosine basis. symbol(p,q) may return 0
// only for the constant mode, in which case that mode is zeroed.
template <class Symbol>
ScalarField neumann_diagonal_solve(const ScalarField& rhs, Symbol&& symbol) {
    const GridSpec& g = rhs.grid();
    std::vector<double> c = dct2(rhs);
    const double norm = 1.0 / (4.0 * g.nx * g.ny);
    for (int q = 0; q < g.ny; ++q) {
        for (int p = 0; p < g.nx; ++p) {
            const double s = symbol(p, q);
            auto& v = c[static_cast<std::size_t>(q) * g.nx + p];
            v = s == 0.0 ? 0.0 : v * norm / s;
        }
    }
    return dct3(g, c);
}

// One velocity component stored as a rows x cols block of unknowns with
// Dirichlet node conditions along cols (DST-I) and odd ghost reflection along
// rows (DST-II), or the reverse.
void solve_component(std::vector<double>& block, int rows, int cols, fftw_r2r_kind row_fwd,
                     fftw_r2r_kind row_inv, fftw_r2r_kind col_fwd, fftw_r2r_kind col_inv,
                     const std::vector<double>& row_eig, const std::vector<double>& col_eig, double c,
                     double norm) {
    R2RPlan& fwd = plan_for(rows, cols, row_fwd, col_fwd);
    std::copy(block.begin(), block.end(), fwd.in());
    fwd.run();
    R2RPlan& inv = plan_for(rows, cols, row_inv, col_inv);
    for (int r = 0; r < rows; ++r)
        for (int k = 0; k < cols; ++k) {
            const std::size_t idx = static_cast<std::size_t>(r) * cols + k;
            inv.in()[idx] = fwd.out()[idx] * norm / (1.0 - c * (row_eig[r] + col_eig[k]));
        }
    inv.run();
    std::copy(inv.out(), inv.out() + block.size(), block.begin());
}

}  // namespace

double laplacian_eigenvalue(const GridSpec& grid, int p, int q) {
    return second_difference_eig(p, grid.nx, grid.hx()) + second_difference_eig(q, grid.ny, grid.hy());
}

SpectralCoeffs cosine_transform(const ScalarField& f) {
    const GridSpec& g = f.grid();
    SpectralCoeffs c{g, dct2(f), std::vector<double>(g.cells())};
    for (int q = 0; q < g.ny; ++q) {
        for (int p = 0; p < g.nx; ++p) {
            const std::size_t k = static_cast<std::size_t>(q) * g.nx + p;
            const double wx = (p == 0 ? 1.0 : 2.0) / (2.0 * g.nx);
            const double wy = (q == 0 ? 1.0 : 2.0) / (2.0 * g.ny);
            c.amp[k] *= wx * wy;
            c.eig[k] = laplacian_eigenvalue(g, p, q);
        }
    }
    return c;
}

ScalarField inverse_cosine_transform(const SpectralCoeffs& c) {
    const GridSpec& g = c.grid;
    if (c.amp.size() != g.cells())
        throw GridError("inverse_cosine_transform: " + std::to_string(c.amp.size()) +
                        " coefficients for a grid of " + std::to_string(g.cells()) + " cells");
    // REDFT01 computes X_0 + 2 sum_k X_k cos(...): halve every non-constant index.
    std::vector<double> in(c.amp);
    for (int q = 0; q < g.ny; ++q)
        for (int p = 0; p < g.nx; ++p)
            in[static_cast<std::size_t>(q) * g.nx + p] *= (p == 0 ? 1.0 : 0.5) * (q == 0 ? 1.0 : 0.5);
    return dct3(g, in);
}

ScalarField helmholtz_poly_solve(const std::array<double, 4>& a, const ScalarField& rhs) {
    const GridSpec& g = rhs.grid();
    if (!all_finite(rhs)) throw GridError("helmholtz_poly_solve: non-finite right-hand side");
    const auto symbol = [&](int p, int q) {
        const double s = -laplacian_eigenvalue(g, p, q);
        return a[0] + s * (a[1] + s * (a[2] + s * a[3]));
    };
    const auto scale = [&](int p, int q) {
        const double s = -laplacian_eigenvalue(g, p, q);
        return std::abs(a[0]) + s * (std::abs(a[1]) + s * (std::abs(a[2]) + s * std::abs(a[3])));
    };
    constexpr double tiny = 1e-14;
    for (int q = 0; q < g.ny; ++q)
        for (int p = 0; p < g.nx; ++p)
            if ((p != 0 || q != 0) && std::abs(symbol(p, q)) <= tiny * scale(p, q))
                throw GridError("helmholtz_poly_solve: singular symbol at mode (" + std::to_string(p) +
                                "," + std::to_string(q) + ")");
    const bool gauge = std::abs(a[0]) <= tiny * (std::abs(a[1]) + std::abs(a[2]) + std::abs(a[3]));
    if (gauge) {
        const double rms = norm(rhs) / std::sqrt(g.area());
        if (std::abs(mean(rhs)) > 1e-10 * std::max(rms, 1e-300) && rms > 0.0)
            throw GridError("helmholtz_poly_solve: incompatible mean for a singular constant mode");
    }
    return neumann_diagonal_solve(rhs, [&](int p, int q) {
        return (p == 0 && q == 0 && gauge) ? 0.0 : symbol(p, q);
    });
}

ScalarField poisson_neumann(const ScalarField& rhs) {
    const GridSpec& g = rhs.grid();
    const double rms = norm(rhs) / std::sqrt(g.area());
    if (std::abs(mean(rhs)) > 1e-10 * rms)
        throw GridError("poisson_neumann: incompatible mean " + std::to_string(mean(rhs)));
    return helmholtz_poly_solve({0.0, 1.0, 0.0, 0.0}, rhs);
}

FaceField face_helmholtz_solve(double c, const FaceField& rhs) {
    const GridSpec& g = rhs.grid();
    if (!(c >= 0.0)) throw GridError("face_helmholtz_solve: coefficient must be nonnegative");
    const int nx = g.nx;
    const int ny = g.ny;
    FaceField out(g);

    // x-component: interior faces i = 1..nx-1 (Dirichlet nodes), all rows.
    {
        std::vector<double> ex(nx - 1), ey(ny);
        for (int p = 0; p < nx - 1; ++p) ex[p] = second_difference_eig(p + 1, nx, g.hx());
        for (int q = 0; q < ny; ++q) ey[q] = second_difference_eig(q + 1, ny, g.hy());
        std::vector<double> block(static_cast<std::size_t>(ny) * (nx - 1));
        for (int j = 0; j < ny; ++j)
            for (int i = 1; i < nx; ++i) block[static_cast<std::size_t>(j) * (nx - 1) + i - 1] = rhs.x(i, j);
        solve_component(block, ny, nx - 1, FFTW_RODFT10, FFTW_RODFT01, FFTW_RODFT00, FFTW_RODFT00, ey, ex,
                        c, 1.0 / (4.0 * ny * nx));
        for (int j = 0; j < ny; ++j)
            for (int i = 1; i < nx; ++i) out.x(i, j) = block[static_cast<std::size_t>(j) * (nx - 1) + i - 1];
    }
    // y-component: interior faces j = 1..ny-1, all columns.
    {
        std::vector<double> ex(nx), ey(ny - 1);
        for (int p = 0; p < nx; ++p) ex[p] = second_difference_eig(p + 1, nx, g.hx());
        for (int q = 0; q < ny - 1; ++q) ey[q] = second_difference_eig(q + 1, ny, g.hy());
        std::vector<double> block(static_cast<std::size_t>(ny - 1) * nx);
        for (int j = 1; j < ny; ++j)
            for (int i = 0; i < nx; ++i) block[static_cast<std::size_t>(j - 1) * nx + i] = rhs.y(i, j);
        solve_component(block, ny - 1, nx, FFTW_RODFT00, FFTW_RODFT00, FFTW_RODFT10, FFTW_RODFT01, ey, ex,
                        c, 1.0 / (4.0 * ny * nx));
        for (int j = 1; j < ny; ++j)
            for (int i = 0; i < nx; ++i) out.y(i, j) = block[static_cast<std::size_t>(j - 1) * nx + i];
    }
    return out;
}

}  // namespace nsch
