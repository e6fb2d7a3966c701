#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>

#include "nsch/grid.hpp"

namespace testing {

using nsch::FaceField;
using nsch::GridSpec;
using nsch::ScalarField;

inline ScalarField random_cells(const GridSpec& g, std::uint64_t seed, double amp = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-amp, amp);
    ScalarField f(g);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = d(rng);
    return f;
}

/// Random face field with zero wall-normal components.
inline FaceField random_faces(const GridSpec& g, std::uint64_t seed, double amp = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-amp, amp);
    FaceField f(g);
    for (auto& x : f.xs()) x = d(rng);
    for (auto& y : f.ys()) y = d(rng);
    f.clear_boundary();
    return f;
}

inline FaceField random_solenoidal(const GridSpec& g, std::uint64_t seed, double amp = 1.0) {
    return nsch::leray(random_faces(g, seed, amp));
}

// Interior faces (zero normal on walls) packed as x-faces then y-faces.
inline int interior_faces(const GridSpec& g) { return (g.nx - 1) * g.ny + g.nx * (g.ny - 1); }

inline Eigen::VectorXd pack(const FaceField& f) {
    const GridSpec& g = f.grid();
    Eigen::VectorXd r(interior_faces(g));
    int k = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) r[k++] = f.x(i, j);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) r[k++] = f.y(i, j);
    return r;
}

inline FaceField unpack_faces(const GridSpec& g, const Eigen::VectorXd& r, int offset = 0) {
    FaceField f(g);
    int k = offset;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) f.x(i, j) = r[k++];
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f.y(i, j) = r[k++];
    return f;
}

inline Eigen::VectorXd pack(const ScalarField& f) {
    Eigen::VectorXd r(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) r[k] = f[k];
    return r;
}

inline ScalarField unpack_cells(const GridSpec& g, const Eigen::VectorXd& r, int offset = 0) {
    ScalarField f(g);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = r[offset + k];
    return f;
}

/// Dense matrix of a linear map by probing with unit vectors.
inline Eigen::MatrixXd probe(int n_in, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& map) {
    Eigen::MatrixXd m;
    for (int c = 0; c < n_in; ++c) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n_in);
        e[c] = 1.0;
        Eigen::VectorXd col = map(e);
        if (c == 0) m.resize(col.size(), n_in);
        m.col(c) = col;
    }
    return m;
}

/// Central-difference Jacobian with one Richardson extrapolation.
inline Eigen::MatrixXd fd_jacobian(const Eigen::VectorXd& x0, double eps,
                                   const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f) {
    const int n = static_cast<int>(x0.size());
    Eigen::MatrixXd jac;
    for (int c = 0; c < n; ++c) {
        auto central = [&](double e) {
            Eigen::VectorXd a = x0, b = x0;
            a[c] += e;
            b[c] -= e;
            return Eigen::VectorXd((f(a) - f(b)) / (2.0 * e));
        };
        Eigen::VectorXd col = (4.0 * central(0.5 * eps) - central(eps)) / 3.0;
        if (c == 0) jac.resize(col.size(), n);
        jac.col(c) = col;
    }
    return jac;
}

/// 5-point Neumann Laplacian assembled entry by entry (mirror ghosts).
inline Eigen::MatrixXd dense_laplacian(const GridSpec& g) {
    const int n = static_cast<int>(g.cells());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    const double ax = 1.0 / (g.hx() * g.hx()), ay = 1.0 / (g.hy() * g.hy());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int k = j * g.nx + i;
            if (i > 0) { L(k, k - 1) += ax; L(k, k) -= ax; }
            if (i < g.nx - 1) { L(k, k + 1) += ax; L(k, k) -= ax; }
            if (j > 0) { L(k, k - g.nx) += ay; L(k, k) -= ay; }
            if (j < g.ny - 1) { L(k, k + g.nx) += ay; L(k, k) -= ay; }
        }
    return L;
}

/// div(v avg(f)) for a no-slip v, as a matrix acting on f.
inline Eigen::MatrixXd dense_flux_divergence(const FaceField& v) {
    const GridSpec& g = v.grid();
    const int nc = static_cast<int>(g.cells());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nc, nc);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double s = 0.5 * v.x(i, j) / g.hx();
            const int l = j * g.nx + i - 1, r = j * g.nx + i;
            A(l, l) += s; A(l, r) += s;
            A(r, l) -= s; A(r, r) -= s;
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double s = 0.5 * v.y(i, j) / g.hy();
            const int b = (j - 1) * g.nx + i, t = j * g.nx + i;
            A(b, b) += s; A(b, t) += s;
            A(t, b) -= s; A(t, t) -= s;
        }
    return A;
}

inline double max_diff(const ScalarField& a, const ScalarField& b) { return nsch::max_abs(a - b); }
inline double max_diff(const FaceField& a, const FaceField& b) { return nsch::max_abs(a - b); }

}  // namespace testing
