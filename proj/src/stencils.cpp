#include "nsch/stencils.hpp"

namespace nsch::stencil {

// ---- strain ----------------------------------------------------------------

Strain strain(const FaceField& v) {
    const GridSpec& g = v.grid();
    const int nx = g.nx, ny = g.ny;
    const double hx = g.hx(), hy = g.hy();
    Strain s{ScalarField(g), ScalarField(g), NodeField(g)};
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            s.xx(i, j) = (v.x(i + 1, j) - v.x(i, j)) / hx;
            s.yy(i, j) = (v.y(i, j + 1) - v.y(i, j)) / hy;
        }
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            const double u_lo = j > 0 ? v.x(i, j - 1) : -v.x(i, 0);
            const double u_hi = j < ny ? v.x(i, j) : -v.x(i, ny - 1);
            const double w_lo = i > 0 ? v.y(i - 1, j) : -v.y(0, j);
            const double w_hi = i < nx ? v.y(i, j) : -v.y(nx - 1, j);
            s.xy(i, j) = 0.5 * ((u_hi - u_lo) / hy + (w_hi - w_lo) / hx);
        }
    return s;
}

FaceField strain_transpose(const Strain& s) {
    const GridSpec& g = s.xx.grid();
    const int nx = g.nx, ny = g.ny;
    const double hx = g.hx(), hy = g.hy();
    FaceField r(g);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            r.x(i + 1, j) += s.xx(i, j) / hx;
            r.x(i, j) -= s.xx(i, j) / hx;
            r.y(i, j + 1) += s.yy(i, j) / hy;
            r.y(i, j) -= s.yy(i, j) / hy;
        }
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            const double cy = 0.5 * s.xy(i, j) / hy;
            const double cx = 0.5 * s.xy(i, j) / hx;
            if (j < ny) r.x(i, j) += cy; else r.x(i, ny - 1) -= cy;
            if (j > 0) r.x(i, j - 1) -= cy; else r.x(i, 0) += cy;
            if (i < nx) r.y(i, j) += cx; else r.y(nx - 1, j) -= cx;
            if (i > 0) r.y(i - 1, j) -= cx; else r.y(0, j) += cx;
        }
    r.clear_boundary();
    return r;
}

double node_weight(const GridSpec& g, int i, int j) {
    const double wx = (i == 0 || i == g.nx) ? 0.5 : 1.0;
    const double wy = (j == 0 || j == g.ny) ? 0.5 : 1.0;
    return wx * wy;
}

NodeField cells_to_nodes(const ScalarField& c) {
    const GridSpec& g = c.grid();
    NodeField n(g);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            double sum = 0.0;
            int count = 0;
            for (int jj = j - 1; jj <= j; ++jj)
                for (int ii = i - 1; ii <= i; ++ii)
                    if (ii >= 0 && ii < g.nx && jj >= 0 && jj < g.ny) {
                        sum += c(ii, jj);
                        ++count;
                    }
            n(i, j) = sum / count;
        }
    return n;
}

ScalarField cells_to_nodes_transpose(const NodeField& n) {
    const GridSpec& g = n.grid;
    ScalarField c(g);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            const int count = ((i == 0 || i == g.nx) ? 1 : 2) * ((j == 0 || j == g.ny) ? 1 : 2);
            for (int jj = j - 1; jj <= j; ++jj)
                for (int ii = i - 1; ii <= i; ++ii)
                    if (ii >= 0 && ii < g.nx && jj >= 0 && jj < g.ny) c(ii, jj) += n(i, j) / count;
        }
    return c;
}

FaceField viscous_stress_divergence(const ScalarField& c, const FaceField& v) {
    const GridSpec& g = v.grid();
    Strain s = strain(v);
    const NodeField cn = cells_to_nodes(c);
    for (std::size_t k = 0; k < s.xx.size(); ++k) {
        s.xx[k] *= 2.0 * c[k];
        s.yy[k] *= 2.0 * c[k];
    }
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) s.xy(i, j) *= 4.0 * node_weight(g, i, j) * cn(i, j);
    FaceField r = strain_transpose(s);
    r *= -1.0;
    return r;
}

ScalarField viscous_stress_coefficient_transpose(const FaceField& v, const FaceField& r) {
    const GridSpec& g = v.grid();
    const Strain sv = strain(v);
    const Strain sr = strain(r);
    ScalarField out(g);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = -2.0 * (sv.xx[k] * sr.xx[k] + sv.yy[k] * sr.yy[k]);
    NodeField n(g);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) n(i, j) = -4.0 * node_weight(g, i, j) * sv.xy(i, j) * sr.xy(i, j);
    out += cells_to_nodes_transpose(n);
    return out;
}

double viscous_work(const ScalarField& c, const FaceField& v) {
    const GridSpec& g = v.grid();
    const Strain s = strain(v);
    const NodeField cn = cells_to_nodes(c);
    double sum = 0.0;
    for (std::size_t k = 0; k < s.xx.size(); ++k) sum += 2.0 * c[k] * (s.xx[k] * s.xx[k] + s.yy[k] * s.yy[k]);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) sum += 4.0 * node_weight(g, i, j) * cn(i, j) * s.xy(i, j) * s.xy(i, j);
    return sum * g.cell_volume();
}

// ---- momentum advection ----------------------------------------------------
//
// adv(a,b).x = dx_cx(cc_x(a) cc_x(b)) + dy_nx(yn(a) xn(b))
// adv(a,b).y = dx_ny(xn(a) yn(b))     + dy_cy(cc_y(a) cc_y(b))
//
// cc_*: faces -> cells, xn/yn: faces -> corners (zero on walls),
// dx_cx: cells -> x-faces, dy_nx: corners -> x-faces, and so on.

namespace {

ScalarField cc_x(const FaceField& f) {
    const GridSpec& g = f.grid();
    ScalarField c(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) c(i, j) = 0.5 * (f.x(i, j) + f.x(i + 1, j));
    return c;
}

void cc_x_T(const ScalarField& c, FaceField& f) {
    const GridSpec& g = f.grid();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            f.x(i, j) += 0.5 * c(i, j);
            f.x(i + 1, j) += 0.5 * c(i, j);
        }
}

ScalarField cc_y(const FaceField& f) {
    const GridSpec& g = f.grid();
    ScalarField c(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) c(i, j) = 0.5 * (f.y(i, j) + f.y(i, j + 1));
    return c;
}

void cc_y_T(const ScalarField& c, FaceField& f) {
    const GridSpec& g = f.grid();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            f.y(i, j) += 0.5 * c(i, j);
            f.y(i, j + 1) += 0.5 * c(i, j);
        }
}

NodeField xn(const FaceField& f) {
    const GridSpec& g = f.grid();
    NodeField n(g);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) n(i, j) = 0.5 * (f.x(i, j - 1) + f.x(i, j));
    return n;
}

void xn_T(const NodeField& n, FaceField& f) {
    const GridSpec& g = f.grid();
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            f.x(i, j - 1) += 0.5 * n(i, j);
            f.x(i, j) += 0.5 * n(i, j);
        }
}

NodeField yn(const FaceField& f) {
    const GridSpec& g = f.grid();
    NodeField n(g);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) n(i, j) = 0.5 * (f.y(i - 1, j) + f.y(i, j));
    return n;
}

void yn_T(const NodeField& n, FaceField& f) {
    const GridSpec& g = f.grid();
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            f.y(i - 1, j) += 0.5 * n(i, j);
            f.y(i, j) += 0.5 * n(i, j);
        }
}

ScalarField mul(const ScalarField& a, const ScalarField& b) { return multiply(a, b); }

NodeField mul(const NodeField& a, const NodeField& b) {
    NodeField r(a.grid);
    for (std::size_t k = 0; k < r.v.size(); ++k) r.v[k] = a.v[k] * b.v[k];
    return r;
}

// Forward differences into faces; boundary normal faces untouched.
void dx_cx(const ScalarField& c, FaceField& f) {
    const GridSpec& g = f.grid();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) f.x(i, j) += (c(i, j) - c(i - 1, j)) / g.hx();
}

ScalarField dx_cx_T(const FaceField& f) {
    const GridSpec& g = f.grid();
    ScalarField c(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            c(i, j) += f.x(i, j) / g.hx();
            c(i - 1, j) -= f.x(i, j) / g.hx();
        }
    return c;
}

void dy_nx(const NodeField& n, FaceField& f) {
    const GridSpec& g = f.grid();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) f.x(i, j) += (n(i, j + 1) - n(i, j)) / g.hy();
}

NodeField dy_nx_T(const FaceField& f) {
    const GridSpec& g = f.grid();
    NodeField n(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            n(i, j + 1) += f.x(i, j) / g.hy();
            n(i, j) -= f.x(i, j) / g.hy();
        }
    return n;
}

void dx_ny(const NodeField& n, FaceField& f) {
    const GridSpec& g = f.grid();
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f.y(i, j) += (n(i + 1, j) - n(i, j)) / g.hx();
}

NodeField dx_ny_T(const FaceField& f) {
    const GridSpec& g = f.grid();
    NodeField n(g);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            n(i + 1, j) += f.y(i, j) / g.hx();
            n(i, j) -= f.y(i, j) / g.hx();
        }
    return n;
}

void dy_cy(const ScalarField& c, FaceField& f) {
    const GridSpec& g = f.grid();
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f.y(i, j) += (c(i, j) - c(i, j - 1)) / g.hy();
}

ScalarField dy_cy_T(const FaceField& f) {
    const GridSpec& g = f.grid();
    ScalarField c(g);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            c(i, j) += f.y(i, j) / g.hy();
            c(i, j - 1) -= f.y(i, j) / g.hy();
        }
    return c;
}

}  // namespace

FaceField momentum_advection(const FaceField& a, const FaceField& b) {
    FaceField r(a.grid());
    dx_cx(mul(cc_x(a), cc_x(b)), r);
    dy_nx(mul(yn(a), xn(b)), r);
    dx_ny(mul(xn(a), yn(b)), r);
    dy_cy(mul(cc_y(a), cc_y(b)), r);
    return r;
}

FaceField momentum_advection_transport_transpose(const FaceField& b, const FaceField& r) {
    FaceField out(r.grid());
    cc_x_T(mul(dx_cx_T(r), cc_x(b)), out);
    yn_T(mul(dy_nx_T(r), xn(b)), out);
    xn_T(mul(dx_ny_T(r), yn(b)), out);
    cc_y_T(mul(dy_cy_T(r), cc_y(b)), out);
    out.clear_boundary();
    return out;
}

FaceField momentum_advection_transported_transpose(const FaceField& a, const FaceField& r) {
    FaceField out(r.grid());
    cc_x_T(mul(dx_cx_T(r), cc_x(a)), out);
    xn_T(mul(dy_nx_T(r), yn(a)), out);
    yn_T(mul(dx_ny_T(r), xn(a)), out);
    cc_y_T(mul(dy_cy_T(r), cc_y(a)), out);
    out.clear_boundary();
    return out;
}

// ---- capillary force and scalar transport ----------------------------------

FaceField korteweg(const ScalarField& mu, const ScalarField& phi) {
    return multiply(average_to_faces(mu), gradient_to_faces(phi));
}

ScalarField korteweg_mu_transpose(const ScalarField& phi, const FaceField& r) {
    return average_to_faces_transpose(multiply(gradient_to_faces(phi), r));
}

ScalarField korteweg_phi_transpose(const ScalarField& mu, const FaceField& r) {
    return -divergence_of_faces(multiply(average_to_faces(mu), r));
}

ScalarField scalar_flux_divergence(const FaceField& v, const ScalarField& f) {
    return divergence_of_faces(multiply(v, average_to_faces(f)));
}

ScalarField scalar_flux_divergence_transpose_scalar(const FaceField& v, const ScalarField& r) {
    return -average_to_faces_transpose(multiply(v, gradient_to_faces(r)));
}

FaceField scalar_flux_divergence_transpose_velocity(const ScalarField& f, const ScalarField& r) {
    FaceField out = multiply(average_to_faces(f), gradient_to_faces(r));
    out *= -1.0;
    return out;
}

ScalarField face_dot_to_cells(const FaceField& a, const FaceField& b) {
    const GridSpec& g = a.grid();
    ScalarField c(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            c(i, j) = 0.5 * (a.x(i, j) * b.x(i, j) + a.x(i + 1, j) * b.x(i + 1, j) + a.y(i, j) * b.y(i, j) +
                             a.y(i, j + 1) * b.y(i, j + 1));
    return c;
}

}  // namespace nsch::stencil
