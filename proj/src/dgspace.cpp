#include "dgb/dgspace.hpp"

#include "dgb/legendre.hpp"
#include "dgb/parallel.hpp"
#include "dgb/quadrature.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>

namespace dgb {

namespace {

/// Reference-square basis values/derivatives at the tensor Gauss points of
/// an n-point rule, cached per (degree, n).  Row = quadrature point, column
/// = basis function (index i + (p+1)*j for x-degree i, y-degree j).
struct BasisTable {
    Eigen::MatrixXd val, dx, dy, dxx, dyy;
};

const BasisTable& basis_table(int p, int n) {
    static std::map<std::pair<int, int>, BasisTable> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(p, n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    const QuadRule2D& q = gauss_legendre_2d(n);
    const int nb = (p + 1) * (p + 1);
    BasisTable t;
    t.val.resize(q.size(), nb);
    t.dx.resize(q.size(), nb);
    t.dy.resize(q.size(), nb);
    t.dxx.resize(q.size(), nb);
    t.dyy.resize(q.size(), nb);
    std::vector<double> vx(p + 1), dxv(p + 1), d2x(p + 1), vy(p + 1), dyv(p + 1), d2y(p + 1);
    for (int qi = 0; qi < q.size(); ++qi) {
        legendre_values_derivs2(p, q.x[qi], vx.data(), dxv.data(), d2x.data());
        legendre_values_derivs2(p, q.y[qi], vy.data(), dyv.data(), d2y.data());
        for (int j = 0; j <= p; ++j)
            for (int i = 0; i <= p; ++i) {
                const int b = i + (p + 1) * j;
                t.val(qi, b) = vx[i] * vy[j];
                t.dx(qi, b) = dxv[i] * vy[j];
                t.dy(qi, b) = vx[i] * dyv[j];
                t.dxx(qi, b) = d2x[i] * vy[j];
                t.dyy(qi, b) = vx[i] * d2y[j];
            }
    }
    return cache.emplace(key, std::move(t)).first->second;
}

/// Map a reference point of [-1,1]^2 into a rectangle.
inline Pt map_to(const Rect& r, double xi, double eta) {
    return {r.x0 + 0.5 * (xi + 1.0) * r.width(), r.y0 + 0.5 * (eta + 1.0) * r.height()};
}

/// Map a physical point into reference coordinates of a rectangle.
inline void map_from(const Rect& r, Pt p, double& xi, double& eta) {
    xi = 2.0 * (p.x - r.x0) / r.width() - 1.0;
    eta = 2.0 * (p.y - r.y0) / r.height() - 1.0;
}

/// Physical normalisation: basis = (2/sqrt(hx*hy)) * l_i(xi) l_j(eta).
inline double phys_scale(const Rect& r) { return 2.0 / std::sqrt(r.width() * r.height()); }

void basis_at(int p, const Rect& r, Pt x, double* vals, Pt* grads, double* lap) {
    double xi, eta;
    map_from(r, x, xi, eta);
    std::vector<double> vx(p + 1), dx(p + 1), d2x(p + 1), vy(p + 1), dy(p + 1), d2y(p + 1);
    legendre_values_derivs2(p, xi, vx.data(), dx.data(), d2x.data());
    legendre_values_derivs2(p, eta, vy.data(), dy.data(), d2y.data());
    const double c = phys_scale(r);
    const double sx = 2.0 / r.width(), sy = 2.0 / r.height();
    for (int j = 0; j <= p; ++j)
        for (int i = 0; i <= p; ++i) {
            const int b = i + (p + 1) * j;
            if (vals) vals[b] = c * vx[i] * vy[j];
            if (grads) grads[b] = {c * sx * dx[i] * vy[j], c * sy * vx[i] * dy[j]};
            if (lap) lap[b] = c * (sx * sx * d2x[i] * vy[j] + sy * sy * vx[i] * d2y[j]);
        }
}

} // namespace

DGSpace::DGSpace(std::shared_ptr<const Mesh> mesh, int degree)
    : mesh_(std::move(mesh)), p_(degree) {
    if (p_ < 0) throw std::invalid_argument("DGSpace: degree must be >= 0");
}

double DGFunction::eval_cell(int cell, Pt x) const {
    const int p = space->degree();
    const int nb = space->block();
    std::vector<double> vals(nb);
    basis_at(p, space->mesh().cell_rect(cell), x, vals.data(), nullptr, nullptr);
    double s = 0.0;
    const int off = space->dof_start(cell);
    for (int b = 0; b < nb; ++b) s += coef[off + b] * vals[b];
    return s;
}

Pt DGFunction::grad_cell(int cell, Pt x) const {
    const int p = space->degree();
    const int nb = space->block();
    std::vector<Pt> grads(nb);
    basis_at(p, space->mesh().cell_rect(cell), x, nullptr, grads.data(), nullptr);
    Pt g{0.0, 0.0};
    const int off = space->dof_start(cell);
    for (int b = 0; b < nb; ++b) g = g + coef[off + b] * grads[b];
    return g;
}

double DGFunction::laplacian_cell(int cell, Pt x) const {
    const int p = space->degree();
    const int nb = space->block();
    std::vector<double> lap(nb);
    basis_at(p, space->mesh().cell_rect(cell), x, nullptr, nullptr, lap.data());
    double s = 0.0;
    const int off = space->dof_start(cell);
    for (int b = 0; b < nb; ++b) s += coef[off + b] * lap[b];
    return s;
}

double DGFunction::eval(Pt x) const {
    const int c = space->mesh().locate(x);
    return c < 0 ? 0.0 : eval_cell(c, x);
}

namespace {
void check_same_space(const DGFunction& a, const DGFunction& b) {
    if (a.space->mesh_ptr() != b.space->mesh_ptr() || a.space->degree() != b.space->degree())
        throw std::invalid_argument("DGFunction arithmetic requires matching spaces");
}
} // namespace

DGFunction operator+(const DGFunction& a, const DGFunction& b) {
    check_same_space(a, b);
    DGFunction r = a;
    r.coef += b.coef;
    return r;
}

DGFunction operator-(const DGFunction& a, const DGFunction& b) {
    check_same_space(a, b);
    DGFunction r = a;
    r.coef -= b.coef;
    return r;
}

DGFunction operator*(double s, const DGFunction& a) {
    DGFunction r = a;
    r.coef *= s;
    return r;
}

DGFunction l2_project(std::shared_ptr<const DGSpace> space, const ScalarField& f, int nq) {
    DGFunction u(space);
    const Mesh& mesh = space->mesh();
    const int p = space->degree();
    const int nb = space->block();
    const QuadRule2D& q = gauss_legendre_2d(nq);
    const BasisTable& bt = basis_table(p, nq);
    std::vector<Eigen::VectorXd> blocks(mesh.n_cells());
    map_indexed(
        mesh.n_cells(),
        [&](int c) {
            const Rect r = mesh.cell_rect(c);
            const double jac = 0.25 * r.width() * r.height();
            const double scale = phys_scale(r);
            Eigen::VectorXd loc = Eigen::VectorXd::Zero(nb);
            for (int qi = 0; qi < q.size(); ++qi) {
                const double fv = f(map_to(r, q.x[qi], q.y[qi])) * q.w[qi] * jac * scale;
                for (int b = 0; b < nb; ++b) loc[b] += fv * bt.val(qi, b);
            }
            blocks[c] = std::move(loc);
            return 0.0;
        },
        default_exec());
    for (int c = 0; c < mesh.n_cells(); ++c)
        u.coef.segment(space->dof_start(c), nb) = blocks[c];
    return u;
}

DGFunction transfer(const DGFunction& u, std::shared_ptr<const DGSpace> dst) {
    const Mesh& dm = dst->mesh();
    const Mesh& sm = u.space->mesh();
    const int p = dst->degree();
    const int nb = dst->block();
    const int nq = std::max(p, u.space->degree()) + 1; // exact for polynomial data
    const QuadRule2D& q = gauss_legendre_2d(nq);
    DGFunction v(dst);
    for (int c = 0; c < dm.n_cells(); ++c) {
        const Rect rc = dm.cell_rect(c);
        Eigen::VectorXd loc = Eigen::VectorXd::Zero(nb);
        std::vector<double> vals(nb);
        for (const auto& [piece, sc] : overlay_pieces(dm, c, sm)) {
            const double jac = 0.25 * piece.width() * piece.height();
            for (int qi = 0; qi < q.size(); ++qi) {
                const Pt x = map_to(piece, q.x[qi], q.y[qi]);
                const double fv = u.eval_cell(sc, x) * q.w[qi] * jac;
                basis_at(p, rc, x, vals.data(), nullptr, nullptr);
                for (int b = 0; b < nb; ++b) loc[b] += fv * vals[b];
            }
        }
        v.coef.segment(dst->dof_start(c), nb) = loc;
    }
    return v;
}

std::vector<EdgePoint> edge_quadrature(const Edge& e, int n) {
    const QuadRule1D& q = gauss_legendre(n);
    std::vector<EdgePoint> out(n);
    for (int i = 0; i < n; ++i) {
        const double s = 0.5 * (q.points[i] + 1.0);
        out[i].x = e.a + s * (e.b - e.a);
        out[i].w = 0.5 * e.length * q.weights[i];
    }
    return out;
}

EdgeTrace trace_on_edge(const DGFunction& u, const Edge& e, int n) {
    EdgeTrace t;
    t.q = edge_quadrature(e, n);
    t.v0.resize(n);
    t.g0.resize(n);
    t.two_sided = !e.boundary();
    if (t.two_sided) {
        t.v1.resize(n);
        t.g1.resize(n);
    }
    for (int i = 0; i < n; ++i) {
        t.v0[i] = u.eval_cell(e.cell[0], t.q[i].x);
        t.g0[i] = u.grad_cell(e.cell[0], t.q[i].x);
        if (t.two_sided) {
            t.v1[i] = u.eval_cell(e.cell[1], t.q[i].x);
            t.g1[i] = u.grad_cell(e.cell[1], t.q[i].x);
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Conforming/nonconforming splitting
// ---------------------------------------------------------------------------

std::pair<DGFunction, DGFunction>
conforming_decompose(const DGFunction& u, const std::function<bool(Pt)>& dirichlet) {
    const auto& space = u.space;
    const Mesh& mesh = space->mesh();
    const int p = space->degree();
    if (p < 1) throw std::invalid_argument("conforming_decompose needs degree >= 1");
    const int np = p + 1;       // nodes per direction (equispaced, endpoints included)
    const int nn = np * np;     // nodes per cell
    const Rect dom = mesh.domain();

    auto node_ref = [&](int k) { return -1.0 + 2.0 * k / p; };
    auto on_boundary = [&](Pt x) {
        const double tol = 1e-12 * (std::abs(dom.width()) + std::abs(dom.height()));
        return std::abs(x.x - dom.x0) < tol || std::abs(x.x - dom.x1) < tol ||
               std::abs(x.y - dom.y0) < tol || std::abs(x.y - dom.y1) < tol;
    };
    auto constrained = [&](Pt x) {
        if (!on_boundary(x)) return false;
        return dirichlet == nullptr || dirichlet(x);
    };

    // Physical node positions per cell.
    std::vector<std::vector<Pt>> nodes(mesh.n_cells(), std::vector<Pt>(nn));
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const Rect r = mesh.cell_rect(c);
        for (int b = 0; b < np; ++b)
            for (int a = 0; a < np; ++a)
                nodes[c][a + np * b] = map_to(r, node_ref(a), node_ref(b));
    }

    // Slave detection: a node lying on a sub-edge whose neighbour is coarser
    // is slaved to the coarse-side trace, unless the point is itself a node
    // position of the coarse cell.
    const auto& edges = mesh.edges();
    const auto& ce = mesh.cell_edges();
    auto is_node_of = [&](int c, Pt x) {
        const Rect r = mesh.cell_rect(c);
        const double tx = 1e-10 * r.width(), ty = 1e-10 * r.height();
        double xi, eta;
        map_from(r, x, xi, eta);
        auto near_node_1d = [&](double v, double tol) {
            const double k = 0.5 * (v + 1.0) * p;
            return std::abs(k - std::round(k)) * 2.0 / p < tol;
        };
        return near_node_1d(xi, 2.0 * tx / r.width() + 1e-12) &&
               near_node_1d(eta, 2.0 * ty / r.height() + 1e-12);
    };

    struct Slave {
        int coarse_cell = -1;
    };
    std::vector<std::vector<Slave>> slave(mesh.n_cells(), std::vector<Slave>(nn));
    auto on_segment = [](Pt x, Pt a, Pt b) {
        const double tol = 1e-10 * (norm(b - a) + 1.0);
        const double cross = (b.x - a.x) * (x.y - a.y) - (b.y - a.y) * (x.x - a.x);
        if (std::abs(cross) > tol) return false;
        const double t = dot(x - a, b - a) / dot(b - a, b - a);
        return t >= -1e-10 && t <= 1.0 + 1e-10;
    };
    for (int c = 0; c < mesh.n_cells(); ++c) {
        for (int ei : ce[c]) {
            const Edge& e = edges[ei];
            if (e.boundary() || e.cell[0] != c) continue;
            const int nbc = e.cell[1];
            if (mesh.cell_key(nbc).level >= mesh.cell_key(c).level) continue;
            for (int m = 0; m < nn; ++m) {
                const Pt x = nodes[c][m];
                if (!on_segment(x, e.a, e.b)) continue;
                if (is_node_of(nbc, x)) continue;
                slave[c][m] = {nbc};
            }
        }
    }

    // Master values: equal-weight average of the one-sided evaluations over
    // every active cell whose closure contains the node point.
    std::vector<std::vector<double>> val(mesh.n_cells(), std::vector<double>(nn, 0.0));
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const Rect r = mesh.cell_rect(c);
        const double dx = 1e-8 * r.width(), dy = 1e-8 * r.height();
        for (int m = 0; m < nn; ++m) {
            if (slave[c][m].coarse_cell >= 0) continue;
            const Pt x = nodes[c][m];
            if (constrained(x)) continue; // stays 0
            // Gather containing cells by probing slightly perturbed points.
            std::vector<int> cells;
            for (int sx = -1; sx <= 1; ++sx)
                for (int sy = -1; sy <= 1; ++sy) {
                    const int cc = mesh.locate({x.x + sx * dx, x.y + sy * dy});
                    if (cc >= 0 && std::find(cells.begin(), cells.end(), cc) == cells.end() &&
                        mesh.cell_rect(cc).contains(x, 1e-9 * r.diameter()))
                        cells.push_back(cc);
                }
            double s = 0.0;
            for (int cc : cells) s += u.eval_cell(cc, x);
            val[c][m] = cells.empty() ? u.eval_cell(c, x) : s / cells.size();
        }
    }

    // Resolve slaves coarsest-first: the coarse side of a hanging face is
    // strictly coarser, so its own nodal values are already final.
    std::vector<int> order(mesh.n_cells());
    for (int i = 0; i < mesh.n_cells(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return mesh.cell_key(a).level < mesh.cell_key(b).level;
    });
    auto face_trace = [&](int c, Pt x) {
        // 1-D Lagrange interpolation through the p+1 nodes of the face of
        // cell c that contains x (x lies on one of the cell's sides).
        const Rect r = mesh.cell_rect(c);
        double xi, eta;
        map_from(r, x, xi, eta);
        const bool vertical = std::abs(std::abs(xi) - 1.0) < 1e-9;
        const double s = vertical ? eta : xi;      // parameter along the face
        const double fixed = vertical ? xi : eta;  // +-1
        double out = 0.0;
        for (int k = 0; k < np; ++k) {
            double lk = 1.0;
            for (int l = 0; l < np; ++l)
                if (l != k) lk *= (s - node_ref(l)) / (node_ref(k) - node_ref(l));
            int a, b;
            if (vertical) {
                a = fixed < 0 ? 0 : p;
                b = k;
            } else {
                a = k;
                b = fixed < 0 ? 0 : p;
            }
            out += lk * val[c][a + np * b];
        }
        return out;
    };
    for (int c : order)
        for (int m = 0; m < nn; ++m)
            if (slave[c][m].coarse_cell >= 0)
                val[c][m] = constrained(nodes[c][m]) ? 0.0 : face_trace(slave[c][m].coarse_cell, nodes[c][m]);

    // Convert nodal values to modal coefficients: C = sqrt(hx*hy)/2 * M * v,
    // with M(n,m) = \int_ref lagrange_m * legendre_n, precomputed once.
    static std::map<int, Eigen::MatrixXd> m_cache;
    static std::mutex m_mtx;
    Eigen::MatrixXd M;
    {
        std::lock_guard<std::mutex> lock(m_mtx);
        auto it = m_cache.find(p);
        if (it == m_cache.end()) {
            const int nq = p + 1;
            const QuadRule2D& q = gauss_legendre_2d(nq);
            const BasisTable& bt = basis_table(p, nq);
            Eigen::MatrixXd Mm = Eigen::MatrixXd::Zero(nn, nn);
            for (int qi = 0; qi < q.size(); ++qi) {
                // 1-D Lagrange values at the quadrature point.
                std::vector<double> lx(np), ly(np);
                for (int k = 0; k < np; ++k) {
                    double vx = 1.0, vy = 1.0;
                    for (int l = 0; l < np; ++l)
                        if (l != k) {
                            vx *= (q.x[qi] - node_ref(l)) / (node_ref(k) - node_ref(l));
                            vy *= (q.y[qi] - node_ref(l)) / (node_ref(k) - node_ref(l));
                        }
                    lx[k] = vx;
                    ly[k] = vy;
                }
                for (int n = 0; n < nn; ++n)
                    for (int b = 0; b < np; ++b)
                        for (int a = 0; a < np; ++a)
                            Mm(n, a + np * b) += q.w[qi] * bt.val(qi, n) * lx[a] * ly[b];
            }
            it = m_cache.emplace(p, std::move(Mm)).first;
        }
        M = it->second;
    }

    DGFunction uc(space);
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const Rect r = mesh.cell_rect(c);
        Eigen::VectorXd v(nn);
        for (int m = 0; m < nn; ++m) v[m] = val[c][m];
        uc.coef.segment(space->dof_start(c), nn) =
            0.5 * std::sqrt(r.width() * r.height()) * (M * v);
    }
    DGFunction ud = u - uc;
    return {std::move(uc), std::move(ud)};
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

double l2_norm(const DGFunction& u) { return u.coef.norm(); }

double l2_norm_cell(const DGFunction& u, int cell) {
    return u.coef.segment(u.space->dof_start(cell), u.space->block()).norm();
}

double energy_norm(const DGFunction& u, double eps, double beta,
                   const std::function<bool(const Edge&)>& edge_active) {
    const Mesh& mesh = u.space->mesh();
    const int p = u.space->degree();
    const int nq = p + 1;
    const QuadRule2D& q = gauss_legendre_2d(nq);
    const BasisTable& bt = basis_table(p, nq);
    const double gamma = 2.0 * p * p;
    const int nb = u.space->block();

    double cell_part = sum_indexed(mesh.n_cells(), [&](int c) {
        const Rect r = mesh.cell_rect(c);
        const double jac = 0.25 * r.width() * r.height();
        const double scale = phys_scale(r);
        const double sx = 2.0 / r.width(), sy = 2.0 / r.height();
        const int off = u.space->dof_start(c);
        double acc = 0.0;
        for (int qi = 0; qi < q.size(); ++qi) {
            double v = 0.0, gx = 0.0, gy = 0.0;
            for (int b = 0; b < nb; ++b) {
                const double cb = u.coef[off + b];
                v += cb * bt.val(qi, b);
                gx += cb * bt.dx(qi, b);
                gy += cb * bt.dy(qi, b);
            }
            v *= scale;
            gx *= scale * sx;
            gy *= scale * sy;
            acc += q.w[qi] * jac * (eps * (gx * gx + gy * gy) + beta * v * v);
        }
        return acc;
    });

    const auto& edges = mesh.edges();
    double edge_part = sum_indexed(static_cast<int>(edges.size()), [&](int ei) {
        const Edge& e = edges[ei];
        if (edge_active && !edge_active(e)) return 0.0;
        const EdgeTrace t = trace_on_edge(u, e, p + 1);
        double jj = 0.0;
        for (std::size_t i = 0; i < t.q.size(); ++i) {
            const double j = t.two_sided ? t.v0[i] - t.v1[i] : t.v0[i];
            jj += t.q[i].w * j * j;
        }
        return (gamma * eps / e.length + beta * e.length) * jj;
    });

    return std::sqrt(cell_part + edge_part);
}

double linf_sampled_cell(const DGFunction& u, int cell, int n) {
    const Mesh& mesh = u.space->mesh();
    const Rect r = mesh.cell_rect(cell);
    const QuadRule2D& q = gauss_legendre_2d(n);
    double m = 0.0;
    for (int qi = 0; qi < q.size(); ++qi)
        m = std::max(m, std::abs(u.eval_cell(cell, map_to(r, q.x[qi], q.y[qi]))));
    for (Pt corner : {Pt{r.x0, r.y0}, Pt{r.x1, r.y0}, Pt{r.x1, r.y1}, Pt{r.x0, r.y1}})
        m = std::max(m, std::abs(u.eval_cell(cell, corner)));
    return m;
}

double linf_sampled(const DGFunction& u, int n) {
    return max_indexed(u.space->mesh().n_cells(),
                       [&](int c) { return linf_sampled_cell(u, c, n); });
}

double l2_error(const DGFunction& u, const ScalarField& exact, int n) {
    const Mesh& mesh = u.space->mesh();
    const QuadRule2D& q = gauss_legendre_2d(n);
    double s = sum_indexed(mesh.n_cells(), [&](int c) {
        const Rect r = mesh.cell_rect(c);
        const double jac = 0.25 * r.width() * r.height();
        double acc = 0.0;
        for (int qi = 0; qi < q.size(); ++qi) {
            const Pt x = map_to(r, q.x[qi], q.y[qi]);
            const double d = u.eval_cell(c, x) - exact(x);
            acc += q.w[qi] * jac * d * d;
        }
        return acc;
    });
    return std::sqrt(s);
}

double energy_error(const DGFunction& u, const ScalarField& exact, const VectorField& exact_grad,
                    double eps, double beta, int n) {
    const Mesh& mesh = u.space->mesh();
    const int p = u.space->degree();
    const double gamma = 2.0 * p * p;
    const QuadRule2D& q = gauss_legendre_2d(n);

    double cell_part = sum_indexed(mesh.n_cells(), [&](int c) {
        const Rect r = mesh.cell_rect(c);
        const double jac = 0.25 * r.width() * r.height();
        double acc = 0.0;
        for (int qi = 0; qi < q.size(); ++qi) {
            const Pt x = map_to(r, q.x[qi], q.y[qi]);
            const double d = u.eval_cell(c, x) - exact(x);
            const Pt g = u.grad_cell(c, x) - exact_grad(x);
            acc += q.w[qi] * jac * (eps * dot(g, g) + beta * d * d);
        }
        return acc;
    });

    const auto& edges = mesh.edges();
    double edge_part = sum_indexed(static_cast<int>(edges.size()), [&](int ei) {
        const Edge& e = edges[ei];
        const EdgeTrace t = trace_on_edge(u, e, n);
        double jj = 0.0;
        for (std::size_t i = 0; i < t.q.size(); ++i) {
            // exact solution is continuous: its interior jump vanishes, and
            // on the boundary the error trace is u - exact.
            const double j = t.two_sided ? t.v0[i] - t.v1[i] : t.v0[i] - exact(t.q[i].x);
            jj += t.q[i].w * j * j;
        }
        return (gamma * eps / e.length + beta * e.length) * jj;
    });

    return std::sqrt(cell_part + edge_part);
}

void write_vtk_function(const DGFunction& u, const std::string& path,
                        const std::string& field_name) {
    const Mesh& mesh = u.space->mesh();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_vtk_function: cannot open " + path);
    const int nc = mesh.n_cells();
    out << "# vtk DataFile Version 3.0\nsolution\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << 4 * nc << " double\n";
    for (int i = 0; i < nc; ++i) {
        const Rect r = mesh.cell_rect(i);
        out << r.x0 << ' ' << r.y0 << " 0\n" << r.x1 << ' ' << r.y0 << " 0\n"
            << r.x1 << ' ' << r.y1 << " 0\n" << r.x0 << ' ' << r.y1 << " 0\n";
    }
    out << "CELLS " << nc << ' ' << 5 * nc << '\n';
    for (int i = 0; i < nc; ++i)
        out << "4 " << 4 * i << ' ' << 4 * i + 1 << ' ' << 4 * i + 2 << ' ' << 4 * i + 3 << '\n';
    out << "CELL_TYPES " << nc << '\n';
    for (int i = 0; i < nc; ++i) out << "9\n";
    out << "POINT_DATA " << 4 * nc << "\nSCALARS " << field_name << " double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < nc; ++i) {
        const Rect r = mesh.cell_rect(i);
        for (Pt c : {Pt{r.x0, r.y0}, Pt{r.x1, r.y0}, Pt{r.x1, r.y1}, Pt{r.x0, r.y1}})
            out << u.eval_cell(i, c) << '\n';
    }
}

} // namespace dgb
