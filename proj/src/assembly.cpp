#include "dgb/assembly.hpp"

#include "dgb/legendre.hpp"
#include "dgb/quadrature.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace dgb {

std::vector<EdgeKind> classify_edges(const Mesh& mesh, const InterfaceProblem* iface) {
    const auto& edges = mesh.edges();
    std::vector<EdgeKind> kind(edges.size(), EdgeKind::Interior);
    const double tol = 1e-12 * mesh.domain().diameter();
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const Edge& e = edges[i];
        if (e.boundary()) {
            kind[i] = EdgeKind::Dirichlet;
            if (iface && iface->neumann) {
                const Pt mid = 0.5 * (e.a + e.b);
                if (iface->neumann(mid)) kind[i] = EdgeKind::Neumann;
            }
        } else if (iface && std::abs(e.a.x - iface->x_interface) < tol &&
                   std::abs(e.b.x - iface->x_interface) < tol) {
            kind[i] = EdgeKind::Interface;
        }
    }
    return kind;
}

bool in_omega1(const Mesh& mesh, int cell, const InterfaceProblem& iface) {
    return mesh.cell_rect(cell).center().x < iface.x_interface;
}

namespace {

/// Values and gradients of all basis functions of `cell` at a point.
struct BasisEval {
    std::vector<double> val;
    std::vector<Pt> grad;
};

void eval_basis(const DGSpace& sp, int cell, Pt x, BasisEval& out) {
    const int p = sp.degree();
    const int nb = sp.block();
    out.val.resize(nb);
    out.grad.resize(nb);
    const Rect r = sp.mesh().cell_rect(cell);
    std::vector<double> vx(p + 1), dx(p + 1), vy(p + 1), dy(p + 1);
    double xi = 2.0 * (x.x - r.x0) / r.width() - 1.0;
    double eta = 2.0 * (x.y - r.y0) / r.height() - 1.0;
    legendre_values_derivs(p, xi, vx.data(), dx.data());
    legendre_values_derivs(p, eta, vy.data(), dy.data());
    const double c = 2.0 / std::sqrt(r.width() * r.height());
    const double sx = 2.0 / r.width(), sy = 2.0 / r.height();
    for (int j = 0; j <= p; ++j)
        for (int i = 0; i <= p; ++i) {
            const int b = i + (p + 1) * j;
            out.val[b] = c * vx[i] * vy[j];
            out.grad[b] = {c * sx * dx[i] * vy[j], c * sy * vx[i] * dy[j]};
        }
}

} // namespace

Eigen::SparseMatrix<double> assemble_B_Kh(const DGSpace& space, const ProblemData& pd, double t,
                                          const InterfaceProblem* iface) {
    const Mesh& mesh = space.mesh();
    const int p = space.degree();
    const int nb = space.block();
    const int n = space.n_dofs();
    const double eps = pd.eps;
    const double gamma = 2.0 * p * p;
    const int nq = p + 2;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(mesh.n_cells()) * nb * nb * 3);

    // Volume terms.
    const QuadRule2D& q2 = gauss_legendre_2d(nq);
    BasisEval be;
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const Rect r = mesh.cell_rect(c);
        const double jac = 0.25 * r.width() * r.height();
        const int off = space.dof_start(c);
        Eigen::MatrixXd loc = Eigen::MatrixXd::Zero(nb, nb);
        for (int qi = 0; qi < q2.size(); ++qi) {
            const Pt x{r.x0 + 0.5 * (q2.x[qi] + 1.0) * r.width(),
                       r.y0 + 0.5 * (q2.y[qi] + 1.0) * r.height()};
            eval_basis(space, c, x, be);
            const Pt a = pd.conv(x, t);
            const double c0 = (iface ? 0.0 : pd.react(x, t)) - pd.diva(x, t);
            const double w = q2.w[qi] * jac;
            for (int i = 0; i < nb; ++i)
                for (int j = 0; j < nb; ++j) {
                    // trial j, test i
                    double v = eps * dot(be.grad[j], be.grad[i]) -
                               be.val[j] * dot(a, be.grad[i]) + c0 * be.val[j] * be.val[i];
                    loc(i, j) += w * v;
                }
        }
        for (int i = 0; i < nb; ++i)
            for (int j = 0; j < nb; ++j) trip.emplace_back(off + i, off + j, loc(i, j));
    }

    // Edge terms.
    const auto& edges = mesh.edges();
    const auto kinds = classify_edges(mesh, iface);
    BasisEval b0, b1;
    for (std::size_t ei = 0; ei < edges.size(); ++ei) {
        const Edge& e = edges[ei];
        const EdgeKind kind = kinds[ei];
        const int c0 = e.cell[0], c1 = e.cell[1];
        const int off0 = space.dof_start(c0);
        const int off1 = c1 >= 0 ? space.dof_start(c1) : -1;
        const Pt n0 = e.normal;
        const bool two = !e.boundary();
        const auto qe = edge_quadrature(e, nq);

        // Which penalties apply on this edge.
        const bool penalty = (kind == EdgeKind::Interior || kind == EdgeKind::Dirichlet);
        const bool upwind = (kind != EdgeKind::Interface);

        Eigen::MatrixXd loc00 = Eigen::MatrixXd::Zero(nb, nb), loc01 = loc00, loc10 = loc00,
                        loc11 = loc00;
        for (const EdgePoint& ep : qe) {
            eval_basis(space, c0, ep.x, b0);
            if (two) eval_basis(space, c1, ep.x, b1);
            const Pt a = pd.conv(ep.x, t);
            const double an0 = dot(a, n0);

            // Interior penalty (gamma eps / h) [u].[v] on Dirichlet/interior.
            if (penalty) {
                const double cpen = ep.w * gamma * eps / e.length;
                for (int i = 0; i < nb; ++i)
                    for (int j = 0; j < nb; ++j) {
                        loc00(i, j) += cpen * b0.val[j] * b0.val[i];
                        if (two) {
                            loc01(i, j) -= cpen * b1.val[j] * b0.val[i];
                            loc10(i, j) -= cpen * b0.val[j] * b1.val[i];
                            loc11(i, j) += cpen * b1.val[j] * b1.val[i];
                        }
                    }
                // K_h: -({eps grad u}.[v] + {eps grad v}.[u])
                for (int i = 0; i < nb; ++i)
                    for (int j = 0; j < nb; ++j) {
                        if (two) {
                            const double gu0 = 0.5 * eps * dot(b0.grad[j], n0);
                            const double gu1 = 0.5 * eps * dot(b1.grad[j], n0);
                            const double gv0 = 0.5 * eps * dot(b0.grad[i], n0);
                            const double gv1 = 0.5 * eps * dot(b1.grad[i], n0);
                            // [v] = (v0 - v1) n0, [u] = (u0 - u1) n0
                            loc00(i, j) -= ep.w * (gu0 * b0.val[i] + gv0 * b0.val[j]);
                            loc01(i, j) -= ep.w * (gu1 * b0.val[i] - gv0 * b1.val[j]);
                            loc10(i, j) -= ep.w * (-gu0 * b1.val[i] + gv1 * b0.val[j]);
                            loc11(i, j) -= ep.w * (-gu1 * b1.val[i] - gv1 * b1.val[j]);
                        } else {
                            const double gu = eps * dot(b0.grad[j], n0);
                            const double gv = eps * dot(b0.grad[i], n0);
                            loc00(i, j) -= ep.w * (gu * b0.val[i] + gv * b0.val[j]);
                        }
                    }
            }

            // Upwind transport: u|_out [a v], pointwise in the quad point.
            if (upwind && an0 != 0.0) {
                if (two) {
                    // [a v] = an0 (v0 - v1); upwind trace of u.
                    for (int i = 0; i < nb; ++i)
                        for (int j = 0; j < nb; ++j) {
                            if (an0 > 0.0) {
                                loc00(i, j) += ep.w * an0 * b0.val[j] * b0.val[i];
                                loc10(i, j) -= ep.w * an0 * b0.val[j] * b1.val[i];
                            } else {
                                loc01(i, j) += ep.w * an0 * b1.val[j] * b0.val[i];
                                loc11(i, j) -= ep.w * an0 * b1.val[j] * b1.val[i];
                            }
                        }
                } else if (an0 > 0.0) {
                    for (int i = 0; i < nb; ++i)
                        for (int j = 0; j < nb; ++j)
                            loc00(i, j) += ep.w * an0 * b0.val[j] * b0.val[i];
                }
            }

            // Interface stabilisation rho [u].[v] + r {u}_w [a v].
            if (kind == EdgeKind::Interface && iface) {
                const bool c0_left = in_omega1(mesh, c0, *iface);
                const double wt0 = c0_left ? iface->w1 : iface->w2;
                const double wt1 = c0_left ? iface->w2 : iface->w1;
                for (int i = 0; i < nb; ++i)
                    for (int j = 0; j < nb; ++j) {
                        const double rp = ep.w * iface->rho;
                        loc00(i, j) += rp * b0.val[j] * b0.val[i];
                        loc01(i, j) -= rp * b1.val[j] * b0.val[i];
                        loc10(i, j) -= rp * b0.val[j] * b1.val[i];
                        loc11(i, j) += rp * b1.val[j] * b1.val[i];
                        // r {u}_w [a v] with [a v] = an0 (v0 - v1)
                        const double rw = ep.w * iface->r * an0;
                        loc00(i, j) += rw * wt0 * b0.val[j] * b0.val[i];
                        loc01(i, j) += rw * wt1 * b1.val[j] * b0.val[i];
                        loc10(i, j) -= rw * wt0 * b0.val[j] * b1.val[i];
                        loc11(i, j) -= rw * wt1 * b1.val[j] * b1.val[i];
                    }
            }
        }
        for (int i = 0; i < nb; ++i)
            for (int j = 0; j < nb; ++j) {
                if (loc00(i, j) != 0.0) trip.emplace_back(off0 + i, off0 + j, loc00(i, j));
                if (two) {
                    if (loc01(i, j) != 0.0) trip.emplace_back(off0 + i, off1 + j, loc01(i, j));
                    if (loc10(i, j) != 0.0) trip.emplace_back(off1 + i, off0 + j, loc10(i, j));
                    if (loc11(i, j) != 0.0) trip.emplace_back(off1 + i, off1 + j, loc11(i, j));
                }
            }
    }

    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

Eigen::VectorXd assemble_load(const std::shared_ptr<const DGSpace>& space,
                              const ScalarTimeField& f, double t, int nq) {
    if (!f) return Eigen::VectorXd::Zero(space->n_dofs());
    DGFunction proj = l2_project(space, [&](Pt x) { return f(x, t); }, nq);
    return proj.coef;
}

namespace {

Eigen::VectorXd sparse_lu_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& rhs) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw std::runtime_error("sparse LU factorisation failed");
    Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw std::runtime_error("sparse LU solve failed");
    return x;
}

/// Load vector of the lagged reaction (f(x, t, u_old), v) with v on `space`,
/// evaluated exactly on the overlay of the two meshes.
Eigen::VectorXd reaction_load(const DGFunction& u_old, const std::shared_ptr<const DGSpace>& space,
                              const std::function<double(Pt, double, double)>& reaction,
                              double t_old) {
    const Mesh& dm = space->mesh();
    const Mesh& sm = u_old.space->mesh();
    const int p = space->degree();
    const int nb = space->block();
    const int nq = p + 3;
    const QuadRule2D& q = gauss_legendre_2d(nq);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(space->n_dofs());
    BasisEval be;
    for (int c = 0; c < dm.n_cells(); ++c) {
        Eigen::VectorXd loc = Eigen::VectorXd::Zero(nb);
        for (const auto& [piece, sc] : overlay_pieces(dm, c, sm)) {
            const double jac = 0.25 * piece.width() * piece.height();
            for (int qi = 0; qi < q.size(); ++qi) {
                const Pt x{piece.x0 + 0.5 * (q.x[qi] + 1.0) * piece.width(),
                           piece.y0 + 0.5 * (q.y[qi] + 1.0) * piece.height()};
                const double fv = reaction(x, t_old, u_old.eval_cell(sc, x)) * q.w[qi] * jac;
                eval_basis(*space, c, x, be);
                for (int b = 0; b < nb; ++b) loc[b] += fv * be.val[b];
            }
        }
        out.segment(space->dof_start(c), nb) = loc;
    }
    return out;
}

} // namespace

DGFunction project_lagged_reaction(const DGFunction& u_old,
                                   const std::shared_ptr<const DGSpace>& space,
                                   const std::function<double(Pt, double, double)>& reaction,
                                   double t) {
    DGFunction out(space);
    out.coef = reaction_load(u_old, space, reaction, t);
    return out;
}

DGFunction solve_stationary(const std::shared_ptr<const DGSpace>& space, const ProblemData& pd,
                            double t) {
    Eigen::SparseMatrix<double> A = assemble_B_Kh(*space, pd, t);
    Eigen::VectorXd rhs = assemble_load(space, pd.f, t, space->degree() + 2);
    DGFunction u(space);
    u.coef = sparse_lu_solve(A, rhs);
    return u;
}

DGFunction backward_euler_step(const DGFunction& u_old,
                               const std::shared_ptr<const DGSpace>& space,
                               const ProblemData& pd, double t_new, double tau) {
    Eigen::SparseMatrix<double> A = assemble_B_Kh(*space, pd, t_new);
    // Mass matrix is the identity in the orthonormal basis.
    Eigen::SparseMatrix<double> M(space->n_dofs(), space->n_dofs());
    M.setIdentity();
    A += (1.0 / tau) * M;
    DGFunction proj = transfer(u_old, space);
    Eigen::VectorXd rhs =
        assemble_load(space, pd.f, t_new, space->degree() + 2) + (1.0 / tau) * proj.coef;
    DGFunction u(space);
    u.coef = sparse_lu_solve(A, rhs);
    return u;
}

DGFunction imex_step(const DGFunction& u_old, const std::shared_ptr<const DGSpace>& space,
                     const ProblemData& pd,
                     const std::function<double(Pt, double, double)>& reaction, double t_old,
                     double tau) {
    Eigen::SparseMatrix<double> A = assemble_B_Kh(*space, pd, t_old + tau);
    Eigen::SparseMatrix<double> M(space->n_dofs(), space->n_dofs());
    M.setIdentity();
    A += (1.0 / tau) * M;
    DGFunction proj = transfer(u_old, space);
    Eigen::VectorXd rhs = (1.0 / tau) * proj.coef - reaction_load(u_old, space, reaction, t_old);
    DGFunction u(space);
    u.coef = sparse_lu_solve(A, rhs);
    return u;
}

DGFunction interface_step(const DGFunction& u_old, const std::shared_ptr<const DGSpace>& space,
                          const ProblemData& pd, const InterfaceProblem& iface, double t_old,
                          double t_new, double tau) {
    Eigen::SparseMatrix<double> A = assemble_B_Kh(*space, pd, t_new, &iface);
    Eigen::SparseMatrix<double> M(space->n_dofs(), space->n_dofs());
    M.setIdentity();
    A += (1.0 / tau) * M;
    DGFunction proj = transfer(u_old, space);
    Eigen::VectorXd rhs = (1.0 / tau) * proj.coef;
    if (iface.reaction) rhs -= reaction_load(u_old, space, iface.reaction, t_old);

    // Neumann load l(v) = int_{Gamma_N} g v ds.
    if (iface.g) {
        const Mesh& mesh = space->mesh();
        const auto& edges = mesh.edges();
        const auto kinds = classify_edges(mesh, &iface);
        const int nb = space->block();
        BasisEval be;
        for (std::size_t ei = 0; ei < edges.size(); ++ei) {
            if (kinds[ei] != EdgeKind::Neumann) continue;
            const Edge& e = edges[ei];
            const int off = space->dof_start(e.cell[0]);
            for (const EdgePoint& ep : edge_quadrature(e, space->degree() + 2)) {
                eval_basis(*space, e.cell[0], ep.x, be);
                const double gv = iface.g(ep.x, t_new) * ep.w;
                for (int b = 0; b < nb; ++b) rhs[off + b] += gv * be.val[b];
            }
        }
    }

    DGFunction u(space);
    u.coef = sparse_lu_solve(A, rhs);
    return u;
}

} // namespace dgb
