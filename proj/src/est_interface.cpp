#include "dgb/est_interface.hpp"

#include "dgb/parallel.hpp"
#include "dgb/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace dgb {

namespace {

inline Pt map_to(const Rect& r, double xi, double eta) {
    return {r.x0 + 0.5 * (xi + 1.0) * r.width(), r.y0 + 0.5 * (eta + 1.0) * r.height()};
}

double reaction_of(const InterfaceProblem& iface, Pt x, double t, double u) {
    return iface.reaction ? iface.reaction(x, t, u) : 0.0;
}

double neumann_g(const InterfaceProblem& iface, Pt x, double t) {
    return iface.g ? iface.g(x, t) : 0.0;
}

} // namespace

double alpha_rw(const InterfaceProblem& iface) {
    const double r = iface.r, w1 = iface.w1, w2 = iface.w2;
    return 0.5 * r * std::abs(w1 - w2) +
           std::max(std::abs(r * w1 - 0.5), std::abs(r * w2 - 0.5));
}

double alpha_rho(const InterfaceProblem& iface, double a_sup) {
    const double wmax = std::max(iface.w1 * iface.w1, iface.w2 * iface.w2);
    return 2.0 * iface.rho + 2.0 * iface.r * iface.r / iface.rho * wmax * a_sup * a_sup;
}

double interface_a_sup(const Mesh& mesh, const ProblemData& pd, const InterfaceProblem& iface,
                       double t) {
    const auto kinds = classify_edges(mesh, &iface);
    const auto& edges = mesh.edges();
    double sup = 0.0;
    for (std::size_t ei = 0; ei < edges.size(); ++ei) {
        if (kinds[ei] != EdgeKind::Interface) continue;
        for (const EdgePoint& ep : edge_quadrature(edges[ei], 5))
            sup = std::max(sup, norm(pd.conv(ep.x, t)));
    }
    return sup;
}

double coercivity_margin(const Mesh& mesh, const ProblemData& pd, const InterfaceProblem& iface,
                         double t) {
    const QuadRule2D& q = gauss_legendre_2d(4);
    double essinf = 0.0;
    bool first = true;
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const Rect r = mesh.cell_rect(c);
        for (int qi = 0; qi < q.size(); ++qi) {
            const double v = -pd.diva(map_to(r, q.x[qi], q.y[qi]), t);
            essinf = first ? v : std::min(essinf, v);
            first = false;
        }
    }
    const double arw = alpha_rw(iface);
    const double ai = interface_a_sup(mesh, pd, iface, t);
    const double cs = iface.c_star;
    return 0.5 * essinf - cs * arw * ai * (1.0 + 4.0 * cs * arw * ai / pd.eps);
}

double interface_side_residual(double u_this, double u_other, Pt grad_this, Pt a, Pt n_K,
                               bool this_in_omega1, double eps, const InterfaceProblem& iface) {
    const double u1 = this_in_omega1 ? u_this : u_other;
    const double u2 = this_in_omega1 ? u_other : u_this;
    const double avg_w = iface.w1 * u1 + iface.w2 * u2;
    const double an = dot(a, n_K);
    return an * u_this - eps * dot(grad_this, n_K) + iface.rho * (u_other - u_this) -
           iface.r * an * avg_w;
}

SpatialIndicator interface_spatial_indicator(const DGFunction& u1, const DGFunction& u0,
                                             double t0, double t1, const ProblemData& pd,
                                             const InterfaceProblem& iface) {
    const Mesh& mesh = u1.space->mesh();
    const Mesh& mesh0 = u0.space->mesh();
    const int p = u1.space->degree();
    const int nq = p + 3;
    const double eps = pd.eps;
    const double gamma = 2.0 * p * p;
    const double tau = t1 - t0;
    SpatialIndicator out;
    out.cell_sq.assign(mesh.n_cells(), 0.0);

    // Volume residual, integrated exactly on the overlay against the old mesh.
    std::vector<double> cell_terms = map_indexed(
        mesh.n_cells(),
        [&](int c) {
            const double hK = mesh.cell_diameter(c);
            const QuadRule2D& q = gauss_legendre_2d(nq);
            double s = 0.0;
            for (const auto& piece : overlay_pieces(mesh, c, mesh0)) {
                const Rect& r = piece.first;
                const int c0 = piece.second;
                const double jac = 0.25 * r.width() * r.height();
                for (int qi = 0; qi < q.size(); ++qi) {
                    const Pt x = map_to(r, q.x[qi], q.y[qi]);
                    const double vold = u0.eval_cell(c0, x);
                    const double v = -(u1.eval_cell(c, x) - vold) / tau -
                                     reaction_of(iface, x, t0, vold) +
                                     eps * u1.laplacian_cell(c, x) -
                                     dot(pd.conv(x, t1), u1.grad_cell(c, x));
                    s += q.w[qi] * jac * v * v;
                }
            }
            return hK * hK / eps * s;
        },
        default_exec());
    for (int c = 0; c < mesh.n_cells(); ++c) out.cell_sq[c] = cell_terms[c];

    // Edge terms by classification.
    const auto& edges = mesh.edges();
    const auto kinds = classify_edges(mesh, &iface);
    for (std::size_t ei = 0; ei < edges.size(); ++ei) {
        const Edge& e = edges[ei];
        const EdgeTrace tr = trace_on_edge(u1, e, nq);
        const double h = e.length;
        switch (kinds[ei]) {
        case EdgeKind::Dirichlet: {
            // residual zero; penalty jump only (one-sided)
            double ju_sq = 0.0;
            for (std::size_t i = 0; i < tr.q.size(); ++i)
                ju_sq += tr.q[i].w * tr.v0[i] * tr.v0[i];
            out.cell_sq[e.cell[0]] += gamma * eps / h * ju_sq;
            break;
        }
        case EdgeKind::Neumann: {
            // flux defect, classified pointwise by the sign of a.n
            double r_sq = 0.0;
            for (std::size_t i = 0; i < tr.q.size(); ++i) {
                const Pt x = tr.q[i].x;
                const Pt a = pd.conv(x, t1);
                const double an = dot(a, e.normal);
                const double gn = eps * dot(tr.g0[i], e.normal);
                const double g = neumann_g(iface, x, t1);
                const double res = an >= 0.0 ? g - gn : g - (gn - an * tr.v0[i]);
                r_sq += tr.q[i].w * res * res;
            }
            out.cell_sq[e.cell[0]] += h / eps * r_sq;
            break;
        }
        case EdgeKind::Interface: {
            const bool c0_left = in_omega1(mesh, e.cell[0], iface);
            double r0_sq = 0.0, r1_sq = 0.0;
            for (std::size_t i = 0; i < tr.q.size(); ++i) {
                const Pt a = pd.conv(tr.q[i].x, t1);
                const double res0 = interface_side_residual(tr.v0[i], tr.v1[i], tr.g0[i], a,
                                                            e.normal, c0_left, eps, iface);
                const double res1 =
                    interface_side_residual(tr.v1[i], tr.v0[i], tr.g1[i], a,
                                            -1.0 * e.normal, !c0_left, eps, iface);
                r0_sq += tr.q[i].w * res0 * res0;
                r1_sq += tr.q[i].w * res1 * res1;
            }
            out.cell_sq[e.cell[0]] += h / eps * r0_sq;
            out.cell_sq[e.cell[1]] += h / eps * r1_sq;
            break;
        }
        case EdgeKind::Interior: {
            double ju_sq = 0.0, jau_sq = 0.0, jg_sq = 0.0;
            for (std::size_t i = 0; i < tr.q.size(); ++i) {
                const double an = dot(pd.conv(tr.q[i].x, t1), e.normal);
                const double ju = tr.v0[i] - tr.v1[i];
                const double jg = dot(tr.g0[i] - tr.g1[i], e.normal);
                ju_sq += tr.q[i].w * ju * ju;
                jau_sq += tr.q[i].w * an * an * ju * ju;
                jg_sq += tr.q[i].w * jg * jg;
            }
            // -(eps/2)[grad u.n] residual, counted once per adjacent cell
            const double res_part = h / eps * 0.25 * eps * eps * jg_sq;
            out.cell_sq[e.cell[0]] += res_part;
            out.cell_sq[e.cell[1]] += res_part;
            const double jump_part = gamma * eps / h * ju_sq + h / eps * jau_sq;
            out.cell_sq[e.cell[0]] += 0.5 * jump_part;
            out.cell_sq[e.cell[1]] += 0.5 * jump_part;
            break;
        }
        }
    }
    for (double v : out.cell_sq) out.total_sq += v;
    return out;
}

InterfaceSlab make_interface_slab(const DGFunction& u0, const DGFunction& u1, double t0,
                                  double t1) {
    InterfaceSlab s;
    s.t0 = t0;
    s.t1 = t1;
    s.u0 = u0;
    s.u1 = u1;
    auto umesh = std::make_shared<Mesh>(Mesh::union_mesh(u0.space->mesh(), u1.space->mesh()));
    s.union_space = std::make_shared<DGSpace>(umesh, u1.space->degree());
    return s;
}

namespace {

/// Per-edge traces of the two endpoint states, from which the traces of the
/// time interpolant follow by linear combination.
struct EdgeData {
    EdgeTrace tr0, tr1;
};

/// Jump of the linear-in-time interpolant on one edge: L2-squared, sup, and
/// the [a u] L2-squared at time t.
struct EdgeJumpEval {
    double l2_sq = 0.0;
    double au_l2_sq = 0.0;
    double sup = 0.0;
};

EdgeJumpEval eval_edge_jump(const EdgeData& ed, const Edge& e, const ProblemData& pd, double t,
                            double l0, double l1) {
    EdgeJumpEval out;
    for (std::size_t i = 0; i < ed.tr0.q.size(); ++i) {
        const double j0 = ed.tr0.two_sided ? ed.tr0.v0[i] - ed.tr0.v1[i] : ed.tr0.v0[i];
        const double j1 = ed.tr1.two_sided ? ed.tr1.v0[i] - ed.tr1.v1[i] : ed.tr1.v0[i];
        const double j = l0 * j0 + l1 * j1;
        const double an = dot(pd.conv(ed.tr0.q[i].x, t), e.normal);
        out.l2_sq += ed.tr0.q[i].w * j * j;
        out.au_l2_sq += ed.tr0.q[i].w * an * an * j * j;
        out.sup = std::max(out.sup, std::abs(j));
    }
    return out;
}

} // namespace

InterfaceSlabEstimates interface_slab_estimators(const InterfaceSlab& slab,
                                                 const ProblemData& pd,
                                                 const InterfaceProblem& iface) {
    InterfaceSlabEstimates out;
    const double t0 = slab.t0, t1 = slab.t1, tau = slab.tau();
    const double eps = pd.eps;
    const auto& usp = slab.union_space;
    const Mesh& umesh = usp->mesh();
    const int p = usp->degree();
    const int nq = p + 3;
    const double gamma = 2.0 * p * p;
    const double alpha_l = std::max(2.0 * iface.L, std::pow(2.0, iface.mu) * iface.L);
    const double sigma_c = std::max(iface.L, std::pow(2.0, iface.mu - 1) * iface.L);

    out.S1 = interface_spatial_indicator(slab.u1, slab.u0, t0, t1, pd, iface);

    const DGFunction U0 = transfer(slab.u0, usp);
    const DGFunction U1 = transfer(slab.u1, usp);
    const DGFunction Dd = U1 - U0; // u^k - u_h(t) = l0(t) * Dd

    const auto& edges = umesh.edges();
    const auto kinds = classify_edges(umesh, &iface);
    const auto& ce = umesh.cell_edges();
    const int nc = umesh.n_cells();
    const int ne = static_cast<int>(edges.size());

    auto in_gamma = [&](int ei) {
        return kinds[static_cast<std::size_t>(ei)] == EdgeKind::Interior ||
               kinds[static_cast<std::size_t>(ei)] == EdgeKind::Dirichlet;
    };

    // Endpoint traces of U0 and U1 on every edge.
    std::vector<EdgeData> ed(static_cast<std::size_t>(ne));
    for (int ei = 0; ei < ne; ++ei) {
        ed[static_cast<std::size_t>(ei)].tr0 = trace_on_edge(U0, edges[static_cast<std::size_t>(ei)], nq);
        ed[static_cast<std::size_t>(ei)].tr1 = trace_on_edge(U1, edges[static_cast<std::size_t>(ei)], nq);
    }

    // Jump-edge lists of the cell patches (jump set = edges excluding the
    // interface and the Neumann boundary).
    const auto patches = umesh.patches();
    std::vector<std::vector<int>> patch_gamma(static_cast<std::size_t>(nc));
    for (int c = 0; c < nc; ++c) {
        std::vector<int> list = ce[static_cast<std::size_t>(c)];
        for (int nb : patches[static_cast<std::size_t>(c)])
            list.insert(list.end(), ce[static_cast<std::size_t>(nb)].begin(),
                        ce[static_cast<std::size_t>(nb)].end());
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
        list.erase(std::remove_if(list.begin(), list.end(), [&](int ei) { return !in_gamma(ei); }),
                   list.end());
        patch_gamma[static_cast<std::size_t>(c)] = std::move(list);
    }

    // S6 and the endpoint jump terms.
    double s6_sq = 0.0, j0_sq = 0.0, j1_sq = 0.0;
    for (int ei = 0; ei < ne; ++ei) {
        if (!in_gamma(ei)) continue;
        const Edge& e = edges[static_cast<std::size_t>(ei)];
        const EdgeData& d = ed[static_cast<std::size_t>(ei)];
        for (std::size_t i = 0; i < d.tr0.q.size(); ++i) {
            const double j0 = d.tr0.two_sided ? d.tr0.v0[i] - d.tr0.v1[i] : d.tr0.v0[i];
            const double j1 = d.tr1.two_sided ? d.tr1.v0[i] - d.tr1.v1[i] : d.tr1.v0[i];
            const double w = d.tr0.q[i].w;
            s6_sq += e.length * w * (j1 - j0) * (j1 - j0) / (tau * tau);
            j0_sq += e.length * w * j0 * j0;
            j1_sq += e.length * w * j1 * j1;
        }
    }
    out.S6 = std::sqrt(s6_sq);
    out.jump_sq_0 = j0_sq;
    out.jump_sq_1 = j1_sq;

    // Time loop (3-point Gauss); the right endpoint is evaluated separately
    // for the snapshot fields.
    const QuadRule1D& qt = gauss_legendre(3);
    for (int k = 0; k <= qt.size(); ++k) {
        const bool snapshot = (k == qt.size());
        const double t = snapshot ? t1 : t0 + 0.5 * (qt.points[k] + 1.0) * tau;
        const double wt = snapshot ? 0.0 : 0.5 * tau * qt.weights[k];
        const double l1 = (t - t0) / tau, l0 = 1.0 - l1;
        const DGFunction Ut = l0 * U0 + l1 * U1;

        // Per-edge jump data of u_h(t).
        std::vector<EdgeJumpEval> je(static_cast<std::size_t>(ne));
        for (int ei = 0; ei < ne; ++ei)
            je[static_cast<std::size_t>(ei)] = eval_edge_jump(
                ed[static_cast<std::size_t>(ei)], edges[static_cast<std::size_t>(ei)], pd, t, l0, l1);

        // S2: energy-weighted jumps over the jump set.
        double s2_sq = 0.0;
        for (int ei = 0; ei < ne; ++ei) {
            if (!in_gamma(ei)) continue;
            const Edge& e = edges[static_cast<std::size_t>(ei)];
            const EdgeJumpEval& j = je[static_cast<std::size_t>(ei)];
            s2_sq += gamma * eps / e.length * j.l2_sq + e.length / eps * j.au_l2_sq;
        }

        // Edge-set constants at time t.
        double a_n_sup = 0.0, a_i_sup = 0.0;
        std::vector<char> outflow(static_cast<std::size_t>(ne), 0);
        for (int ei = 0; ei < ne; ++ei) {
            const Edge& e = edges[static_cast<std::size_t>(ei)];
            if (kinds[static_cast<std::size_t>(ei)] == EdgeKind::Neumann) {
                double flux = 0.0, sup = 0.0;
                for (const EdgePoint& ep : edge_quadrature(e, nq)) {
                    flux += ep.w * dot(pd.conv(ep.x, t), e.normal);
                    sup = std::max(sup, norm(pd.conv(ep.x, t)));
                }
                if (flux > 0.0) {
                    outflow[static_cast<std::size_t>(ei)] = 1;
                    a_n_sup = std::max(a_n_sup, sup);
                }
            } else if (kinds[static_cast<std::size_t>(ei)] == EdgeKind::Interface) {
                for (const EdgePoint& ep : edge_quadrature(e, nq))
                    a_i_sup = std::max(a_i_sup, norm(pd.conv(ep.x, t)));
            }
        }
        out.a_sup_iface = std::max(out.a_sup_iface, a_i_sup);
        const double arho = alpha_rho(iface, a_i_sup);

        // S3 / S4: patch jumps around the Neumann-outflow and interface edges.
        auto patch_jump_sq = [&](int c) {
            double s = 0.0;
            for (int ei : patch_gamma[static_cast<std::size_t>(c)])
                s += je[static_cast<std::size_t>(ei)].l2_sq;
            return s;
        };
        double s3_sq = 0.0, s4_sq = 0.0;
        for (int ei = 0; ei < ne; ++ei) {
            const Edge& e = edges[static_cast<std::size_t>(ei)];
            if (outflow[static_cast<std::size_t>(ei)]) {
                s3_sq += a_n_sup * patch_jump_sq(e.cell[0]);
            } else if (kinds[static_cast<std::size_t>(ei)] == EdgeKind::Interface) {
                s4_sq += arho * (patch_jump_sq(e.cell[0]) + patch_jump_sq(e.cell[1]));
            }
        }

        // S5, sigma_Omega and the volume T-terms.
        std::vector<double> cell_linf = map_indexed(
            nc, [&](int c) { return linf_sampled_cell(Ut, c, nq); }, default_exec());
        double s5_sq = 0.0, sup_u = 0.0, sup_jump = 0.0, essinf_mda = 0.0;
        bool first_cell = true;
        double t1_sq = 0.0, t4_sq = 0.0;
        const QuadRule2D& q2 = gauss_legendre_2d(nq);
        for (int c = 0; c < nc; ++c) {
            double local_jump_sq = 0.0, local_sup = 0.0, diva_sup = 0.0;
            for (int ei : patch_gamma[static_cast<std::size_t>(c)]) {
                local_jump_sq += edges[static_cast<std::size_t>(ei)].length *
                                 je[static_cast<std::size_t>(ei)].l2_sq;
                local_sup = std::max(local_sup, je[static_cast<std::size_t>(ei)].sup);
            }
            const Rect r = umesh.cell_rect(c);
            const double jac = 0.25 * r.width() * r.height();
            for (int qi = 0; qi < q2.size(); ++qi) {
                const Pt x = map_to(r, q2.x[qi], q2.y[qi]);
                const double da = pd.diva(x, t);
                diva_sup = std::max(diva_sup, std::abs(da));
                essinf_mda = first_cell && qi == 0 ? -da : std::min(essinf_mda, -da);
                const double d = l0 * Dd.eval_cell(c, x);
                const Pt gd = Dd.grad_cell(c, x);
                const Pt a = pd.conv(x, t);
                const Pt v1{std::sqrt(eps) * l0 * gd.x - a.x / std::sqrt(eps) * d,
                            std::sqrt(eps) * l0 * gd.y - a.y / std::sqrt(eps) * d};
                t1_sq += q2.w[qi] * jac * dot(v1, v1);
                const double u0v = U0.eval_cell(c, x);
                const double utv = Ut.eval_cell(c, x);
                const double v4 = reaction_of(iface, x, t0, u0v) -
                                  reaction_of(iface, x, t, utv) - da * d;
                t4_sq += q2.w[qi] * jac * v4 * v4;
            }
            first_cell = false;
            const double sigma_k =
                sigma_c * std::pow(1.0 + 2.0 * cell_linf[c] + local_sup, iface.mu) + diva_sup;
            s5_sq += sigma_k * sigma_k * local_jump_sq;
            sup_u = std::max(sup_u, cell_linf[c]);
            sup_jump = std::max(sup_jump, local_sup);
        }

        // T2 / T3: boundary and interface drifts of u^k - u_h(t).
        double t2_sq = 0.0, t3_sq = 0.0;
        for (int ei = 0; ei < ne; ++ei) {
            const Edge& e = edges[static_cast<std::size_t>(ei)];
            const EdgeData& d = ed[static_cast<std::size_t>(ei)];
            if (outflow[static_cast<std::size_t>(ei)]) {
                for (std::size_t i = 0; i < d.tr0.q.size(); ++i) {
                    const double an = dot(pd.conv(d.tr0.q[i].x, t), e.normal);
                    if (an <= 0.0) continue;
                    const double dv = l0 * (d.tr1.v0[i] - d.tr0.v0[i]);
                    t2_sq += d.tr0.q[i].w * an * dv * dv;
                }
            } else if (kinds[static_cast<std::size_t>(ei)] == EdgeKind::Interface) {
                const bool c0_left = in_omega1(umesh, e.cell[0], iface);
                for (std::size_t i = 0; i < d.tr0.q.size(); ++i) {
                    const double d0 = l0 * (d.tr1.v0[i] - d.tr0.v0[i]);
                    const double d1 = l0 * (d.tr1.v1[i] - d.tr0.v1[i]);
                    const double dw =
                        c0_left ? iface.w1 * d0 + iface.w2 * d1 : iface.w1 * d1 + iface.w2 * d0;
                    const double amag = norm(pd.conv(d.tr0.q[i].x, t));
                    const double v = std::sqrt(iface.rho) * std::abs(d0 - d1) +
                                     iface.r / std::sqrt(iface.rho) * amag * std::abs(dw);
                    t3_sq += d.tr0.q[i].w * v * v;
                }
            }
        }

        const double sigma_omega =
            alpha_l * std::pow(1.0 + 2.0 * sup_u + sup_jump, iface.mu) - essinf_mda +
            2.0 * iface.c_star * alpha_rw(iface) * a_i_sup *
                (1.0 + 4.0 * iface.c_star * alpha_rw(iface) * a_i_sup / eps);
        const double sigma_1 = iface.mu < 1 ? alpha_l * sup_jump : 0.0;
        const double sigma_2 = iface.mu >= 1 ? alpha_l * sup_jump : 0.0;

        const double eta_s2 = std::sqrt(s2_sq), eta_s3 = std::sqrt(s3_sq);
        const double eta_s4 = std::sqrt(s4_sq), eta_s5 = std::sqrt(s5_sq);
        const double eta_t123 = std::sqrt(t1_sq) + std::sqrt(t2_sq) + std::sqrt(t3_sq);
        if (snapshot) {
            out.S2_1 = eta_s2;
            out.S3_1 = eta_s3;
            out.S4_1 = eta_s4;
            out.S5_1 = eta_s5;
            continue;
        }
        const double eta_a = out.S1.total() + eta_s2 + eta_s3 + eta_s4 + eta_t123;
        const double eta_b = eta_s5 + out.S6 + std::sqrt(t4_sq);
        out.int_A_sq += wt * eta_a * eta_a;
        out.int_B_sq += wt * eta_b * eta_b;
        out.int_T123_sq += wt * eta_t123 * eta_t123;
        out.int_T4_sq += wt * t4_sq;
        out.int_sigma += wt * sigma_omega;
        out.int_sigma1 += wt * sigma_1;
        out.int_sigma2_sq += wt * sigma_2 * sigma_2;
    }
    return out;
}

double hat_eta_T_interface_sq(const InterfaceSlabEstimates& s, double T) {
    return s.int_T123_sq + T * s.int_T4_sq;
}

DeltaRoot interface_delta_solve(double G, double phi, double T, int mu, double alpha_L,
                                double int_sigma1, double int_sigma2_sq) {
    DeltaRoot out;
    if (phi <= 0.0) {
        out.exists = true;
        out.delta = 1.0;
        return out;
    }
    const double tpow = std::pow(T, 1.0 - 0.5 * mu);
    // s(x) = log psi + log(phi + (dGphi)^{(1+mu)/2} I1) - log(phi) - x, d = e^x,
    // convex in x; root exists iff the minimum is <= 0.
    auto s_of = [&](double x) {
        const double dgp = std::exp(x) * G * phi;
        double log_psi = 0.0;
        if (int_sigma2_sq > 0.0)
            log_psi += tpow * std::sqrt(int_sigma2_sq) * std::pow(dgp, 0.5 * (mu - 1));
        if (alpha_L > 0.0) log_psi += alpha_L * tpow * std::pow(dgp, 0.5 * mu);
        const double drift =
            int_sigma1 > 0.0 ? std::pow(dgp, 0.5 * (1 + mu)) * int_sigma1 : 0.0;
        return log_psi + std::log(phi + drift) - std::log(phi) - x;
    };
    const double x_hi = std::log(1e16);
    // ternary search for the minimiser of the convex s
    double lo = 0.0, hi = x_hi;
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (s_of(m1) < s_of(m2))
            hi = m2;
        else
            lo = m1;
    }
    const double x_min = 0.5 * (lo + hi);
    const double s_min = s_of(x_min);
    const double s0 = s_of(0.0);
    if (s_min > 1e-11 * std::max(1.0, std::abs(s0))) return out; // no root
    out.exists = true;
    if (s0 <= 0.0) {
        out.delta = 1.0;
        return out;
    }
    double a = 0.0, b = x_min;
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (s_of(m) > 0.0)
            a = m;
        else
            b = m;
    }
    out.delta = std::exp(0.5 * (a + b));
    return out;
}

void InterfaceAccumulator::add(const InterfaceSlabEstimates& s) {
    sum_A_sq_ += s.int_A_sq;
    sum_B_sq_ += s.int_B_sq;
    sum_sigma_ += s.int_sigma;
    sum_sigma1_ += s.int_sigma1;
    sum_sigma2_sq_ += s.int_sigma2_sq;
    max_jump_sq_ = std::max({max_jump_sq_, s.jump_sq_0, s.jump_sq_1});
}

InterfaceRunResult InterfaceAccumulator::finish(double T, const InterfaceProblem& iface) const {
    InterfaceRunResult out;
    out.G = std::exp(sum_sigma_);
    out.phi = e0_sq_ + sum_A_sq_ + T * sum_B_sq_ + max_jump_sq_;
    const double alpha_l = std::max(2.0 * iface.L, std::pow(2.0, iface.mu) * iface.L);
    const DeltaRoot root =
        interface_delta_solve(out.G, out.phi, T, iface.mu, alpha_l, sum_sigma1_, sum_sigma2_sq_);
    out.delta_exists = root.exists;
    out.delta = root.delta;
    out.bound = std::sqrt(out.G * out.phi);
    return out;
}

} // namespace dgb
