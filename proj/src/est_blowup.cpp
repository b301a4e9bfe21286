#include "dgb/est_blowup.hpp"

#include "dgb/ode_blowup.hpp"
#include "dgb/parallel.hpp"
#include "dgb/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace dgb {

namespace {

inline Pt map_to(const Rect& r, double xi, double eta) {
    return {r.x0 + 0.5 * (xi + 1.0) * r.width(), r.y0 + 0.5 * (eta + 1.0) * r.height()};
}

template <class F>
double cell_l2_sq(const Mesh& mesh, int c, int nq, F&& f) {
    const Rect r = mesh.cell_rect(c);
    const double jac = 0.25 * r.width() * r.height();
    const QuadRule2D& q = gauss_legendre_2d(nq);
    double s = 0.0;
    for (int qi = 0; qi < q.size(); ++qi) {
        const double v = f(map_to(r, q.x[qi], q.y[qi]));
        s += q.w[qi] * jac * v * v;
    }
    return s;
}

/// L2-squared and sup of the jump of u over one edge (one-sided on the
/// boundary), sampled at nq Gauss points.
struct JumpInfo {
    double l2_sq = 0.0;
    double sup = 0.0;
};

JumpInfo edge_jump_info(const DGFunction& u, const Edge& e, int nq) {
    JumpInfo out;
    const EdgeTrace tr = trace_on_edge(u, e, nq);
    for (std::size_t i = 0; i < tr.q.size(); ++i) {
        const double j = tr.two_sided ? tr.v0[i] - tr.v1[i] : tr.v0[i];
        out.l2_sq += tr.q[i].w * j * j;
        out.sup = std::max(out.sup, std::abs(j));
    }
    return out;
}

double jump_term_sq(const DGFunction& u, int nq) {
    const auto& edges = u.space->mesh().edges();
    return sum_indexed(static_cast<int>(edges.size()), [&](int ei) {
        return edges[ei].length * edge_jump_info(u, edges[ei], nq).l2_sq;
    });
}

} // namespace

SpatialIndicator blowup_spatial_indicator(const DGFunction& u, const DGFunction& A,
                                          const ProblemData& pd, double t) {
    const Mesh& mesh = u.space->mesh();
    const int p = u.space->degree();
    const int nq = p + 3;
    const double eps = pd.eps;
    const double gamma = 2.0 * p * p;
    SpatialIndicator out;
    out.cell_sq.assign(mesh.n_cells(), 0.0);

    std::vector<double> cell_terms = map_indexed(
        mesh.n_cells(),
        [&](int c) {
            const double hK = mesh.cell_diameter(c);
            return hK * hK / eps * cell_l2_sq(mesh, c, nq, [&](Pt x) {
                       return A.eval_cell(c, x) + eps * u.laplacian_cell(c, x) -
                              dot(pd.conv(x, t), u.grad_cell(c, x));
                   });
        },
        default_exec());
    for (int c = 0; c < mesh.n_cells(); ++c) out.cell_sq[c] = cell_terms[c];

    const auto& edges = mesh.edges();
    std::vector<double> edge_terms = map_indexed(
        static_cast<int>(edges.size()),
        [&](int ei) {
            const Edge& e = edges[ei];
            const EdgeTrace tr = trace_on_edge(u, e, nq);
            double ju_sq = 0.0, jau_sq = 0.0, jg_sq = 0.0;
            for (std::size_t i = 0; i < tr.q.size(); ++i) {
                const double an = dot(pd.conv(tr.q[i].x, t), e.normal);
                if (tr.two_sided) {
                    const double ju = tr.v0[i] - tr.v1[i];
                    const double jg = dot(tr.g0[i] - tr.g1[i], e.normal);
                    ju_sq += tr.q[i].w * ju * ju;
                    jau_sq += tr.q[i].w * an * an * ju * ju;
                    jg_sq += tr.q[i].w * jg * jg;
                } else {
                    ju_sq += tr.q[i].w * tr.v0[i] * tr.v0[i];
                    jau_sq += tr.q[i].w * an * an * tr.v0[i] * tr.v0[i];
                }
            }
            double v = (gamma * eps / e.length) * ju_sq + e.length / eps * jau_sq;
            if (!e.boundary()) v += eps * e.length * jg_sq;
            return v;
        },
        default_exec());
    for (std::size_t ei = 0; ei < edges.size(); ++ei) {
        const Edge& e = edges[ei];
        if (e.boundary()) {
            out.cell_sq[e.cell[0]] += edge_terms[ei];
        } else {
            out.cell_sq[e.cell[0]] += 0.5 * edge_terms[ei];
            out.cell_sq[e.cell[1]] += 0.5 * edge_terms[ei];
        }
    }
    for (double v : out.cell_sq) out.total_sq += v;
    return out;
}

BlowupSlab make_blowup_slab(const DGFunction& u0, const DGFunction& u1, double t0, double t1,
                            const SemilinearProblem& prob, const DGFunction* A0_prev) {
    BlowupSlab s;
    s.t0 = t0;
    s.t1 = t1;
    s.u0 = u0;
    s.u1 = u1;
    if (A0_prev) {
        s.A0 = *A0_prev;
    } else {
        s.A0 = DGFunction(u0.space);
        s.A0.coef = assemble_B_Kh(*u0.space, prob.pd, t0) * u0.coef;
    }
    s.A1 = DGFunction(u1.space);
    s.A1.coef = assemble_B_Kh(*u1.space, prob.pd, t1) * u1.coef;

    auto umesh = std::make_shared<Mesh>(Mesh::union_mesh(u0.space->mesh(), u1.space->mesh()));
    s.union_space = std::make_shared<DGSpace>(umesh, u1.space->degree());
    return s;
}

double initial_indicator(const DGFunction& u0h, const ScalarField& u0) {
    const int nq = u0h.space->degree() + 3;
    const double e0 = l2_error(u0h, u0, nq);
    return std::sqrt(e0 * e0 + jump_term_sq(u0h, nq));
}

BlowupSlabEstimates blowup_slab_estimators(const BlowupSlab& slab,
                                           const SemilinearProblem& prob) {
    BlowupSlabEstimates out;
    const ProblemData& pd = prob.pd;
    const double t0 = slab.t0, t1 = slab.t1, tau = slab.tau();
    const double eps = pd.eps;
    const auto& usp = slab.union_space;
    const Mesh& umesh = usp->mesh();
    const int p = usp->degree();
    const int nq = p + 3;

    out.S1_0 = blowup_spatial_indicator(slab.u0, slab.A0, pd, t0);
    out.S1_1 = blowup_spatial_indicator(slab.u1, slab.A1, pd, t1);

    // Union-mesh quantities.
    DGFunction U0 = transfer(slab.u0, usp);
    DGFunction U1 = transfer(slab.u1, usp);
    DGFunction A0u = transfer(slab.A0, usp);
    DGFunction A1u = transfer(slab.A1, usp);
    DGFunction P0u = transfer(transfer(slab.u0, slab.u1.space), usp);
    auto reac = [&](Pt x, double t, double v) { return prob.reaction(x, t, v); };
    DGFunction If0u = transfer(project_lagged_reaction(slab.u0, slab.u1.space, reac, t0), usp);

    // S2: lagged-data approximation + mesh change.
    double s2_sq = sum_indexed(umesh.n_cells(), [&](int c) {
        const double hK = umesh.cell_diameter(c);
        return hK * hK / eps * cell_l2_sq(umesh, c, nq, [&](Pt x) {
                   const double fk = prob.reaction(x, t0, U0.eval_cell(c, x));
                   return fk - If0u.eval_cell(c, x) -
                          (U0.eval_cell(c, x) - P0u.eval_cell(c, x)) / tau;
               });
    });
    out.S2 = std::sqrt(s2_sq);

    // S4: jump of the discrete time derivative.
    DGFunction dudt = (1.0 / tau) * (U1 - U0);
    out.S4 = std::sqrt(jump_term_sq(dudt, nq));

    // Endpoint jump terms (their square is convex in t, so the slab sup of
    // the jump term is attained at an endpoint).
    out.jump_sq_0 = jump_term_sq(U0, nq);
    out.jump_sq_1 = jump_term_sq(U1, nq);

    const auto& edges = umesh.edges();
    const auto& ce = umesh.cell_edges();

    // Time-dependent parts on a 3-point Gauss rule.
    const QuadRule1D& qt = gauss_legendre(3);
    for (int k = 0; k < qt.size(); ++k) {
        const double t = t0 + 0.5 * (qt.points[k] + 1.0) * tau;
        const double wt = 0.5 * tau * qt.weights[k];
        const double l0 = (t1 - t) / tau, l1 = (t - t0) / tau;
        DGFunction Ut = l0 * U0 + l1 * U1;

        // eta_T1: convection time-variation (vector-valued integrand).
        double t1_sq = sum_indexed(umesh.n_cells(), [&](int c) {
            const Rect r = umesh.cell_rect(c);
            const double jac = 0.25 * r.width() * r.height();
            const QuadRule2D& q2 = gauss_legendre_2d(nq);
            double acc = 0.0;
            for (int qi = 0; qi < q2.size(); ++qi) {
                const Pt x = map_to(r, q2.x[qi], q2.y[qi]);
                const Pt a = pd.conv(x, t);
                const Pt a0 = pd.conv(x, t0), a1 = pd.conv(x, t1);
                const double v0 = U0.eval_cell(c, x), v1 = U1.eval_cell(c, x);
                const Pt g{l1 * (a1.x - a.x) * v1 + l0 * (a0.x - a.x) * v0,
                           l1 * (a1.y - a.y) * v1 + l0 * (a0.y - a.y) * v0};
                acc += q2.w[qi] * jac * dot(g, g);
            }
            return acc / eps;
        });

        // eta_T2: lagged reaction against the interpolated one plus the
        // reconstruction increment.
        double t2_sq = sum_indexed(umesh.n_cells(), [&](int c) {
            return cell_l2_sq(umesh, c, nq, [&](Pt x) {
                return prob.reaction(x, t0, U0.eval_cell(c, x)) -
                       prob.reaction(x, t, Ut.eval_cell(c, x)) +
                       l0 * (A1u.eval_cell(c, x) - A0u.eval_cell(c, x));
            });
        });

        // eta_S3 and sigma_Omega need the edge jumps of u_h(t).
        std::vector<JumpInfo> ji(edges.size());
        for (std::size_t ei = 0; ei < edges.size(); ++ei)
            ji[ei] = edge_jump_info(Ut, edges[ei], nq);
        std::vector<double> cell_linf = map_indexed(
            umesh.n_cells(), [&](int c) { return linf_sampled_cell(Ut, c, nq); },
            default_exec());

        double s3_sq = 0.0, sup_u = 0.0, sup_jump = 0.0;
        for (int c = 0; c < umesh.n_cells(); ++c) {
            double local_jump_sq = 0.0, local_sup = 0.0;
            for (int ei : ce[static_cast<std::size_t>(c)]) {
                local_jump_sq += edges[static_cast<std::size_t>(ei)].length *
                                 ji[static_cast<std::size_t>(ei)].l2_sq;
                local_sup = std::max(local_sup, ji[static_cast<std::size_t>(ei)].sup);
            }
            const double sigma_K = 2.0 * cell_linf[c] + local_sup;
            s3_sq += sigma_K * sigma_K * local_jump_sq;
            sup_u = std::max(sup_u, cell_linf[c]);
            sup_jump = std::max(sup_jump, local_sup);
        }
        const double sigma_omega = 2.0 * sup_u + sup_jump;

        const double eta_A =
            l0 * out.S1_0.total() + l1 * out.S1_1.total() + out.S2 + std::sqrt(t1_sq);
        const double eta_B = std::sqrt(s3_sq) + out.S4 + std::sqrt(t2_sq);
        out.int_A_sq += wt * eta_A * eta_A;
        out.int_B += wt * eta_B;
        out.int_B_sq += wt * eta_B * eta_B;
        out.int_T2_sq += wt * t2_sq;
        out.int_sigma += wt * sigma_omega;
    }
    return out;
}

BlowupAccumulator::StepEval BlowupAccumulator::step(const BlowupSlabEstimates& s, double tau) {
    StepEval ev;
    ev.G = std::exp(s.int_sigma) * (l2h1_ ? std::exp(0.5 * tau) : 1.0);
    if (l2h1_) {
        ev.phi = std::sqrt(psi_ * psi_ + s.int_A_sq + s.int_B_sq);
    } else {
        ev.phi = std::sqrt(psi_ * psi_ + s.int_A_sq) + s.int_B;
    }
    DeltaRoot root;
    if (l2h1_) {
        root = delta_solve({std::sqrt(tau / eps_) * ev.G * ev.phi});
    } else {
        root = delta_solve({0.0, tau / eps_ * ev.G * ev.G * ev.phi * ev.phi});
    }
    ev.exists = root.exists;
    if (!root.exists) return ev;
    ev.delta = root.delta;
    ev.psi = ev.delta * ev.G * ev.phi;
    psi_ = ev.psi;
    sum_psi_ += ev.psi;
    max_jump_sq_ = std::max({max_jump_sq_, s.jump_sq_0, s.jump_sq_1});
    return ev;
}

void BlowupAccumulator::observe_jump_sq(double jump_sq) {
    max_jump_sq_ = std::max(max_jump_sq_, jump_sq);
}

double BlowupAccumulator::final_bound() const {
    return (l2h1_ ? sum_psi_ : psi_) + std::sqrt(max_jump_sq_);
}

} // namespace dgb
