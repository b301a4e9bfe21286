#include "dgb/est_linear.hpp"

#include "dgb/parallel.hpp"
#include "dgb/quadrature.hpp"

#include <cmath>

namespace dgb {

namespace {

inline Pt map_to(const Rect& r, double xi, double eta) {
    return {r.x0 + 0.5 * (xi + 1.0) * r.width(), r.y0 + 0.5 * (eta + 1.0) * r.height()};
}

/// Integral over one cell of the square of `f`, with nq points/direction.
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

/// Squared edge integrals of the jumps of u; boundary edges use the
/// one-sided convention [u] = u n.
struct EdgeJumpSq {
    double u = 0.0;     ///< int_E [u]^2
    double au = 0.0;    ///< int_E [a u]^2
    double gradu = 0.0; ///< int_E [grad u]^2 (interior edges only)
};

EdgeJumpSq edge_jumps_sq(const DGFunction& u, const Edge& e, const ProblemData& pd, double t,
                         int nq) {
    EdgeJumpSq out;
    const EdgeTrace tr = trace_on_edge(u, e, nq);
    for (std::size_t i = 0; i < tr.q.size(); ++i) {
        const Pt x = tr.q[i].x;
        const double w = tr.q[i].w;
        const double an = dot(pd.conv(x, t), e.normal);
        if (tr.two_sided) {
            const double ju = tr.v0[i] - tr.v1[i];
            const double jg = dot(tr.g0[i] - tr.g1[i], e.normal);
            out.u += w * ju * ju;
            out.au += w * an * an * ju * ju;
            out.gradu += w * jg * jg;
        } else {
            out.u += w * tr.v0[i] * tr.v0[i];
            out.au += w * an * an * tr.v0[i] * tr.v0[i];
        }
    }
    return out;
}

/// Shared implementation of the residual spatial indicator: interior
/// residual `res`, with [a u] summed over interior edges only when
/// `au_interior_only` (stationary form) or over all edges otherwise.
SpatialIndicator spatial_indicator_impl(const DGFunction& u, const ProblemData& pd, double t,
                                        const std::function<double(int, Pt)>& res,
                                        bool au_interior_only) {
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
            return hK * hK / eps * cell_l2_sq(mesh, c, nq, [&](Pt x) { return res(c, x); });
        },
        default_exec());
    for (int c = 0; c < mesh.n_cells(); ++c) out.cell_sq[c] = cell_terms[c];

    const auto& edges = mesh.edges();
    std::vector<double> edge_terms = map_indexed(
        static_cast<int>(edges.size()),
        [&](int ei) {
            const Edge& e = edges[ei];
            const EdgeJumpSq j = edge_jumps_sq(u, e, pd, t, nq);
            double v = (gamma * eps / e.length + pd.beta * e.length) * j.u;
            if (!e.boundary() || !au_interior_only) v += e.length / eps * j.au;
            if (!e.boundary()) v += eps * e.length * j.gradu;
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

} // namespace

SpatialIndicator elliptic_estimator(const DGFunction& u, const ProblemData& pd, double t) {
    return spatial_indicator_impl(
        u, pd, t,
        [&](int c, Pt x) {
            return pd.source(x, t) + pd.eps * u.laplacian_cell(c, x) -
                   dot(pd.conv(x, t), u.grad_cell(c, x)) - pd.react(x, t) * u.eval_cell(c, x);
        },
        /*au_interior_only=*/true);
}

DGFunction compute_Ak(const DGFunction& u, const ProblemData& pd, double t) {
    DGFunction A(u.space);
    A.coef = assemble_B_Kh(*u.space, pd, t) * u.coef;
    return A;
}

TimeSlab make_slab(const DGFunction& u0, const DGFunction& u1, double t0, double t1,
                   const ProblemData& pd, const DGFunction* A0_prev) {
    TimeSlab s;
    s.t0 = t0;
    s.t1 = t1;
    s.u0 = u0;
    s.u1 = u1;
    s.A0 = A0_prev ? *A0_prev : compute_Ak(u0, pd, t0);
    // A1 from the scheme: A1 = P f(t1) - (u1 - P u0)/tau, exact because the
    // solver uses the same projection of the load.
    const auto& sp1 = u1.space;
    Eigen::VectorXd If1 = assemble_load(sp1, pd.f, t1, sp1->degree() + 2);
    DGFunction P0 = transfer(u0, sp1);
    s.A1 = DGFunction(sp1);
    s.A1.coef = If1 - (u1.coef - P0.coef) / (t1 - t0);

    auto umesh = std::make_shared<Mesh>(
        Mesh::union_mesh(u0.space->mesh(), u1.space->mesh()));
    s.union_space = std::make_shared<DGSpace>(umesh, sp1->degree());
    return s;
}

double alpha_T(const ProblemData& pd) {
    const double ae = 1.0 / std::sqrt(pd.eps);
    if (pd.beta <= 0.0) return ae;
    return std::min(ae, 1.0 / std::sqrt(pd.beta));
}

SlabEstimates slab_estimators(const TimeSlab& slab, const ProblemData& pd) {
    SlabEstimates out;
    const double t0 = slab.t0, t1 = slab.t1, tau = slab.tau();
    const double eps = pd.eps;
    const auto& usp = slab.union_space;
    const Mesh& umesh = usp->mesh();
    const int p = usp->degree();
    const int nq = p + 3;

    // Endpoint residual indicators on their own meshes.
    auto s1 = [&](const DGFunction& u, const DGFunction& A, double t) {
        return spatial_indicator_impl(
            u, pd, t,
            [&](int c, Pt x) {
                return A.eval_cell(c, x) + eps * u.laplacian_cell(c, x) -
                       dot(pd.conv(x, t), u.grad_cell(c, x)) - pd.react(x, t) * u.eval_cell(c, x);
            },
            /*au_interior_only=*/false);
    };
    out.S1_0 = s1(slab.u0, slab.A0, t0);
    out.S1_1 = s1(slab.u1, slab.A1, t1);

    // Everything else lives on the union mesh.
    DGFunction U0 = transfer(slab.u0, usp);
    DGFunction U1 = transfer(slab.u1, usp);
    DGFunction A0u = transfer(slab.A0, usp);
    DGFunction A1u = transfer(slab.A1, usp);
    DGFunction P0u = transfer(transfer(slab.u0, slab.u1.space), usp);
    DGFunction If1(slab.u1.space);
    If1.coef = assemble_load(slab.u1.space, pd.f, t1, p + 2);
    DGFunction If1u = transfer(If1, usp);

    // S2: data approximation + mesh change.
    double s2_sq = sum_indexed(umesh.n_cells(), [&](int c) {
        const double hK = umesh.cell_diameter(c);
        return hK * hK / eps * cell_l2_sq(umesh, c, nq, [&](Pt x) {
                   return pd.source(x, t1) - If1u.eval_cell(c, x) +
                          (U0.eval_cell(c, x) - P0u.eval_cell(c, x)) / tau;
               });
    });
    out.S2 = std::sqrt(s2_sq);

    // S3 at the endpoints (own meshes, all edges).
    auto s3 = [&](const DGFunction& u) {
        const Mesh& m = u.space->mesh();
        const auto& edges = m.edges();
        double acc = sum_indexed(static_cast<int>(edges.size()), [&](int ei) {
            const EdgeJumpSq j = edge_jumps_sq(u, edges[ei], pd, 0.0, nq);
            return edges[ei].length * j.u;
        });
        return std::sqrt(acc);
    };
    out.S3_0 = s3(slab.u0);
    out.S3_1 = s3(slab.u1);

    // S4: jump of the discrete time derivative on the union mesh.
    {
        DGFunction dudt = (1.0 / tau) * (U1 - U0);
        out.S4 = s3(dudt);
    }

    // Temporal terms, integrated with a 3-point Gauss rule in time.
    const QuadRule1D& qt = gauss_legendre(3);
    double int_T1_sq = 0.0, int_T2 = 0.0, int_T2_sq = 0.0;
    for (int k = 0; k < qt.size(); ++k) {
        const double t = t0 + 0.5 * (qt.points[k] + 1.0) * tau;
        const double wt = 0.5 * tau * qt.weights[k];
        const double l0 = (t1 - t) / tau, l1 = (t - t0) / tau;

        double eta1_sq = sum_indexed(umesh.n_cells(), [&](int c) {
            // vector-valued integrand; expand the square by components
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

        double eta2_sq = sum_indexed(umesh.n_cells(), [&](int c) {
            return cell_l2_sq(umesh, c, nq, [&](Pt x) {
                const double v0 = U0.eval_cell(c, x), v1 = U1.eval_cell(c, x);
                return pd.source(x, t) - pd.source(x, t1) +
                       l0 * (A1u.eval_cell(c, x) - A0u.eval_cell(c, x)) +
                       l0 * (pd.react(x, t0) - pd.react(x, t) - pd.diva(x, t0) + pd.diva(x, t)) * v0 +
                       l1 * (pd.react(x, t1) - pd.react(x, t) - pd.diva(x, t1) + pd.diva(x, t)) * v1;
            });
        });

        int_T1_sq += wt * eta1_sq;
        int_T2_sq += wt * eta2_sq;
        int_T2 += wt * std::sqrt(eta2_sq);
    }
    out.int_T1_sq = int_T1_sq;
    out.int_T2 = int_T2;
    out.int_T2_sq = int_T2_sq;
    out.hat_T_sq = int_T1_sq + std::min(alpha_T(pd), pd.T) * int_T2_sq;
    return out;
}

void RunTotals::add(const SlabEstimates& s, double tau) {
    sum_S1 += tau / 3.0 * (s.S1_0.total_sq + s.S1_1.total_sq);
    sum_S2_sq += tau * s.S2 * s.S2;
    max_S3_sq = std::max({max_S3_sq, s.S3_0 * s.S3_0, s.S3_1 * s.S3_1});
    sum_S4 += tau * s.S4;
    sum_S4_sq += tau * s.S4 * s.S4;
    sum_T1_sq += s.int_T1_sq;
    sum_T2 += s.int_T2;
    sum_T2_sq += s.int_T2_sq;
}

double RunTotals::eta_S_sq(double alpha) const {
    return e0_sq + sum_S1 + sum_S2_sq + max_S3_sq +
           std::min(sum_S4 * sum_S4, alpha * alpha * sum_S4_sq);
}

double RunTotals::eta_T_sq(double alpha) const {
    return sum_T1_sq + std::min(sum_T2 * sum_T2, alpha * alpha * sum_T2_sq);
}

} // namespace dgb
