#include "dgb/assembly.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

using namespace dgb;

namespace {

std::shared_ptr<const DGSpace> make_space(const Mesh& m, int p) {
    return std::make_shared<DGSpace>(std::make_shared<Mesh>(m), p);
}

// Pure diffusion with a smooth exact solution u = sin(pi x) sin(pi y).
ProblemData poisson_problem(double eps) {
    using std::numbers::pi;
    ProblemData pd;
    pd.eps = eps;
    pd.f = [eps](Pt x, double) {
        return 2.0 * eps * pi * pi * std::sin(pi * x.x) * std::sin(pi * x.y);
    };
    pd.exact = [](Pt x, double) { return std::sin(pi * x.x) * std::sin(pi * x.y); };
    pd.exact_grad = [](Pt x, double) {
        return Pt{pi * std::cos(pi * x.x) * std::sin(pi * x.y),
                  pi * std::sin(pi * x.x) * std::cos(pi * x.y)};
    };
    return pd;
}

} // namespace

TEST_CASE("stationary solve reproduces an in-space exact solution") {
    // u = x(1-x)y(1-y) is biquadratic and vanishes on the boundary: for
    // p >= 2 the scheme must reproduce it to solver precision (consistency).
    Mesh base({0, 0, 1, 1}, 2, 2);
    Mesh m = base.refine({0}); // hanging nodes included
    auto sp = make_space(m, 2);

    ProblemData pd;
    pd.eps = 0.7;
    pd.a = [](Pt, double) { return Pt{1.0, 0.5}; };
    pd.div_a = [](Pt, double) { return 0.0; };
    pd.b = [](Pt, double) { return 1.0; };
    auto uex = [](Pt x) { return x.x * (1 - x.x) * x.y * (1 - x.y); };
    pd.f = [&](Pt x, double) {
        const double lap = -2.0 * x.y * (1 - x.y) - 2.0 * x.x * (1 - x.x);
        const Pt g{(1 - 2 * x.x) * x.y * (1 - x.y), x.x * (1 - x.x) * (1 - 2 * x.y)};
        return -0.7 * lap + g.x + 0.5 * g.y + uex(x);
    };
    DGFunction u = solve_stationary(sp, pd);
    for (Pt x : {Pt{0.13, 0.37}, Pt{0.61, 0.83}, Pt{0.9, 0.12}})
        CHECK(u.eval(x) == doctest::Approx(uex(x)).epsilon(1e-9));
}

TEST_CASE("Galerkin consistency of the assembled system") {
    // The discrete residual of the computed solution must vanish.
    Mesh m({0, 0, 1, 1}, 3, 3);
    auto sp = make_space(m.refine({4}), 2);
    ProblemData pd = poisson_problem(0.5);
    pd.a = [](Pt x, double) { return Pt{x.y, -x.x}; };
    pd.div_a = [](Pt, double) { return 0.0; };
    DGFunction u = solve_stationary(sp, pd);
    auto A = assemble_B_Kh(*sp, pd, 0.0);
    Eigen::VectorXd res = A * u.coef - assemble_load(sp, pd.f, 0.0, sp->degree() + 2);
    CHECK(res.norm() < 1e-9 * std::max(1.0, u.coef.norm()));
}

TEST_CASE("stationary convergence in the energy norm") {
    ProblemData pd = poisson_problem(1.0);
    const int p = 2;
    double prev = 0.0;
    for (int lvl = 0; lvl < 3; ++lvl) {
        Mesh m({0, 0, 1, 1}, 4 << lvl, 4 << lvl);
        auto sp = make_space(m, p);
        DGFunction u = solve_stationary(sp, pd);
        double err = energy_error(
            u, [&](Pt x) { return pd.exact(x, 0.0); }, [&](Pt x) { return pd.exact_grad(x, 0.0); },
            pd.eps, pd.beta, p + 3);
        if (lvl > 0) {
            const double rate = std::log2(prev / err);
            CHECK(rate > p - 0.2); // h^p in the energy norm
        }
        prev = err;
    }
}

TEST_CASE("backward Euler step: first-order accuracy on an ODE-like problem") {
    // With f spatially constant and no transport, u(t) solves u_t + u = 1
    // pointwise: u = 1 - e^{-t} for u0 = 0 (eps Laplacian of a constant = 0;
    // boundary penalties vanish only away from the boundary, so test against
    // the spatial interior via a reaction-dominated setup on coarse time).
    Mesh m({0, 0, 1, 1}, 2, 2);
    auto sp = make_space(m, 1);
    ProblemData pd;
    pd.eps = 1e-12; // effectively no diffusion => no boundary coupling
    pd.b = [](Pt, double) { return 1.0; };
    pd.f = [](Pt, double) { return 1.0; };

    for (int n : {16, 32}) {
        DGFunction u(sp);
        const double tau = 1.0 / n;
        for (int k = 0; k < n; ++k) u = backward_euler_step(u, sp, pd, (k + 1) * tau, tau);
        const double ex = 1.0 - std::exp(-1.0);
        // Backward Euler: u_N = 1 - (1+tau)^{-N}
        const double be = 1.0 - std::pow(1.0 + tau, -n);
        CHECK(u.eval({0.4, 0.6}) == doctest::Approx(be).epsilon(1e-6));
        CHECK(std::abs(u.eval({0.4, 0.6}) - ex) < 1.5 * tau);
    }
}

TEST_CASE("backward Euler with mesh change conserves polynomial states exactly") {
    // Transfer across refine/coarsen inside the step must be the exact L2
    // projection: starting from an in-space state with zero data and tau ->
    // infinity-like behaviour is not observable, so instead check that the
    // projection inside the step matches a manual transfer.
    Mesh base({0, 0, 1, 1}, 2, 2);
    Mesh fine = base.refine({1, 2});
    auto spc = make_space(base, 2);
    auto spf = make_space(fine, 2);
    ProblemData pd;
    pd.eps = 1.0;
    DGFunction u0 = l2_project(spc, [](Pt x) { return x.x * x.y * (1 - x.x) * (1 - x.y); }, 5);
    DGFunction u1 = backward_euler_step(u0, spf, pd, 0.01, 0.01);
    // Same step computed with the pre-transferred state agrees exactly.
    DGFunction u1b = backward_euler_step(transfer(u0, spf), spf, pd, 0.01, 0.01);
    CHECK((u1.coef - u1b.coef).norm() < 1e-13);
}

TEST_CASE("imex step handles the lagged quadratic reaction") {
    // u_t = u^2 spatially homogeneous start: the dG IMEX step with
    // f(x,t,u) = -u^2 (moved to the left side as +f) gives
    // u1 = (u0 + tau u0^2)/(1) modulo the stiffness, which vanishes for a
    // constant state with eps ~ 0 and no transport.
    Mesh m({-1, -1, 1, 1}, 2, 2);
    auto sp = make_space(m, 2);
    ProblemData pd;
    pd.eps = 1e-13;
    DGFunction u0 = l2_project(sp, [](Pt) { return 2.0; }, 4);
    const double tau = 0.01;
    DGFunction u1 = imex_step(u0, sp, pd, [](Pt, double, double u) { return -u * u; }, 0.0, tau);
    CHECK(u1.eval({0.3, 0.3}) == doctest::Approx(2.0 + tau * 4.0).epsilon(1e-7));
}

TEST_CASE("interface step: coercivity constants of the reference setup") {
    InterfaceProblem ifp;
    ifp.rho = 0.1;
    ifp.r = 0.5;
    ifp.w1 = 1.0;
    ifp.w2 = 0.0;
    // alpha_rw = (r/2)|w1-w2| + max{|r w1 - 1/2|, |r w2 - 1/2|}
    const double arw = 0.5 * ifp.r * std::abs(ifp.w1 - ifp.w2) +
                       std::max(std::abs(ifp.r * ifp.w1 - 0.5), std::abs(ifp.r * ifp.w2 - 0.5));
    CHECK(arw == doctest::Approx(0.75));
}

TEST_CASE("interface classification splits edges correctly") {
    Mesh m({-1, -1, 1, 1}, 4, 4); // interface at x=0 aligned with the grid
    InterfaceProblem ifp;
    ifp.x_interface = 0.0;
    ifp.neumann = [](Pt x) { return x.x > 0.999; }; // right boundary Neumann
    auto kinds = classify_edges(m, &ifp);
    int n_iface = 0, n_neu = 0, n_dir = 0;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        if (kinds[i] == EdgeKind::Interface) ++n_iface;
        if (kinds[i] == EdgeKind::Neumann) ++n_neu;
        if (kinds[i] == EdgeKind::Dirichlet) ++n_dir;
    }
    CHECK(n_iface == 4);
    CHECK(n_neu == 4);
    CHECK(n_dir == 12);
}
