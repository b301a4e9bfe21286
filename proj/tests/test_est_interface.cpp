#include "dgb/est_interface.hpp"

#include "dgb/assembly.hpp"

#include <doctest.h>

#include <cmath>

using namespace dgb;

namespace {

/// Two-domain membrane setup on (-1,1)^2 with the interface at x = 0.
struct MembraneCase {
    ProblemData pd;
    InterfaceProblem iface;
};

MembraneCase membrane_case(double eps) {
    MembraneCase mc;
    mc.pd.domain = {-1.0, -1.0, 1.0, 1.0};
    mc.pd.eps = eps;
    mc.pd.a = [](Pt, double) { return Pt{1.0, 1.0}; };
    mc.pd.div_a = [](Pt, double) { return 0.0; };
    mc.pd.T = 1.0;
    mc.iface.x_interface = 0.0;
    mc.iface.rho = 0.1;
    mc.iface.r = 0.5;
    mc.iface.w1 = 1.0;
    mc.iface.w2 = 0.0;
    mc.iface.reaction = [](Pt, double, double) { return -1.0; };
    mc.iface.L = 0.0;
    mc.iface.mu = 0;
    return mc;
}

std::shared_ptr<DGSpace> make_space(Rect dom, int n, int p) {
    auto mesh = std::make_shared<Mesh>(dom, n, n);
    return std::make_shared<DGSpace>(mesh, p);
}

} // namespace

TEST_CASE("weighted-average coercivity constant closed forms") {
    InterfaceProblem ip;

    // r = 0 collapses to max{1/2, 1/2}
    ip.r = 0.0;
    ip.w1 = 0.3;
    ip.w2 = 0.7;
    CHECK(alpha_rw(ip) == doctest::Approx(0.5).epsilon(1e-15));

    // membrane example parameters: 0.25 + max{|0.5 - 0.5|, |0 - 0.5|}
    ip.r = 0.5;
    ip.w1 = 1.0;
    ip.w2 = 0.0;
    CHECK(alpha_rw(ip) == doctest::Approx(0.75).epsilon(1e-15));

    // symmetric weights: 0 + |0.25 - 0.5|
    ip.r = 0.5;
    ip.w1 = 0.5;
    ip.w2 = 0.5;
    CHECK(alpha_rw(ip) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("alpha_rw stays within [0,1] over the admissible parameter box") {
    InterfaceProblem ip;
    for (int ri = 0; ri <= 10; ++ri)
        for (int wi = 0; wi <= 10; ++wi) {
            ip.r = 0.1 * ri;
            ip.w1 = 0.1 * wi;
            ip.w2 = 1.0 - ip.w1;
            const double v = alpha_rw(ip);
            CHECK(v >= 0.0);
            CHECK(v <= 0.5 * ip.r + 0.5 + 1e-15);
            CHECK(v <= 1.0 + 1e-15);
        }
}

TEST_CASE("interface jump constant for the membrane example") {
    InterfaceProblem ip;
    ip.rho = 0.1;
    ip.r = 0.5;
    ip.w1 = 1.0;
    ip.w2 = 0.0;
    // 2*0.1 + 2*0.25*10*1*2 with |a| = sqrt(2)
    CHECK(alpha_rho(ip, std::sqrt(2.0)) == doctest::Approx(10.2).epsilon(1e-14));
}

TEST_CASE("coercivity margin for a divergence-free field") {
    MembraneCase mc = membrane_case(0.5);
    mc.iface.r = 0.5;
    mc.iface.w1 = 0.5;
    mc.iface.w2 = 0.5;
    auto mesh = std::make_shared<Mesh>(mc.pd.domain, 4, 4);
    // alpha_rw = 1/4, A_i = sqrt(2): margin = -(1/4)sqrt(2)(1 + sqrt(2)/eps)
    const double ai = std::sqrt(2.0);
    const double expect = -0.25 * ai * (1.0 + 4.0 * 0.25 * ai / 0.5);
    CHECK(interface_a_sup(*mesh, mc.pd, mc.iface, 0.0) == doctest::Approx(ai).epsilon(1e-12));
    CHECK(coercivity_margin(*mesh, mc.pd, mc.iface, 0.0) ==
          doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("one-sided interface residual matches a hand evaluation") {
    InterfaceProblem ip;
    ip.rho = 0.1;
    ip.r = 0.5;
    ip.w1 = 1.0;
    ip.w2 = 0.0;
    const Pt a{1.0, 1.0};
    const Pt n{1.0, 0.0}; // outward normal of the left cell
    const double u_left = 2.0, u_right = 3.0;
    const Pt grad_left{0.5, -1.0};
    const double eps = 0.25;
    // a.n u - eps du/dn + rho (u_r - u_l) - r (a.n) {u}_w with {u}_w = u_left
    const double expect = 1.0 * 2.0 - 0.25 * 0.5 + 0.1 * (3.0 - 2.0) - 0.5 * 1.0 * 2.0;
    CHECK(interface_side_residual(u_left, u_right, grad_left, a, n, true, eps, ip) ==
          doctest::Approx(expect).epsilon(1e-14));

    // large permeability with a continuous trace leaves only the flux terms
    ip.rho = 1e8;
    CHECK(interface_side_residual(2.0, 2.0, grad_left, a, n, true, eps, ip) ==
          doctest::Approx(1.0 * 2.0 - 0.25 * 0.5 - 0.5 * 1.0 * 2.0).epsilon(1e-14));
}

TEST_CASE("every interface edge separates the two subdomains") {
    MembraneCase mc = membrane_case(1.0);
    auto mesh = std::make_shared<Mesh>(mc.pd.domain, 4, 4);
    Mesh refined = mesh->refine({0, 5, 9, 10});
    const auto kinds = classify_edges(refined, &mc.iface);
    const auto& edges = refined.edges();
    int n_iface = 0;
    for (std::size_t ei = 0; ei < edges.size(); ++ei) {
        if (kinds[ei] != EdgeKind::Interface) continue;
        ++n_iface;
        REQUIRE(!edges[ei].boundary());
        CHECK(in_omega1(refined, edges[ei].cell[0], mc.iface) !=
              in_omega1(refined, edges[ei].cell[1], mc.iface));
    }
    CHECK(n_iface >= 4);
}

TEST_CASE("all estimator parts vanish for identically zero data") {
    MembraneCase mc = membrane_case(1.0);
    mc.iface.reaction = nullptr; // f(0) = 0 required for a zero residual
    auto sp = make_space(mc.pd.domain, 4, 2);
    DGFunction u0(sp), u1(sp);
    InterfaceSlab slab = make_interface_slab(u0, u1, 0.0, 0.25);
    InterfaceSlabEstimates est = interface_slab_estimators(slab, mc.pd, mc.iface);
    CHECK(est.S1.total_sq == 0.0);
    CHECK(est.S2_1 == 0.0);
    CHECK(est.S3_1 == 0.0);
    CHECK(est.S4_1 == 0.0);
    CHECK(est.S5_1 == 0.0);
    CHECK(est.S6 == 0.0);
    CHECK(est.int_A_sq == 0.0);
    CHECK(est.int_B_sq == 0.0);
    CHECK(est.int_T123_sq == 0.0);
    CHECK(est.int_T4_sq == 0.0);
    CHECK(est.jump_sq_0 == 0.0);
    CHECK(est.jump_sq_1 == 0.0);
    CHECK(hat_eta_T_interface_sq(est, 1.0) == 0.0);

    // with a divergence-free field the growth exponent carries only the
    // interface penalty part, which is data-independent
    CHECK(est.int_sigma > 0.0);

    InterfaceAccumulator acc(0.0);
    acc.add(est);
    InterfaceRunResult res = acc.finish(1.0, mc.iface);
    CHECK(res.phi == 0.0);
    CHECK(res.bound == 0.0);
    REQUIRE(res.delta_exists);
    CHECK(res.delta == 1.0);
}

TEST_CASE("stationary slab has zero temporal parts") {
    MembraneCase mc = membrane_case(0.5);
    auto sp = make_space(mc.pd.domain, 4, 2);
    // a discontinuous state, frozen in time
    DGFunction u = l2_project(sp, [](Pt x) { return x.x < 0.0 ? 1.0 : 0.25 * x.y; }, 5);
    InterfaceSlab slab = make_interface_slab(u, u, 0.0, 0.5);
    InterfaceSlabEstimates est = interface_slab_estimators(slab, mc.pd, mc.iface);
    CHECK(est.S6 == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(est.int_T123_sq == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(est.int_T4_sq == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(hat_eta_T_interface_sq(est, mc.pd.T) == doctest::Approx(0.0).epsilon(1e-13));
    // but the spatial jumps are active and the endpoint jump terms agree
    CHECK(est.S2_1 > 0.0);
    CHECK(est.jump_sq_0 == doctest::Approx(est.jump_sq_1).epsilon(1e-12));
}

TEST_CASE("temporal driver quantity closed form for a pure volume drift") {
    InterfaceSlabEstimates est;
    est.int_T123_sq = 0.0;
    est.int_T4_sq = 0.04 * 0.5; // constant c = 0.2 over a slab of length 0.5
    CHECK(hat_eta_T_interface_sq(est, 2.0) == doctest::Approx(2.0 * 0.04 * 0.5).epsilon(1e-15));
    est.int_T123_sq = 0.3;
    CHECK(hat_eta_T_interface_sq(est, 2.0) >= est.int_T123_sq);
}

TEST_CASE("run continuation closed forms") {
    // mu = 0 with no jump drift: psi = exp(alpha_L T), delta = exp(alpha_L T)
    DeltaRoot r = interface_delta_solve(1.3, 2.0, 0.7, 0, 1.0, 0.0, 0.0);
    REQUIRE(r.exists);
    CHECK(r.delta == doctest::Approx(std::exp(0.7)).epsilon(1e-10));

    // mu = 2, T = 1: exp(alpha_L G phi delta) = delta; alpha_L G phi = 1/e
    // is the tangency exp(delta/e) = delta at delta = e
    r = interface_delta_solve(1.0, 1.0, 1.0, 2, std::exp(-1.0), 0.0, 0.0);
    REQUIRE(r.exists);
    CHECK(r.delta == doctest::Approx(std::exp(1.0)).epsilon(1e-4));

    // above the tangency no root exists
    r = interface_delta_solve(1.0, 1.0, 1.0, 2, 0.5, 0.0, 0.0);
    CHECK(!r.exists);

    // degenerate run with no data
    r = interface_delta_solve(5.0, 0.0, 1.0, 2, 3.0, 1.0, 1.0);
    REQUIRE(r.exists);
    CHECK(r.delta == 1.0);

    // mu = 0 with a jump drift: psi (phi + sqrt(delta G phi) I1) = delta phi,
    // sublinear growth, so a root always exists and solves the equation
    r = interface_delta_solve(2.0, 0.5, 1.0, 0, 0.3, 0.2, 0.0);
    REQUIRE(r.exists);
    const double psi = std::exp(0.3);
    const double lhs = psi * (0.5 + std::sqrt(r.delta * 2.0 * 0.5) * 0.2);
    CHECK(lhs == doctest::Approx(r.delta * 0.5).epsilon(1e-9));
    CHECK(r.delta > 1.0);
}

TEST_CASE("membrane evolution smoke run accumulates a finite bound") {
    MembraneCase mc = membrane_case(0.5);
    auto sp = make_space(mc.pd.domain, 4, 2);
    DGFunction u(sp); // u0 = 0
    const double tau = 0.25;
    InterfaceAccumulator acc(0.0);
    double max_hat = 0.0;
    double t = 0.0;
    for (int k = 0; k < 4; ++k) {
        DGFunction unew =
            interface_step(u, sp, mc.pd, mc.iface, t, t + tau, tau);
        InterfaceSlab slab = make_interface_slab(u, unew, t, t + tau);
        InterfaceSlabEstimates est = interface_slab_estimators(slab, mc.pd, mc.iface);
        CHECK(est.S1.total_sq > 0.0);
        CHECK(est.int_A_sq >= 0.0);
        CHECK(est.int_B_sq >= 0.0);
        max_hat = std::max(max_hat, hat_eta_T_interface_sq(est, mc.pd.T));
        acc.add(est);
        u = unew;
        t += tau;
    }
    CHECK(max_hat > 0.0);
    InterfaceRunResult res = acc.finish(mc.pd.T, mc.iface);
    CHECK(res.G > 1.0);
    CHECK(res.phi > 0.0);
    REQUIRE(res.delta_exists);
    // constant source: the growth constant L is zero, so psi = 1 and the
    // continuation degenerates to delta = 1
    CHECK(res.delta == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.bound == doctest::Approx(std::sqrt(res.G * res.phi)).epsilon(1e-12));
    CHECK(std::isfinite(res.bound));
}
