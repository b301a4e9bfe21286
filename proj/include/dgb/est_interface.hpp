#pragma once

#include "dgb/est_linear.hpp"
#include "dgb/ode_blowup.hpp"

namespace dgb {

/// Weighted-average constant of the interface coercivity bound,
///   alpha_rw = (r/2)|w1 - w2| + max{|r w1 - 1/2|, |r w2 - 1/2|}.
double alpha_rw(const InterfaceProblem& iface);

/// Interface-jump constant alpha_rho = 2 rho + 2 r^2 rho^{-1} max{w1^2, w2^2} A_i^2,
/// where `a_sup` is the sup of the Euclidean norm of a over the interface.
double alpha_rho(const InterfaceProblem& iface, double a_sup);

/// Sup of |a(.,t)| sampled on the interface edges of the mesh.
double interface_a_sup(const Mesh& mesh, const ProblemData& pd, const InterfaceProblem& iface,
                       double t);

/// L2-coefficient of the coercivity bound of the interface form,
///   margin = (1/2) essinf(-div a) - c* alpha_rw A_i (1 + 4 c* alpha_rw A_i / eps),
/// with essinf and A_i sampled on the given mesh at time t.  Reported, not
/// enforced.
double coercivity_margin(const Mesh& mesh, const ProblemData& pd, const InterfaceProblem& iface,
                         double t);

/// One-sided strong residual on an interface edge seen from the cell K with
/// outward normal n_K:
///   (a u - eps grad u).n_K + rho (u_other - u_this) - r (a.n_K) {u}_w,
/// where {u}_w = w1 u|_Omega1 + w2 u|_Omega2.
double interface_side_residual(double u_this, double u_other, Pt grad_this, Pt a, Pt n_K,
                               bool this_in_omega1, double eps, const InterfaceProblem& iface);

/// Residual spatial indicator of the interface scheme at the step endpoint,
/// computed on the mesh of u1 (u0 is integrated exactly via the overlay):
///   eta^2 = sum_K (h_K^2/eps) ||R||_K^2 + sum_K sum_{E on dK} (h_E/eps) ||R||_E^2
///         + sum_{E Dirichlet/interior} (gamma eps/h_E) ||[u1]||_E^2
///         + sum_{E interior} (h_E/eps) ||[a u1]||_E^2,
/// with R the piecewise strong residual: in cells
/// -(u1-u0)/tau - f(u0) + eps Lap u1 - a.grad u1; zero on the Dirichlet
/// boundary; the Neumann flux defects g - eps grad u1 . n (outflow) and
/// g - (eps grad u1 - a u1).n (inflow), classified pointwise by the sign of
/// a.n; the one-sided interface residual on each side of the interface; and
/// -(eps/2)[grad u1 . n] on interior edges (counted from both cells).
SpatialIndicator interface_spatial_indicator(const DGFunction& u1, const DGFunction& u0,
                                             double t0, double t1, const ProblemData& pd,
                                             const InterfaceProblem& iface);

/// One slab (t0, t1] of the IMEX interface evolution with the common
/// refinement of the endpoint meshes.
struct InterfaceSlab {
    double t0 = 0.0, t1 = 0.0;
    DGFunction u0, u1;
    std::shared_ptr<const DGSpace> union_space;
    double tau() const { return t1 - t0; }
};

InterfaceSlab make_interface_slab(const DGFunction& u0, const DGFunction& u1, double t0,
                                  double t1);

/// All estimator parts of one slab.  Values suffixed _1 are the snapshot at
/// the right endpoint; int_* fields are slab time integrals (3-point Gauss).
/// The jump set excludes interface and Neumann edges throughout.
struct InterfaceSlabEstimates {
    SpatialIndicator S1; ///< endpoint residual indicator (mesh of u1)
    double S2_1 = 0.0;   ///< nonconforming energy jumps at t1
    double S3_1 = 0.0;   ///< Neumann-outflow patch jumps at t1
    double S4_1 = 0.0;   ///< interface patch jumps at t1
    double S5_1 = 0.0;   ///< growth-weighted patch jumps at t1
    double S6 = 0.0;     ///< jump of the discrete time derivative
    double int_A_sq = 0.0;      ///< int (S1 + S2 + S3 + S4 + T1 + T2 + T3)^2 dt
    double int_B_sq = 0.0;      ///< int (S5 + S6 + T4)^2 dt
    double int_T123_sq = 0.0;   ///< int (T1 + T2 + T3)^2 dt (drives time adaptivity)
    double int_T4_sq = 0.0;     ///< int T4^2 dt
    double int_sigma = 0.0;     ///< int sigma_Omega dt
    double int_sigma1 = 0.0;    ///< int sigma_1 dt
    double int_sigma2_sq = 0.0; ///< int sigma_2^2 dt
    double jump_sq_0 = 0.0;     ///< sum_E h_E ||[u_h]||^2 at the endpoints
    double jump_sq_1 = 0.0;
    double a_sup_iface = 0.0;   ///< sup |a| on the interface over the slab
};

InterfaceSlabEstimates interface_slab_estimators(const InterfaceSlab& slab,
                                                 const ProblemData& pd,
                                                 const InterfaceProblem& iface);

/// Temporal driver quantity of one slab,
///   hat^2 = int (T1 + T2 + T3)^2 dt + T int T4^2 dt.
double hat_eta_T_interface_sq(const InterfaceSlabEstimates& s, double T);

/// Smallest delta > 1 with
///   psi(delta) (phi + (delta G phi)^{(1+mu)/2} I1) = delta phi,
///   psi(delta) = exp(T^{1-mu/2} sqrt(I2sq) (delta G phi)^{(mu-1)/2}
///              + alpha_L T^{1-mu/2} (delta G phi)^{mu/2}),
/// where I1 = int sigma_1 dt and I2sq = int sigma_2^2 dt.  All generic
/// constants are one; phi = 0 degenerates to delta = 1.
DeltaRoot interface_delta_solve(double G, double phi, double T, int mu, double alpha_L,
                                double int_sigma1, double int_sigma2_sq);

/// Whole-run conditional bound evaluated after the adaptive run completes.
struct InterfaceRunResult {
    double G = 1.0;
    double phi = 0.0;   ///< squared-type quantity
    double delta = 1.0;
    double bound = 0.0; ///< sqrt(G phi), valid only when delta exists
    bool delta_exists = false;
};

/// Accumulates the per-slab integrals of the whole-run continuation:
///   G   = exp int_0^T sigma_Omega dt,
///   phi = ||e(0)||^2 + int eta_A^2 + T int eta_B^2 + esssup_t sum h_E ||[u_h]||^2.
class InterfaceAccumulator {
  public:
    explicit InterfaceAccumulator(double e0_sq) : e0_sq_(e0_sq) {}

    void add(const InterfaceSlabEstimates& s);
    InterfaceRunResult finish(double T, const InterfaceProblem& iface) const;

  private:
    double e0_sq_;
    double sum_A_sq_ = 0.0, sum_B_sq_ = 0.0;
    double sum_sigma_ = 0.0, sum_sigma1_ = 0.0, sum_sigma2_sq_ = 0.0;
    double max_jump_sq_ = 0.0;
};

} // namespace dgb
