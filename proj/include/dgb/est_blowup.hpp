#pragma once

#include "dgb/est_linear.hpp"

namespace dgb {

/// Semilinear problem u_t - eps Lap u + a.grad u + f(x,t;u) = 0 with the
/// quadratic reaction f(x,t;u) = f0(x,t) - u^2 and homogeneous Dirichlet
/// conditions; `pd` carries the domain, eps, the (divergence-free)
/// convection field and the initial datum.
struct SemilinearProblem {
    ProblemData pd;
    ScalarTimeField f0; ///< nullptr = 0

    double source0(Pt x, double t) const { return f0 ? f0(x, t) : 0.0; }
    double reaction(Pt x, double t, double u) const { return source0(x, t) - u * u; }
};

/// One slab of the IMEX evolution with the endpoint reconstruction data
/// A^k defined by (A^k, v) = B(t^k; u^k, v) + K_h(u^k, v).
struct BlowupSlab {
    double t0 = 0.0, t1 = 0.0;
    DGFunction u0, u1;
    DGFunction A0, A1;
    std::shared_ptr<const DGSpace> union_space;
    double tau() const { return t1 - t0; }
};

BlowupSlab make_blowup_slab(const DGFunction& u0, const DGFunction& u1, double t0, double t1,
                            const SemilinearProblem& prob, const DGFunction* A0_prev = nullptr);

/// Residual spatial indicator of the semilinear scheme at one endpoint,
///   eta^2 = sum_K (h_K^2/eps) ||A + eps Lap u - a.grad u||_K^2
///         + sum_E (h_E/eps) ||[a u]||_E^2 + (gamma eps/h_E) ||[u]||_E^2
///         + sum_{E int} eps h_E ||[grad u]||_E^2,
/// per-cell values drive refinement in the adaptive driver.
SpatialIndicator blowup_spatial_indicator(const DGFunction& u, const DGFunction& A,
                                          const ProblemData& pd, double t);

/// All estimator parts of one slab.  The time-dependent parts (the combined
/// squared space estimator, the nonlinear lower-order part, the temporal
/// residual and the growth exponent) are integrated with a 3-point Gauss
/// rule in time.
struct BlowupSlabEstimates {
    SpatialIndicator S1_0, S1_1; ///< endpoint residual indicators (own meshes)
    double S2 = 0.0;             ///< data/mesh-change indicator (union mesh)
    double S4 = 0.0;             ///< jump of the discrete time derivative
    double int_A_sq = 0.0;       ///< int (l0 S1_0 + l1 S1_1 + S2 + eta_T1)^2 dt
    double int_B = 0.0;          ///< int (eta_S3 + S4 + eta_T2) dt
    double int_B_sq = 0.0;       ///< int (eta_S3 + S4 + eta_T2)^2 dt
    double int_T2_sq = 0.0;      ///< int eta_T2^2 dt (drives time adaptivity)
    double int_sigma = 0.0;      ///< int sigma_Omega dt; G = exp of this
    double jump_sq_0 = 0.0;      ///< sum_E h_E ||[u_h]||^2 at the endpoints
    double jump_sq_1 = 0.0;      ///< (the in-slab sup; quadratic convex in t)
};

BlowupSlabEstimates blowup_slab_estimators(const BlowupSlab& slab, const SemilinearProblem& prob);

/// Initial-datum indicator eta_I^2 = ||u0 - u_h^0||^2 + sum_E h_E ||[u_h^0]||^2.
double initial_indicator(const DGFunction& u0h, const ScalarField& u0);

/// Whole-run conditional error bound: per step,
///   G = exp(int sigma) (times exp(tau/2) in the L2(H1) variant),
///   phi = sqrt(psi_prev^2 + C int eta_A^2) + C int eta_B
///         (L2(H1): sqrt(psi_prev^2 + C int eta_A^2 + C int eta_B^2)),
///   delta = smallest root > 1 of K^2 eps^-1 tau delta^2 G^2 phi^2 = log delta
///           (L2(H1): K eps^-1/2 sqrt(tau) delta G phi = log delta),
///   psi = delta G phi,
/// and the run terminates when the delta equation has no root.  All generic
/// constants are one.
class BlowupAccumulator {
  public:
    struct StepEval {
        double G = 1.0;
        double phi = 0.0;
        double delta = 1.0;
        double psi = 0.0;
        bool exists = false;
    };

    BlowupAccumulator(double eps, double eta_I, bool l2h1 = false)
        : eps_(eps), psi_(eta_I), l2h1_(l2h1) {}

    /// Evaluate one slab; on success the internal state advances.
    StepEval step(const BlowupSlabEstimates& s, double tau);

    double psi() const { return psi_; }
    /// psi_n (L2(H1): sum_k psi_k) plus the sup-in-time jump term.
    double final_bound() const;
    void observe_jump_sq(double jump_sq);

  private:
    double eps_;
    double psi_;
    bool l2h1_;
    double sum_psi_ = 0.0;
    double max_jump_sq_ = 0.0;
};

} // namespace dgb
