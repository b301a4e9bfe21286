#pragma once

#include "dgb/assembly.hpp"

#include <memory>
#include <vector>

namespace dgb {

/// Per-cell breakdown of a spatial indicator: `cell_sq[K]` is the squared
/// contribution of cell K (edge terms split half/half between the two
/// adjacent cells; boundary edges count fully towards their cell).
struct SpatialIndicator {
    double total_sq = 0.0;
    std::vector<double> cell_sq;
    double total() const { return std::sqrt(total_sq); }
};

/// Residual spatial indicator of the stationary problem,
///   eta^2 = sum_K (h_K^2/eps) ||f + eps Lap u - a.grad u - b u||_K^2
///         + sum_E (gamma eps/h_E + beta h_E) ||[u]||_E^2
///         + sum_{E int} (h_E/eps) ||[a u]||_E^2
///         + sum_{E int} eps h_E ||[grad u]||_E^2.
SpatialIndicator elliptic_estimator(const DGFunction& u, const ProblemData& pd, double t);

/// The discrete elliptic reconstruction datum A with (A, v) = B(t; u, v) +
/// K_h(u, v) for all v in the space of u (mass solve is trivial since the
/// basis is orthonormal).
DGFunction compute_Ak(const DGFunction& u, const ProblemData& pd, double t);

/// One space-time slab (t0, t1] of the fully discrete evolution, with the
/// endpoint states, their reconstruction data and the common-refinement
/// space used for all mixed-mesh terms.
struct TimeSlab {
    double t0 = 0.0, t1 = 0.0;
    DGFunction u0, u1; ///< endpoint states on their own spaces
    DGFunction A0, A1; ///< reconstruction data on the endpoint spaces
    std::shared_ptr<const DGSpace> union_space;
    double tau() const { return t1 - t0; }
};

/// Assemble a slab.  A0 is taken from `A0_prev` when given (so consecutive
/// slabs reuse it); A1 is computed from the scheme itself:
///   A1 = P f(t1) - (u1 - P u0)/tau,  P = projection onto the space of u1.
TimeSlab make_slab(const DGFunction& u0, const DGFunction& u1, double t0, double t1,
                   const ProblemData& pd, const DGFunction* A0_prev = nullptr);

/// All estimator parts of one slab.  Quantities are stored unsquared unless
/// suffixed _sq; time integrals use a 3-point Gauss rule.
struct SlabEstimates {
    SpatialIndicator S1_0, S1_1; ///< eta_S1 at the two endpoints (own meshes)
    double S2 = 0.0;             ///< data/mesh-change indicator (union mesh)
    double S3_0 = 0.0, S3_1 = 0.0; ///< jump indicators at the endpoints
    double S4 = 0.0;             ///< jump of the discrete time derivative
    double int_T1_sq = 0.0;      ///< int_slab eta_T1^2 dt
    double int_T2 = 0.0;         ///< int_slab eta_T2 dt
    double int_T2_sq = 0.0;      ///< int_slab eta_T2^2 dt
    double hat_T_sq = 0.0;       ///< int eta_T1^2 + min{alpha_T, T} int eta_T2^2
};

SlabEstimates slab_estimators(const TimeSlab& slab, const ProblemData& pd);

/// alpha_T = min{eps^{-1/2}, beta^{-1/2}} (beta = 0 gives eps^{-1/2}).
double alpha_T(const ProblemData& pd);

/// Accumulates the slab quantities into the total space and time estimators
///   eta_S^2 = ||e(0)||^2 + (1/3) sum tau (eta_S1,j^2 + eta_S1,j+1^2)
///           + sum tau eta_S2^2 + max_j eta_S3,j^2
///           + min{(sum tau eta_S4)^2, alpha_T^2 sum tau eta_S4^2}
///   eta_T^2 = sum int eta_T1^2 + min{(sum int eta_T2)^2, alpha_T^2 sum int eta_T2^2}.
struct RunTotals {
    double e0_sq = 0.0; ///< ||e(0)||^2, set by the caller
    double sum_S1 = 0.0;
    double sum_S2_sq = 0.0;
    double max_S3_sq = 0.0;
    double sum_S4 = 0.0, sum_S4_sq = 0.0;
    double sum_T1_sq = 0.0;
    double sum_T2 = 0.0, sum_T2_sq = 0.0;

    void add(const SlabEstimates& s, double tau);
    double eta_S_sq(double alpha) const;
    double eta_T_sq(double alpha) const;
    double total(double alpha) const { return std::sqrt(eta_S_sq(alpha) + eta_T_sq(alpha)); }
};

} // namespace dgb
