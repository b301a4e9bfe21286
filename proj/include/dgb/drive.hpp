#pragma once

#include "dgb/est_blowup.hpp"
#include "dgb/est_interface.hpp"

#include <memory>
#include <string>
#include <vector>

namespace dgb {

/// Controls of the adaptive space-time drivers.
struct AdaptConfig {
    double ttol = 1e-3;       ///< temporal acceptance threshold (squared quantity)
    double ttol_minus = -1.0; ///< step-doubling threshold (blow-up driver); <0: 0.01*ttol
    double stol = 1e-2;       ///< per-cell refinement threshold (squared)
    double stol_minus = -1.0; ///< per-cell coarsening threshold; <0: driver default
    int n_steps = 10;         ///< initial number of uniform steps over (0, T)
    double tau1 = -1.0;       ///< initial step of the blow-up driver; <0: T / n_steps
    int degree = 2;           ///< polynomial degree per direction
    int n0 = 4;               ///< n0 x n0 initial grid
    bool adapt_space = true;  ///< disable for fixed-mesh studies
    bool adapt_time = true;   ///< disable for fixed-step studies
    bool blowup_l2h1 = false; ///< use the L2(H1)-type conditional bound
    int max_dofs = 200000;    ///< dof budget (per space)
    int max_slabs = 100000;   ///< slab budget
    int max_gate_iters = 50;  ///< breaker for refine/coarsen oscillation per slab
    std::string out_dir;      ///< empty: no file output
    int vtk_stride = 0;       ///< write mesh_k.vtk / sol_k.vtk every k-th slab (0: never)
};

/// Why a run stopped: reached the final time, the conditional bound ceased
/// to exist (blow-up runs), or a budget was exhausted.
enum class StopReason { ReachedEnd, BoundLost, Budget };

const char* to_string(StopReason r);

/// One accepted slab of an adaptive run.
struct SlabRow {
    int k = 0; ///< slab index, 1-based
    double t0 = 0.0, t1 = 0.0, tau = 0.0;
    int dofs = 0;            ///< dofs of the endpoint space at t1
    int union_dofs = 0;      ///< dofs lambda_k of the slab's union space
    double eta_S1_sq = 0.0;  ///< squared endpoint spatial indicator
    double max_cell_sq = 0.0;///< largest per-cell contribution at acceptance
    double hat_T_sq = 0.0;   ///< temporal acceptance quantity of the slab
    double extra = 0.0;      ///< blow-up: ||u_h(t1)||_inf; interface: int sigma
    int refined = 0, coarsened = 0, halved = 0;
};

/// Full record of one adaptive run.  Identical configurations produce
/// bit-identical logs (all loops iterate in deterministic order).
struct RunLog {
    std::vector<SlabRow> rows;
    StopReason reason = StopReason::ReachedEnd;
    double final_time = 0.0;
    int n_slabs = 0;
    int max_dofs_seen = 0;
    /// Time-weighted average of the union-space dof counts,
    /// (1/t_final) sum_k tau_k lambda_k.
    double weighted_dofs = 0.0;

    // Estimator totals (fixed-horizon drivers).
    double eta_S = 0.0, eta_T = 0.0, eta_total = 0.0;

    // Error analytics, filled when an exact solution is available:
    // ||e||_*^2 = max_t ||e(t)||^2 + int |||e(t)|||^2 dt by composite
    // quadrature (3 points per slab in time, degree+3 per direction in
    // space).
    double error_linf_l2 = 0.0;
    double error_l2_energy_sq = 0.0;
    double error_star = 0.0;
    double effectivity = 0.0;       ///< eta_total / error_star (0 without exact)
    bool error_below_floor = false; ///< error too small to measure reliably

    // Blow-up driver outputs.
    double final_linf = 0.0; ///< ||u_h(t_final)||_inf
    double final_psi = 0.0;  ///< accumulated conditional estimator

    // Interface driver whole-run bound.
    InterfaceRunResult interface_bound;

    // Final state, for inspection and output.
    DGFunction final_u;
};

/// Adaptive backward Euler driver for the linear problem: per slab, halve
/// the step while the temporal quantity exceeds ttol, then refine cells
/// above stol and coarsen cells below stol_minus (default 0.001 stol) until
/// both gates hold; steps not split keep their original length T/n_steps.
RunLog adapt_linear(const ProblemData& pd, const AdaptConfig& cfg);

/// Adaptive IMEX driver for the semilinear blow-up problem: one halving /
/// doubling test per step against ttol / ttol_minus (default 0.01 ttol),
/// spatial marking against stol / stol_minus (default 1e-6 stol), all four
/// thresholds rescaled by the slab growth factor G; the run stops when the
/// conditional bound ceases to exist or a budget is reached.
RunLog adapt_blowup(const SemilinearProblem& prob, const AdaptConfig& cfg);

/// Adaptive IMEX driver for the interface problem; the per-slab gates are
/// those of `adapt_linear` with the interface estimator parts, and the
/// whole-run conditional bound is reported in `interface_bound`.
RunLog adapt_interface(const ProblemData& pd, const InterfaceProblem& iface,
                       const AdaptConfig& cfg);

/// A named example problem.  `kind` selects the driver; `semi`/`iface` are
/// meaningful for their kinds only (semi.pd duplicates pd).
struct Experiment {
    enum class Kind { Linear, Blowup, Interface };
    std::string id;
    Kind kind = Kind::Linear;
    ProblemData pd;
    SemilinearProblem semi;
    InterfaceProblem iface;
};

/// Built-in example problems:
///   linear1 .. linear4   convection-diffusion benchmarks on (0,T)
///   blowup1 .. blowup3   semilinear blow-up benchmarks
///   interface1           two-domain membrane benchmark
/// eps is the diffusion parameter (ignored where the example fixes it).
Experiment make_experiment(const std::string& id, double eps);
std::vector<std::string> experiment_ids();

/// Least-squares slope of log(y) against log(x); entries with
/// non-positive x or y are skipped.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace dgb
