#pragma once

#include "dgb/dgspace.hpp"
#include "dgb/problem.hpp"

#include <Eigen/Sparse>
#include <memory>

namespace dgb {

/// Assemble the dG operator B + K_h at time `t`:
///   B(u,v)  = sum_K int_K (eps grad u - a u).grad v + (b - div a) u v
///           + sum_E (gamma eps / h_E) int_E [u].[v]
///           + sum_K int_{dK_out} u [a v]            (pointwise upwinding)
///   K_h(u,v)= -sum_E int_E {eps grad u}.[v] + {eps grad v}.[u]
/// with gamma = 2 p^2 and one-sided jumps/averages on the boundary.
///
/// With `iface` given, the interior penalty, K_h and the upwind term skip
/// the interface edges, Neumann edges carry no penalty, and the interface
/// carries rho [u].[v] + r {u}_w [a v]; the volume reaction is -div(a) u v.
Eigen::SparseMatrix<double> assemble_B_Kh(const DGSpace& space, const ProblemData& pd, double t,
                                          const InterfaceProblem* iface = nullptr);

/// Load vector (f(.,t), v) (equals the L2-projection coefficients since the
/// basis is orthonormal); nq quadrature points per direction.
Eigen::VectorXd assemble_load(const std::shared_ptr<const DGSpace>& space,
                              const ScalarTimeField& f, double t, int nq);

/// Solve the stationary problem B(u,v) + K_h(u,v) = (f,v) by sparse LU.
DGFunction solve_stationary(const std::shared_ptr<const DGSpace>& space, const ProblemData& pd,
                            double t = 0.0);

/// One backward Euler step from u_old (possibly on another mesh) to the
/// space `space` at time t_new with step tau:
///   (u - P u_old)/tau + (B + K_h) u = (f(t_new), v),
/// where P is the exact L2 projection between the meshes.
DGFunction backward_euler_step(const DGFunction& u_old,
                               const std::shared_ptr<const DGSpace>& space,
                               const ProblemData& pd, double t_new, double tau);

/// One IMEX step for u_t - eps Lap u + a.grad u + f(x,t;u) = 0: implicit in
/// the linear transport part, explicit (lagged) in the reaction:
///   (u - P u_old)/tau + (B + K_h) u + (f(x, t_old; u_old), v) = 0.
/// The reaction integral is evaluated exactly on the mesh overlay.
DGFunction imex_step(const DGFunction& u_old, const std::shared_ptr<const DGSpace>& space,
                     const ProblemData& pd,
                     const std::function<double(Pt, double, double)>& reaction, double t_old,
                     double tau);

/// L2 projection onto `space` of the lagged reaction x -> f(x, t, u_old(x)),
/// integrated exactly on the overlay of the two meshes.
DGFunction project_lagged_reaction(const DGFunction& u_old,
                                   const std::shared_ptr<const DGSpace>& space,
                                   const std::function<double(Pt, double, double)>& reaction,
                                   double t);

/// One IMEX step of the interface scheme:
///   (u - P u_old)/tau + B u + K_h u + (f(x, t_old; u_old), v) = l(v),
/// with l(v) = int_{Gamma_N} g(., t_new) v ds.
DGFunction interface_step(const DGFunction& u_old, const std::shared_ptr<const DGSpace>& space,
                          const ProblemData& pd, const InterfaceProblem& iface, double t_old,
                          double t_new, double tau);

} // namespace dgb
