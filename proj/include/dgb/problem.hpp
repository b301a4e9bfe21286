#pragma once

#include "dgb/geometry.hpp"
#include "dgb/mesh.hpp"

#include <functional>

namespace dgb {

using ScalarTimeField = std::function<double(Pt, double)>;
using VectorTimeField = std::function<Pt(Pt, double)>;

/// Data of a linear convection-diffusion(-reaction) problem
///   u_t - eps*Laplace(u) + a . grad(u) + b u = f   in Omega x (0,T],
///   u = 0 on the boundary, u(0) = u0,
/// (drop the u_t term for the stationary problem).
struct ProblemData {
    Rect domain{0, 0, 1, 1};
    double eps = 1.0;
    VectorTimeField a;     ///< convection field (nullptr = 0)
    ScalarTimeField div_a; ///< its divergence (nullptr = 0)
    ScalarTimeField b;     ///< reaction coefficient (nullptr = 0)
    ScalarTimeField f;     ///< source (nullptr = 0)
    std::function<double(Pt)> u0; ///< initial datum (nullptr = 0)
    double T = 1.0;
    /// Coercivity parameter: b - div(a)/2 >= beta >= 0.
    double beta = 0.0;

    /// Optional exact solution for convergence studies.
    ScalarTimeField exact;
    VectorTimeField exact_grad;

    Pt conv(Pt x, double t) const { return a ? a(x, t) : Pt{0.0, 0.0}; }
    double diva(Pt x, double t) const { return div_a ? div_a(x, t) : 0.0; }
    double react(Pt x, double t) const { return b ? b(x, t) : 0.0; }
    double source(Pt x, double t) const { return f ? f(x, t) : 0.0; }
};

/// Classification of mesh edges for assembly and estimation.
enum class EdgeKind { Interior, Dirichlet, Neumann, Interface };

/// Extra data for the two-domain interface problem: the domain is split by
/// the vertical line x = x_interface into Omega_1 (left) and Omega_2
/// (right); the solution may jump across the interface, which carries the
/// penalisation rho*[u][v] + r*{u}_w*[a v] instead of the interior penalty.
struct InterfaceProblem {
    double x_interface = 0.0;
    double rho = 0.1;
    double r = 0.5;
    double w1 = 1.0, w2 = 0.0; ///< weights of the weighted average {.}_w
    double c_star = 1.0;       ///< trace-inequality constant used in bounds

    /// Classify a boundary point (Dirichlet vs Neumann); nullptr = Dirichlet.
    std::function<bool(Pt)> neumann;
    /// Neumann datum g (nullptr = 0): eps*grad(u).n = g on the outflow part,
    /// (eps*grad(u) - a u).n = g on the inflow part.
    ScalarTimeField g;

    /// Explicitly treated reaction f(x, t, u) and its growth parameters:
    /// |f(v)-f(w)| <= L (1 + |v| + |w|)^mu |v - w|.
    std::function<double(Pt, double, double)> reaction;
    double L = 0.0;
    int mu = 0;
};

/// Per-edge classification for a mesh (boundary edges are Dirichlet unless
/// the interface problem marks them Neumann; interior edges on the line
/// x = x_interface become Interface edges when `iface` is given).
std::vector<EdgeKind> classify_edges(const Mesh& mesh, const InterfaceProblem* iface);

/// True for cells left of the interface (inside Omega_1).
bool in_omega1(const Mesh& mesh, int cell, const InterfaceProblem& iface);

} // namespace dgb
