#pragma once

#include "dgb/mesh.hpp"

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace dgb {

/// Discontinuous tensor-product polynomial space of degree `p` per direction
/// on each cell, with an L2(K)-orthonormal (scaled Legendre) basis, so the
/// mass matrix is the identity and the L2 norm is the Euclidean norm of the
/// coefficient vector.
class DGSpace {
public:
    DGSpace(std::shared_ptr<const Mesh> mesh, int degree);

    const Mesh& mesh() const { return *mesh_; }
    const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
    int degree() const { return p_; }
    /// Number of basis functions per cell, (p+1)^2.
    int block() const { return (p_ + 1) * (p_ + 1); }
    int n_dofs() const { return mesh_->n_cells() * block(); }
    int dof_start(int cell) const { return cell * block(); }

private:
    std::shared_ptr<const Mesh> mesh_;
    int p_;
};

/// A function in a DGSpace, stored as its coefficient vector.
struct DGFunction {
    std::shared_ptr<const DGSpace> space;
    Eigen::VectorXd coef;

    DGFunction() = default;
    explicit DGFunction(std::shared_ptr<const DGSpace> s)
        : space(std::move(s)), coef(Eigen::VectorXd::Zero(space->n_dofs())) {}

    double eval_cell(int cell, Pt x) const;
    Pt grad_cell(int cell, Pt x) const;
    double laplacian_cell(int cell, Pt x) const;
    /// Evaluate at an arbitrary point (cell located first); 0 outside.
    double eval(Pt x) const;
};

DGFunction operator+(const DGFunction& a, const DGFunction& b);
DGFunction operator-(const DGFunction& a, const DGFunction& b);
DGFunction operator*(double s, const DGFunction& a);

using ScalarField = std::function<double(Pt)>;
using VectorField = std::function<Pt(Pt)>;

/// L2 projection of `f` onto the space, cell by cell, with an n-point
/// Gauss rule per direction.
DGFunction l2_project(std::shared_ptr<const DGSpace> space, const ScalarField& f, int nq);

/// Exact L2 projection of `u` onto a space over another mesh with the same
/// root grid (integration is split over the mesh overlay, so it is exact).
DGFunction transfer(const DGFunction& u, std::shared_ptr<const DGSpace> dst);

/// Quadrature points along an edge with weights that sum to the edge length.
struct EdgePoint {
    Pt x;
    double w;
};
std::vector<EdgePoint> edge_quadrature(const Edge& e, int n);

/// Traces of a function on an edge: values and gradients from both sides at
/// the edge quadrature points.  For boundary edges the second-side entries
/// are zero and `two_sided` is false.
struct EdgeTrace {
    std::vector<EdgePoint> q;
    std::vector<double> v0, v1;
    std::vector<Pt> g0, g1;
    bool two_sided = false;
};
EdgeTrace trace_on_edge(const DGFunction& u, const Edge& e, int n);

/// Splitting u = u_c + u_d with u_c continuous (and zero on the flagged
/// Dirichlet part of the boundary): equal-weight nodal averaging at
/// conforming nodes, hanging nodes slaved to the coarse-side trace.
/// `dirichlet` decides whether a boundary point is constrained; pass
/// nullptr to constrain the whole boundary.
std::pair<DGFunction, DGFunction>
conforming_decompose(const DGFunction& u, const std::function<bool(Pt)>& dirichlet = nullptr);

/// L2(Omega) norm (exact; the basis is orthonormal).
double l2_norm(const DGFunction& u);
/// L2(K) norm of the restriction to one cell (exact).
double l2_norm_cell(const DGFunction& u, int cell);

/// dG energy norm:
///   ||| u |||^2 = sum_K (eps ||grad u||^2 + beta ||u||^2)
///              + sum_E (gamma*eps/h_E + beta*h_E) ||[u]||^2,
/// with gamma = 2 p^2 and the one-sided jump convention on the boundary.
/// `edge_active` can deselect edges (e.g. restrict penalties); nullptr = all.
double energy_norm(const DGFunction& u, double eps, double beta,
                   const std::function<bool(const Edge&)>& edge_active = nullptr);

/// Max of |u| sampled at the tensor Gauss points (n per direction) and the
/// four corners of each cell.
double linf_sampled(const DGFunction& u, int n);
double linf_sampled_cell(const DGFunction& u, int cell, int n);

/// Errors against a smooth exact solution, by quadrature (n points/dir).
double l2_error(const DGFunction& u, const ScalarField& exact, int n);
/// Energy norm of u - exact (jump terms use the trace of `exact`, which is
/// assumed continuous; on the boundary the jump is (u - exact) n).
double energy_error(const DGFunction& u, const ScalarField& exact, const VectorField& exact_grad,
                    double eps, double beta, int n);

/// Legacy ASCII VTK output sampling the function at the cell corners
/// (points duplicated per cell, so jumps stay visible).
void write_vtk_function(const DGFunction& u, const std::string& path,
                        const std::string& field_name = "u");

} // namespace dgb
