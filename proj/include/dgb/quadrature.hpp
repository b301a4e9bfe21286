#pragma once

#include <vector>

namespace dgb {

/// One-dimensional quadrature rule on the reference interval [-1, 1].
struct QuadRule1D {
    std::vector<double> points;
    std::vector<double> weights;
    int size() const { return static_cast<int>(points.size()); }
};

/// Gauss-Legendre rule with n points on [-1,1]; exact for polynomials of
/// degree 2n-1.  Rules are computed once and cached per n.
const QuadRule1D& gauss_legendre(int n);

/// Tensor-product rule on the reference square [-1,1]^2 with n points per
/// direction (n^2 points total).
struct QuadRule2D {
    std::vector<double> x, y, w;
    int size() const { return static_cast<int>(w.size()); }
};

const QuadRule2D& gauss_legendre_2d(int n);

} // namespace dgb
