#pragma once

#include <cmath>
#include <vector>

namespace dgb {

/// Values of the L2(-1,1)-orthonormal Legendre polynomials
/// l_k(x) = sqrt((2k+1)/2) P_k(x), k = 0..p, at a point x.
inline void legendre_values(int p, double x, double* vals) {
    double p0 = 1.0, p1 = x;
    vals[0] = std::sqrt(0.5);
    if (p >= 1) vals[1] = std::sqrt(1.5) * x;
    for (int k = 2; k <= p; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        vals[k] = std::sqrt(k + 0.5) * p2;
        p0 = p1;
        p1 = p2;
    }
}

/// Values and first derivatives of the orthonormal Legendre polynomials.
inline void legendre_values_derivs(int p, double x, double* vals, double* ders) {
    // Unnormalised recurrences for P_k and P_k'.
    std::vector<double> P(p + 1), D(p + 1);
    P[0] = 1.0;
    D[0] = 0.0;
    if (p >= 1) {
        P[1] = x;
        D[1] = 1.0;
    }
    for (int k = 2; k <= p; ++k) {
        P[k] = ((2 * k - 1) * x * P[k - 1] - (k - 1) * P[k - 2]) / k;
        D[k] = D[k - 2] + (2 * k - 1) * P[k - 1];
    }
    for (int k = 0; k <= p; ++k) {
        double s = std::sqrt(k + 0.5);
        vals[k] = s * P[k];
        ders[k] = s * D[k];
    }
}

/// Second derivatives as well (needed for the strong-form Laplacian).
inline void legendre_values_derivs2(int p, double x, double* vals, double* ders,
                                    double* ders2) {
    std::vector<double> P(p + 1), D(p + 1), D2(p + 1);
    P[0] = 1.0;
    D[0] = 0.0;
    D2[0] = 0.0;
    if (p >= 1) {
        P[1] = x;
        D[1] = 1.0;
        D2[1] = 0.0;
    }
    for (int k = 2; k <= p; ++k) {
        P[k] = ((2 * k - 1) * x * P[k - 1] - (k - 1) * P[k - 2]) / k;
        D[k] = D[k - 2] + (2 * k - 1) * P[k - 1];
        D2[k] = D2[k - 2] + (2 * k - 1) * D[k - 1];
    }
    for (int k = 0; k <= p; ++k) {
        double s = std::sqrt(k + 0.5);
        vals[k] = s * P[k];
        ders[k] = s * D[k];
        ders2[k] = s * D2[k];
    }
}

} // namespace dgb
