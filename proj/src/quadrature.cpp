#include "dgb/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace dgb {

namespace {

// Compute the n-point Gauss-Legendre rule by Newton iteration on the
// Legendre polynomial P_n, starting from the Chebyshev-like initial guess.
QuadRule1D compute_gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    QuadRule1D rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2; // roots come in +/- pairs
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Evaluate P_n(x) and P_n'(x) via the three-term recurrence.
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.points[i] = -x; // ascending order
        rule.points[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.points[n / 2] = 0.0;
    return rule;
}

} // namespace

const QuadRule1D& gauss_legendre(int n) {
    static std::map<int, QuadRule1D> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

const QuadRule2D& gauss_legendre_2d(int n) {
    static std::map<int, QuadRule2D> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) {
        const QuadRule1D& r = gauss_legendre(n);
        QuadRule2D q;
        q.x.reserve(n * n);
        q.y.reserve(n * n);
        q.w.reserve(n * n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                q.x.push_back(r.points[i]);
                q.y.push_back(r.points[j]);
                q.w.push_back(r.weights[i] * r.weights[j]);
            }
        it = cache.emplace(n, std::move(q)).first;
    }
    return it->second;
}

} // namespace dgb
