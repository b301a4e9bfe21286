#include "dgb/ode_blowup.hpp"

#include "dgb/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dgb {

double PolynomialRHS::value(double u) const {
    double s = 0.0;
    for (int j = degree(); j >= 0; --j) s = s * u + c[static_cast<std::size_t>(j)];
    return s;
}

double PolynomialRHS::deriv(double u, int order) const {
    if (order == 0) return value(u);
    if (order > degree()) return 0.0;
    double s = 0.0;
    for (int j = degree(); j >= order; --j) {
        double fac = 1.0;
        for (int m = 0; m < order; ++m) fac *= static_cast<double>(j - m);
        s = s * u + fac * c[static_cast<std::size_t>(j)];
    }
    return s;
}

PolynomialRHS PolynomialRHS::power(int p) {
    PolynomialRHS f;
    f.c.assign(static_cast<std::size_t>(p) + 1, 0.0);
    f.c.back() = 1.0;
    return f;
}

OdeStep ode_step(const PolynomialRHS& f, OdeScheme scheme, double u0, double tau) {
    OdeStep r;
    switch (scheme) {
    case OdeScheme::ExplicitEuler: {
        r.fh = f.value(u0);
        r.u1 = u0 + tau * r.fh;
        r.ok = std::isfinite(r.u1);
        return r;
    }
    case OdeScheme::ImprovedEuler: {
        double f0 = f.value(u0);
        r.fh = 0.5 * (f0 + f.value(u0 + tau * f0));
        r.u1 = u0 + tau * r.fh;
        r.ok = std::isfinite(r.u1);
        return r;
    }
    case OdeScheme::ImplicitEuler: {
        double x = u0;
        bool converged = false;
        for (int it = 0; it < 50; ++it) {
            double g = x - u0 - tau * f.value(x);
            double gp = 1.0 - tau * f.deriv(x, 1);
            if (gp == 0.0 || !std::isfinite(g) || !std::isfinite(gp)) break;
            double dx = g / gp;
            x -= dx;
            if (!std::isfinite(x)) break;
            if (std::abs(dx) <= 1e-12 * std::max(1.0, std::abs(x))) {
                converged = true;
                break;
            }
        }
        if (converged && std::isfinite(x) &&
            std::abs(x - u0 - tau * f.value(x)) <= 1e-8 * std::max(1.0, std::abs(x))) {
            r.u1 = x;
            r.fh = (x - u0) / tau;
            r.ok = true;
        }
        return r;
    }
    }
    return r;
}

double integral_abs(const std::function<double(double)>& g, double a, double b) {
    if (!(b > a)) return 0.0;
    // Locate sign changes on a uniform scan, refine each by bisection.
    constexpr int n_scan = 64;
    std::vector<double> cuts;
    cuts.push_back(a);
    double h = (b - a) / n_scan;
    double xl = a, gl = g(a);
    for (int i = 1; i <= n_scan; ++i) {
        double xr = (i == n_scan) ? b : a + i * h;
        double gr = g(xr);
        if ((gl < 0.0 && gr > 0.0) || (gl > 0.0 && gr < 0.0)) {
            double lo = xl, hi = xr, flo = gl;
            while (hi - lo > 1e-12 * (b - a)) {
                double mid = 0.5 * (lo + hi);
                double fm = g(mid);
                if ((flo < 0.0) == (fm < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            cuts.push_back(0.5 * (lo + hi));
        }
        xl = xr;
        gl = gr;
    }
    cuts.push_back(b);
    const QuadRule1D& q = gauss_legendre(10);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        double lo = cuts[k], hi = cuts[k + 1];
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        double panel = 0.0;
        for (std::size_t i = 0; i < q.points.size(); ++i)
            panel += q.weights[i] * std::abs(g(mid + half * q.points[i]));
        total += half * panel;
    }
    return total;
}

double residual_integral(const PolynomialRHS& f, double u0, double u1, double tau, double fh) {
    return integral_abs(
        [&](double t) { return f.value(u0 + (u1 - u0) * (t / tau)) - fh; }, 0.0, tau);
}

double residual_integral_signed(const PolynomialRHS& f, double u0, double u1, double tau,
                                double fh) {
    const QuadRule1D& q = gauss_legendre(10);
    double s = 0.0;
    for (std::size_t i = 0; i < q.points.size(); ++i) {
        double t = 0.5 * tau * (1.0 + q.points[i]);
        s += q.weights[i] * (f.value(u0 + (u1 - u0) * (t / tau)) - fh);
    }
    return std::abs(0.5 * tau * s);
}

double growth_factor(const PolynomialRHS& f, double u0, double u1, double tau) {
    double I = integral_abs(
        [&](double t) { return f.deriv(u0 + (u1 - u0) * (t / tau), 1); }, 0.0, tau);
    return std::exp(I);
}

std::vector<double> delta_coefficients(const PolynomialRHS& f, double u0, double u1, double tau,
                                       double G_phi) {
    int p = f.degree();
    std::vector<double> C;
    double fac = 2.0; // j!
    double pw = G_phi;
    for (int j = 2; j <= p; ++j) {
        if (j > 2) {
            fac *= j;
            pw *= G_phi;
        }
        double I = integral_abs(
            [&](double t) { return f.deriv(u0 + (u1 - u0) * (t / tau), j) / fac; }, 0.0, tau);
        C.push_back(pw * I);
    }
    return C;
}

namespace {

double delta_poly(const std::vector<double>& C, double d) {
    // sum_j C_j d^{j-1}, j = 2..p  (C[0] pairs with d^1).
    double s = 0.0;
    for (std::size_t i = C.size(); i-- > 0;) s = s * d + C[i];
    return s * d;
}

double delta_poly_deriv(const std::vector<double>& C, double d) {
    double s = 0.0;
    for (std::size_t i = C.size(); i-- > 0;) s = s * d + static_cast<double>(i + 1) * C[i];
    return s;
}

} // namespace

DeltaRoot delta_solve(const std::vector<double>& C) {
    DeltaRoot r;
    double csum = 0.0;
    for (double c : C) csum += std::abs(c);
    if (csum == 0.0) {
        r.exists = true;
        r.delta = 1.0;
        return r;
    }
    auto s = [&](double d) { return delta_poly(C, d) - std::log(d); };
    auto sp = [&](double d) { return delta_poly_deriv(C, d) - 1.0 / d; };
    // s is convex on (0, inf); if it is already increasing at 1 there is no
    // root beyond 1 because s(1) = sum C_j > 0.
    if (sp(1.0) >= 0.0) return r;
    // Bracket the stationary point and polish it with safeguarded Newton.
    // s decreases on (1, stationary point), so the moment the bracketing
    // endpoint is nonpositive the smallest root lies in (1, hi] and can be
    // bisected directly (tiny coefficients put the stationary point far out,
    // e.g. near 1/C_2, while the root itself sits just above 1).
    double lo = 1.0, hi = 2.0;
    while (sp(hi) < 0.0) {
        if (s(hi) <= 0.0) {
            double a = 1.0, b = hi;
            for (int it = 0; it < 200 && b - a > 1e-13 * b; ++it) {
                double m = 0.5 * (a + b);
                if (s(m) > 0.0)
                    a = m;
                else
                    b = m;
            }
            r.exists = true;
            r.delta = b;
            return r;
        }
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) return r; // root, if any, is astronomically large
    }
    double d = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double g = sp(d);
        if (g < 0.0)
            lo = d;
        else
            hi = d;
        double spp = 0.0;
        for (std::size_t i = C.size(); i-- > 1;)
            spp = spp * d + static_cast<double>((i + 1) * i) * C[i];
        spp += 1.0 / (d * d);
        double step = g / spp;
        double dn = d - step;
        if (!(dn > lo && dn < hi)) dn = 0.5 * (lo + hi);
        if (std::abs(dn - d) <= 1e-14 * d) {
            d = dn;
            break;
        }
        d = dn;
    }
    double smin = s(d);
    double scale = std::max(1.0, delta_poly(C, d));
    if (smin > 4e-12 * scale) return r; // positive minimum: no root
    if (smin >= 0.0) {
        r.exists = true;
        r.delta = d; // tangency
        return r;
    }
    // Smallest root lies in (1, d]; s decreases monotonically there.
    double a = 1.0, b = d;
    for (int it = 0; it < 200 && b - a > 1e-13 * b; ++it) {
        double m = 0.5 * (a + b);
        if (s(m) > 0.0)
            a = m;
        else
            b = m;
    }
    r.exists = true;
    r.delta = b;
    return r;
}

namespace {

BlowupOdeRun run_adaptive(const PolynomialRHS& f, OdeScheme scheme, double u0, double tau0,
                          double tol, int max_steps, bool rescale_tol) {
    BlowupOdeRun run;
    double t = 0.0, u = u0, tau = tau0, psi = 0.0;
    for (int k = 0; k < max_steps; ++k) {
        // Halve the step until it both solves and meets the residual bound.
        OdeStep st;
        double res = 0.0;
        for (;;) {
            st = ode_step(f, scheme, u, tau);
            if (st.ok) {
                res = residual_integral_signed(f, u, st.u1, tau, st.fh);
                if (res <= tol) break;
            }
            tau *= 0.5;
            if (tau < 1e-300) return run;
        }
        double G = growth_factor(f, u, st.u1, tau);
        double phi = psi + res;
        DeltaRoot root = delta_solve(delta_coefficients(f, u, st.u1, tau, G * phi));
        if (rescale_tol) tol *= G;
        if (!root.exists) return run;
        t += tau;
        u = st.u1;
        psi = root.delta * G * phi;
        run.n_steps = k + 1;
        run.T = t;
        run.steps.push_back({t, u, tau, psi});
    }
    return run;
}

} // namespace

BlowupOdeRun algorithm_4_1(const PolynomialRHS& f, OdeScheme scheme, double u0, double tau0,
                           double tol, int max_steps) {
    return run_adaptive(f, scheme, u0, tau0, tol, max_steps, false);
}

BlowupOdeRun algorithm_4_2(const PolynomialRHS& f, OdeScheme scheme, double u0, double tau0,
                           double tol, int max_steps) {
    return run_adaptive(f, scheme, u0, tau0, tol, max_steps, true);
}

double lambda_rate(const std::vector<double>& N, const std::vector<double>& lambda) {
    std::size_t n = std::min(N.size(), lambda.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = std::log(N[i]), y = std::log(lambda[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double dn = static_cast<double>(n);
    double slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
    return -slope;
}

} // namespace dgb
