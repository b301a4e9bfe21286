#pragma once

#include <functional>
#include <vector>

namespace dgb {

/// Polynomial right-hand side f(u) = sum_j c[j] u^j with nonnegative
/// coefficients and positive leading coefficient, so solutions of u' = f(u)
/// with u(0) > 0 blow up in finite time.
struct PolynomialRHS {
    std::vector<double> c; ///< c[j] multiplies u^j

    int degree() const { return static_cast<int>(c.size()) - 1; }
    double value(double u) const;
    /// order-th derivative w.r.t. u.
    double deriv(double u, int order) const;
    /// f(u) = u^p.
    static PolynomialRHS power(int p);
};

enum class OdeScheme { ExplicitEuler, ImplicitEuler, ImprovedEuler };

/// One step of u' = f(u):  (u1 - u0)/tau = f_h(u0, u1).  The implicit solve
/// uses Newton from u0 (tolerance 1e-12, at most 50 iterations); `ok` is
/// false when it fails (e.g. past the fold point), signalling the caller to
/// halve the step.
struct OdeStep {
    double u1 = 0.0;
    double fh = 0.0; ///< the scheme value f_h = (u1 - u0)/tau
    bool ok = false;
};
OdeStep ode_step(const PolynomialRHS& f, OdeScheme scheme, double u0, double tau);

/// Integral of |g| over [a, b] where g is smooth: sign changes are located
/// by scan + bisection (to 1e-12 relative) and each panel is integrated
/// with a 10-point Gauss rule.
double integral_abs(const std::function<double(double)>& g, double a, double b);

/// int_0^tau |f(u_h(t)) - f_h| dt with u_h the linear interpolant u0 -> u1.
double residual_integral(const PolynomialRHS& f, double u0, double u1, double tau, double fh);

/// |int_0^tau (f(u_h(t)) - f_h) dt|.  Coincides with residual_integral for
/// the explicit and implicit schemes (their residual never changes sign on
/// a step) and captures the cancellation of the improved scheme, whose
/// residual has zero mean to leading order.  The adaptive drivers use this
/// as the step-acceptance measure.
double residual_integral_signed(const PolynomialRHS& f, double u0, double u1, double tau,
                                double fh);

/// G = exp(int_0^tau |f'(u_h)| dt).
double growth_factor(const PolynomialRHS& f, double u0, double u1, double tau);

/// Coefficients C_j = (G phi)^{j-1} int |f^{(j)}(u_h)/j!| dt for j = 2..p.
std::vector<double> delta_coefficients(const PolynomialRHS& f, double u0, double u1, double tau,
                                       double G_phi);

/// Smallest root delta > 1 of sum_j C_j delta^{j-1} - log(delta) = 0 (the
/// function is convex: Newton to the stationary point, then bisection).
/// All C_j = 0 yields delta = 1; a positive minimum means no root exists.
struct DeltaRoot {
    bool exists = false;
    double delta = 1.0;
};
DeltaRoot delta_solve(const std::vector<double>& C);

/// One accepted step of the adaptive integrators, for logging.
struct OdeStepRecord {
    double t = 0.0;   ///< time at the end of the step
    double u = 0.0;   ///< solution value
    double tau = 0.0; ///< accepted step length
    double psi = 0.0; ///< error estimate delta*G*phi at the end of the step
};

/// Result of an adaptive run: N accepted steps up to the estimated blow-up
/// time T (the step whose delta-equation had no root is not counted).
struct BlowupOdeRun {
    int n_steps = 0;
    double T = 0.0;
    std::vector<OdeStepRecord> steps;
};

/// Residual-thresholded adaptivity: each step halves tau until the residual
/// integral is below tol; terminates when the delta equation has no root.
BlowupOdeRun algorithm_4_1(const PolynomialRHS& f, OdeScheme scheme, double u0, double tau0,
                           double tol, int max_steps = 2000000);

/// As algorithm_4_1, but the tolerance is multiplied by the growth factor
/// G_{k+1} after every accepted step, equilibrating the accumulated error.
BlowupOdeRun algorithm_4_2(const PolynomialRHS& f, OdeScheme scheme, double u0, double tau0,
                           double tol, int max_steps = 2000000);

/// Least-squares slope r of log(lambda) = -r log(N) + c for a tolerance
/// sweep, with lambda = |T_star - T|.
double lambda_rate(const std::vector<double>& N, const std::vector<double>& lambda);

} // namespace dgb
