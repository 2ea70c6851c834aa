#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace doutage {

// Euler-Mascheroni constant, full double precision.
inline constexpr double kEulerGamma = 0.57721566490153286061;

/// Thrown when an iterative routine fails to converge (root bracketing,
/// quadrature refinement, unattainable targets).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Convergence control shared by the root finder and the quadrature.
/// max_iter bounds bracket expansions / bisection steps, and doubles as the
/// maximum refinement depth for the adaptive quadrature.
struct Tolerance {
    double rel = 1e-12;
    double abs = 0.0;
    int max_iter = 200;

    void validate() const;
};

/// Exponential integral E1(x) = integral_x^inf exp(-a)/a da for x > 0.
/// Convergent series below 1, continued fraction at and above 1; relative
/// error is at the few-ulp level on both sides of the switchover.
/// Throws std::domain_error for x <= 0 or non-finite x.
double exp_integral_e1(double x);

/// E1 evaluated at x = exp(ln_x). Unlike exp_integral_e1 this stays exact
/// for arguments far below the smallest positive double (ln_x ~ -1e6), where
/// E1(x) ~ -ln_x - EulerGamma. Needed because the threshold equations push
/// E1 arguments to exp(-P) for large power limits.
double exp_integral_e1_log(double ln_x);

/// Inverse of E1: returns ln(x) such that E1(x) == target, target > 0.
/// Result is exact to ~1e-14 relative in x. Log-domain output so callers can
/// form ratios like q = T/x without overflow.
double e1_inverse_log(double target);

/// Finds x > 0 with f(x) == target for f continuous and strictly monotone on
/// (0, inf). Brackets by repeated doubling/halving from bracket_seed, then
/// bisects on the geometric midpoint. Deterministic for fixed inputs.
/// Throws NumericError if the bracket cannot be expanded within
/// tol.max_iter doublings or if f values at the bracket endpoints are
/// ordered against the declared direction.
double find_root_monotone(const std::function<double(double)>& f,
                          double bracket_seed,
                          bool increasing,
                          double target,
                          const Tolerance& tol);

/// Integral of g over [lower, inf) for integrable g decaying to zero.
/// Substitutes u = exp(-(a - lower)) so the tail becomes the finite interval
/// (0, 1], then applies interval-halving adaptive Simpson. Relative error is
/// bounded by tol.rel for nonnegative integrands. Throws NumericError when
/// the refinement depth (tol.max_iter, capped at 48) is exhausted.
double integrate_tail(const std::function<double(double)>& g,
                      double lower,
                      const Tolerance& tol);

// Log-domain probability helpers. Outage probabilities reach exp(-2000) in
// the sweeps, far below double range, so the schemes carry ln(p) throughout.

/// ln(1 - exp(-x)) for x >= 0; returns -inf at x == 0.
double ln_one_minus_exp_neg(double x);

/// ln(1 - exp(-x)) with x supplied as ln(x); exact for x below double range
/// (result ~ ln_x).
double ln_one_minus_exp_neg_log(double ln_x);

/// ln(exp(a) + exp(b)) without overflow; handles -inf operands.
double log_sum_exp(double a, double b);

} // namespace doutage
