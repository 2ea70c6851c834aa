#include "doutage/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace doutage {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Series E1(x) = -EulerGamma - ln(x) + sum_{k>=1} (-1)^{k+1} x^k / (k k!),
// with the ln term supplied by the caller so it also works for x below
// double range (where the sum vanishes).
double e1_series_sum(double x) {
    double sum = 0.0;
    double term = 1.0; // (-x)^k / k!
    for (int k = 1; k <= 64; ++k) {
        term *= -x / k;
        const double add = -term / k;
        sum += add;
        if (std::abs(add) <= 1e-18 * (std::abs(sum) + 1e-30)) break;
    }
    return sum;
}

// Modified Lentz continued fraction, valid for x >= 1.
double e1_contfrac(double x) {
    constexpr double eps = 1e-15;
    constexpr double tiny = 1e-290;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 400; ++i) {
        const double a = -static_cast<double>(i) * static_cast<double>(i);
        b += 2.0;
        d = a * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h * std::exp(-x);
    }
    throw NumericError("exp_integral_e1: continued fraction failed to converge");
}

} // namespace

void Tolerance::validate() const {
    if (!(rel > 0.0) || !std::isfinite(rel))
        throw std::invalid_argument("Tolerance: rel must be positive and finite");
    if (!(abs >= 0.0) || !std::isfinite(abs))
        throw std::invalid_argument("Tolerance: abs must be nonnegative and finite");
    if (max_iter < 1) throw std::invalid_argument("Tolerance: max_iter must be >= 1");
}

double exp_integral_e1(double x) {
    if (!std::isfinite(x) || x <= 0.0)
        throw std::domain_error("exp_integral_e1: argument must be positive and finite");
    if (x < 1.0) return -kEulerGamma - std::log(x) + e1_series_sum(x);
    return e1_contfrac(x);
}

double exp_integral_e1_log(double ln_x) {
    if (std::isnan(ln_x)) throw std::domain_error("exp_integral_e1_log: NaN argument");
    if (ln_x >= 0.0) {
        const double x = std::exp(ln_x);
        if (!std::isfinite(x)) return 0.0; // E1 underflows long before this
        return e1_contfrac(x);
    }
    const double x = std::exp(ln_x); // underflows harmlessly to 0 for ln_x < -745
    return -kEulerGamma - ln_x + e1_series_sum(x);
}

double e1_inverse_log(double target) {
    if (!std::isfinite(target) || target <= 0.0)
        throw std::domain_error("e1_inverse_log: target must be positive and finite");
    // E1(e^u) >= -EulerGamma - u for u < 0, so this lower end always overshoots.
    double lo = -(target + kEulerGamma + 4.0);
    double hi = 1.0;
    while (exp_integral_e1_log(hi) > target) {
        hi += 8.0;
        if (hi > 760.0) break; // E1 has underflowed to 0 there
    }
    for (int i = 0; i < 300; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= 1e-14 * std::max(1.0, std::abs(mid))) break;
        if (exp_integral_e1_log(mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double find_root_monotone(const std::function<double(double)>& f,
                          double bracket_seed,
                          bool increasing,
                          double target,
                          const Tolerance& tol) {
    tol.validate();
    if (!(bracket_seed > 0.0) || !std::isfinite(bracket_seed))
        throw std::domain_error("find_root_monotone: bracket_seed must be positive and finite");
    if (!std::isfinite(target))
        throw std::domain_error("find_root_monotone: target must be finite");

    const double sign = increasing ? 1.0 : -1.0;
    // g(x) = sign * (f(x) - target) is increasing in x; root where g == 0.
    auto g = [&](double x) { return sign * (f(x) - target); };

    // Tolerate sub-ulp wobble on nearly flat stretches before declaring f
    // non-monotone.
    auto out_of_order = [](double g_low, double g_high) {
        return g_high < g_low - 1e-12 * (std::abs(g_low) + std::abs(g_high));
    };

    double lo = bracket_seed, hi = bracket_seed;
    double g_lo = g(lo), g_hi = g_lo;
    if (g_lo == 0.0) return lo;
    if (g_lo < 0.0) {
        for (int i = 0; i < tol.max_iter && g_hi < 0.0; ++i) {
            lo = hi;
            g_lo = g_hi;
            hi *= 2.0;
            g_hi = g(hi);
            if (out_of_order(g_lo, g_hi))
                throw NumericError("find_root_monotone: f values out of order at bracket endpoints");
        }
        if (g_hi < 0.0)
            throw NumericError("find_root_monotone: bracket expansion failed (upper)");
    } else {
        for (int i = 0; i < tol.max_iter && g_lo > 0.0; ++i) {
            hi = lo;
            g_hi = g_lo;
            lo *= 0.5;
            g_lo = g(lo);
            if (out_of_order(g_lo, g_hi))
                throw NumericError("find_root_monotone: f values out of order at bracket endpoints");
        }
        if (g_lo > 0.0)
            throw NumericError("find_root_monotone: bracket expansion failed (lower)");
    }

    // Geometric bisection; the unknowns here span many orders of magnitude.
    double mid = std::sqrt(lo * hi);
    for (int i = 0; i < tol.max_iter; ++i) {
        mid = std::sqrt(lo * hi);
        if (hi - lo <= tol.abs + tol.rel * std::abs(mid)) return mid;
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if (tol.abs > 0.0 && std::abs(gm) <= tol.abs) return mid;
        if (gm < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    throw NumericError("find_root_monotone: bisection exhausted max_iter without convergence");
}

namespace {

struct SimpsonState {
    const std::function<double(double)>* h;
    double eps_floor;   // per-panel acceptance threshold of last resort
    int max_depth;
    long evals_left;
};

double simpson_recurse(SimpsonState& st, double a, double b, double fa, double fm, double fb,
                       double whole, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    if ((st.evals_left -= 2) < 0)
        throw NumericError("integrate_tail: evaluation budget exhausted");
    const double flm = (*st.h)(lm), frm = (*st.h)(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    const double accept = std::max(eps, st.eps_floor);
    if (std::abs(delta) <= 15.0 * accept) return left + right + delta / 15.0;
    if (depth >= st.max_depth)
        throw NumericError("integrate_tail: max refinement depth reached without convergence");
    const double eps_half = std::max(0.5 * eps, st.eps_floor);
    return simpson_recurse(st, a, m, fa, flm, fm, left, eps_half, depth + 1) +
           simpson_recurse(st, m, b, fm, frm, fb, right, eps_half, depth + 1);
}

double adaptive_simpson(const std::function<double(double)>& h, double a, double b,
                        double eps_total, double eps_floor, int max_depth) {
    SimpsonState st{&h, eps_floor, max_depth, 4'000'000};
    const double fa = h(a), fb = h(b), fm = h(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_recurse(st, a, b, fa, fm, fb, whole, eps_total, 0);
}

} // namespace

double integrate_tail(const std::function<double(double)>& g, double lower, const Tolerance& tol) {
    tol.validate();
    if (!(lower >= 0.0) || !std::isfinite(lower))
        throw std::domain_error("integrate_tail: lower must be nonnegative and finite");

    // u = exp(-(a - lower)): the tail [lower, inf) maps onto (0, 1]. Truncate
    // at a - lower = 700; for the exponential-type integrands this serves,
    // the remainder is below exp(-700) relative to the head.
    auto h = [&](double u) { return g(lower - std::log(u)) / u; };
    const double u_min = std::exp(-700.0);
    const int depth = std::clamp(tol.max_iter, 4, 48);

    // First pass sizes the error floor, second pass delivers it. The floor
    // keeps the halving rule from demanding unattainable accuracy in the
    // slivers next to u = 0, where the integrand has unbounded derivatives
    // but negligible mass.
    double estimate = 1.0;
    double result = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        const double scale = tol.rel * std::abs(estimate) + tol.abs;
        result = adaptive_simpson(h, u_min, 1.0, scale, scale / 128.0, depth);
        estimate = result;
    }
    return result;
}

double ln_one_minus_exp_neg(double x) {
    if (!(x >= 0.0)) throw std::domain_error("ln_one_minus_exp_neg: x must be >= 0");
    if (x == 0.0) return -kInf;
    if (x > 1e-3) return std::log(-std::expm1(-x));
    // 1 - e^-x = x (1 - x/2 + x^2/6 - x^3/24 + ...)
    return std::log(x) + std::log1p(x * (-0.5 + x * (1.0 / 6.0 - x / 24.0)));
}

double ln_one_minus_exp_neg_log(double ln_x) {
    if (std::isnan(ln_x)) throw std::domain_error("ln_one_minus_exp_neg_log: NaN argument");
    const double x = std::exp(ln_x);
    if (x > 1e-3) return std::log(-std::expm1(-x));
    return ln_x + std::log1p(x * (-0.5 + x * (1.0 / 6.0 - x / 24.0)));
}

double log_sum_exp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

} // namespace doutage
