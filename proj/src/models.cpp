#include "doutage/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace doutage {

namespace {
constexpr double kLn2 = 0.6931471805599453094;
}

SourceModel::SourceModel(std::vector<double> variances, std::vector<double> pmf)
    : variances_(std::move(variances)), pmf_(std::move(pmf)) {
    if (variances_.empty() || variances_.size() != pmf_.size())
        throw std::invalid_argument("SourceModel: variances and pmf must be nonempty and equal length");
    for (double v : variances_)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("SourceModel: every state variance must be positive");
    double sum = 0.0;
    for (double p : pmf_) {
        if (!(p >= 0.0) || !std::isfinite(p))
            throw std::invalid_argument("SourceModel: probabilities must be nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("SourceModel: pmf must sum to 1 within 1e-12");
    for (double& p : pmf_) p /= sum;

    cumulative_.resize(pmf_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pmf_.size(); ++i) {
        acc += pmf_[i];
        cumulative_[i] = acc;
    }
    cumulative_.back() = 1.0;
    max_variance_ = *std::max_element(variances_.begin(), variances_.end());
}

double SourceModel::pr_variance_above(double threshold) const {
    double p = 0.0;
    for (std::size_t i = 0; i < variances_.size(); ++i)
        if (variances_[i] > threshold) p += pmf_[i];
    return p;
}

int SourceModel::sample(double u) const {
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    return static_cast<int>(std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1));
}

SourceModel build_experimental_source(std::string_view label) {
    if (label == "S") return SourceModel({9.0}, {1.0});

    constexpr int n = 25;
    std::vector<double> variances(n), pmf(n);
    for (int s = 0; s < n; ++s) {
        const double sigma = 1.0 + s / 6.0;
        variances[static_cast<std::size_t>(s)] = sigma * sigma;
    }
    if (label == "U") {
        std::fill(pmf.begin(), pmf.end(), 1.0 / n);
    } else {
        double kernel_var = 0.0;
        if (label == "G1")
            kernel_var = 0.05;
        else if (label == "G2")
            kernel_var = 0.48;
        else if (label == "G3")
            kernel_var = 1.07;
        else
            throw std::invalid_argument("build_experimental_source: unknown label '" +
                                        std::string(label) + "'");
        double sum = 0.0;
        for (int s = 0; s < n; ++s) {
            const double sigma = 1.0 + s / 6.0;
            const double w = std::exp(-(sigma - 3.0) * (sigma - 3.0) / (2.0 * kernel_var));
            pmf[static_cast<std::size_t>(s)] = w;
            sum += w;
        }
        for (double& p : pmf) p /= sum;
    }
    return SourceModel(std::move(variances), std::move(pmf));
}

void SystemParams::validate() const {
    if (b < 1) throw std::invalid_argument("SystemParams: b must be a positive integer");
    if (!(d_max > 0.0) || !std::isfinite(d_max))
        throw std::invalid_argument("SystemParams: d_max must be positive");
    if (!(p_avg > 0.0) || !std::isfinite(p_avg))
        throw std::invalid_argument("SystemParams: p_avg must be positive");
}

// ---------------------------------------------------------------------------
// FadingChannel

FadingChannel FadingChannel::rayleigh() {
    FadingChannel ch;
    ch.kind_ = Kind::Rayleigh;
    return ch;
}

FadingChannel FadingChannel::custom(CustomSpec spec) {
    if (!spec.pdf || !spec.cdf)
        throw std::invalid_argument("FadingChannel::custom: pdf and cdf callables are required");
    if (!(spec.support_max > 0.0))
        throw std::invalid_argument("FadingChannel::custom: support_max must be positive");

    if (!spec.tail_moment) {
        auto pdf = spec.pdf;
        spec.tail_moment = [pdf](double a) {
            return integrate_tail([&](double x) { return pdf(x) / x; }, a,
                                  Tolerance{1e-10, 0.0, 48});
        };
    }
    if (!spec.sample) {
        auto cdf = spec.cdf;
        const double support = spec.support_max;
        spec.sample = [cdf, support](double u) {
            double lo = 0.0, hi = support;
            while (cdf(hi) < u && hi < 1e12) hi *= 2.0;
            for (int i = 0; i < 200; ++i) {
                const double mid = 0.5 * (lo + hi);
                if (hi - lo <= 1e-12 * std::max(1.0, mid)) break;
                (cdf(mid) < u ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        };
    }

    const double mass =
        integrate_tail(spec.pdf, 0.0, Tolerance{1e-9, 0.0, 48});
    if (std::abs(mass - 1.0) > 1e-6)
        throw std::invalid_argument("FadingChannel::custom: pdf mass differs from 1 by more than 1e-6");

    FadingChannel ch;
    ch.kind_ = Kind::Custom;
    ch.custom_ = std::make_shared<const CustomSpec>(std::move(spec));
    return ch;
}

FadingChannel FadingChannel::tabulated(std::vector<double> alpha_grid,
                                       std::vector<double> pdf_values) {
    const std::size_t n = alpha_grid.size();
    if (n < 2 || pdf_values.size() != n)
        throw std::invalid_argument("FadingChannel::tabulated: need matching grids with >= 2 points");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(pdf_values[i] >= 0.0))
            throw std::invalid_argument("FadingChannel::tabulated: pdf values must be nonnegative");
        if (i > 0 && !(alpha_grid[i] > alpha_grid[i - 1]))
            throw std::invalid_argument("FadingChannel::tabulated: alpha grid must be strictly ascending");
    }
    if (!(alpha_grid.front() >= 0.0))
        throw std::invalid_argument("FadingChannel::tabulated: gains must be nonnegative");

    // Exact trapezoid mass of the interpolant.
    auto cum = std::make_shared<std::vector<double>>(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        (*cum)[i] = (*cum)[i - 1] + 0.5 * (pdf_values[i] + pdf_values[i - 1]) *
                                        (alpha_grid[i] - alpha_grid[i - 1]);
    }
    if (std::abs(cum->back() - 1.0) > 1e-6)
        throw std::invalid_argument("FadingChannel::tabulated: pdf mass differs from 1 by more than 1e-6");

    auto xs = std::make_shared<std::vector<double>>(std::move(alpha_grid));
    auto fs = std::make_shared<std::vector<double>>(std::move(pdf_values));

    auto segment = [xs](double a) -> std::size_t {
        const auto it = std::upper_bound(xs->begin(), xs->end(), a);
        const std::size_t j = static_cast<std::size_t>(it - xs->begin());
        return std::min(std::max<std::size_t>(j, 1), xs->size() - 1) - 1;
    };

    CustomSpec spec;
    spec.support_max = xs->back();
    spec.pdf = [xs, fs, segment](double a) {
        if (a < xs->front() || a > xs->back()) return 0.0;
        const std::size_t i = segment(a);
        const double t = (a - (*xs)[i]) / ((*xs)[i + 1] - (*xs)[i]);
        return (*fs)[i] + t * ((*fs)[i + 1] - (*fs)[i]);
    };
    spec.cdf = [xs, fs, cum, segment](double a) {
        if (a <= xs->front()) return 0.0;
        if (a >= xs->back()) return 1.0;
        const std::size_t i = segment(a);
        const double x0 = (*xs)[i], x1 = (*xs)[i + 1];
        const double f0 = (*fs)[i], f1 = (*fs)[i + 1];
        const double fa = f0 + (a - x0) / (x1 - x0) * (f1 - f0);
        return std::min(1.0, (*cum)[i] + 0.5 * (f0 + fa) * (a - x0));
    };
    spec.tail_moment = [xs, fs, segment](double a) {
        // Linear interpolant integrates in closed form:
        // int (f0 + m (x - x0)) / x dx = m (x - x0') + (f0 - m x0) ln x.
        if (a >= xs->back()) return 0.0;
        double total = 0.0;
        const std::size_t first = a <= xs->front() ? 0 : segment(a);
        for (std::size_t i = first; i + 1 < xs->size(); ++i) {
            double x0 = (*xs)[i], x1 = (*xs)[i + 1];
            double f0 = (*fs)[i];
            const double m = ((*fs)[i + 1] - f0) / (x1 - x0);
            double lo = std::max(a, x0);
            const double f_lo = f0 + m * (lo - x0);
            if (lo <= 0.0) {
                // A grid starting at zero: f(0) must be 0 for the moment to
                // exist; skip the zero point itself.
                if (f_lo > 0.0)
                    throw NumericError("FadingChannel::tabulated: tail moment diverges at alpha = 0");
                lo = std::min(x1, 1e-300);
            }
            total += m * (x1 - lo) + (f0 - m * x0) * std::log(x1 / lo);
        }
        return total;
    };
    spec.sample = [xs, fs, cum, segment](double u) {
        const double target = u * cum->back();
        const auto it = std::lower_bound(cum->begin(), cum->end(), target);
        std::size_t i = static_cast<std::size_t>(it - cum->begin());
        i = std::min(std::max<std::size_t>(i, 1), cum->size() - 1) - 1;
        const double x0 = (*xs)[i], x1 = (*xs)[i + 1];
        const double f0 = (*fs)[i], f1 = (*fs)[i + 1];
        const double need = target - (*cum)[i];
        const double m = (f1 - f0) / (x1 - x0);
        // Solve 0.5 m t^2 + f0 t = need for t in [0, x1 - x0].
        double t;
        if (std::abs(m) < 1e-300) {
            t = f0 > 0.0 ? need / f0 : 0.0;
        } else {
            const double disc = std::max(0.0, f0 * f0 + 2.0 * m * need);
            t = (-f0 + std::sqrt(disc)) / m;
            if (!(t >= 0.0) || t > (x1 - x0)) t = std::clamp(t, 0.0, x1 - x0);
        }
        return x0 + t;
    };

    FadingChannel ch;
    ch.kind_ = Kind::Custom;
    ch.custom_ = std::make_shared<const CustomSpec>(std::move(spec));
    return ch;
}

double FadingChannel::pdf(double a) const {
    if (kind_ == Kind::Rayleigh) return a < 0.0 ? 0.0 : std::exp(-a);
    return custom_->pdf(a);
}

double FadingChannel::cdf(double a) const {
    if (kind_ == Kind::Rayleigh) return a <= 0.0 ? 0.0 : -std::expm1(-a);
    return custom_->cdf(a);
}

double FadingChannel::tail_moment(double a) const {
    if (kind_ == Kind::Rayleigh) return exp_integral_e1(a);
    return custom_->tail_moment(a);
}

double FadingChannel::tail_moment_log(double ln_a) const {
    if (kind_ == Kind::Rayleigh) return exp_integral_e1_log(ln_a);
    return custom_->tail_moment(std::exp(ln_a));
}

double FadingChannel::sample(double u) const {
    if (kind_ == Kind::Rayleigh) return -std::log(u);
    return custom_->sample(u);
}

std::uintptr_t FadingChannel::cache_key() const {
    return kind_ == Kind::Rayleigh ? 0 : reinterpret_cast<std::uintptr_t>(custom_.get());
}

// ---------------------------------------------------------------------------

double capacity(double alpha, double gamma) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::domain_error("capacity: alpha must be positive");
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw std::domain_error("capacity: gamma must be nonnegative");
    return 0.5 * std::log1p(alpha * gamma) / kLn2;
}

double instantaneous_distortion(double sigma2, double rate, double cap, int b) {
    if (!(sigma2 > 0.0)) throw std::domain_error("instantaneous_distortion: sigma2 must be positive");
    if (!(rate >= 0.0)) throw std::domain_error("instantaneous_distortion: rate must be nonnegative");
    if (!(cap >= 0.0)) throw std::domain_error("instantaneous_distortion: capacity must be nonnegative");
    if (b < 1) throw std::domain_error("instantaneous_distortion: b must be >= 1");
    constexpr double kRateSlack = 1e-9;
    if (rate <= cap + kRateSlack * std::max(1.0, cap))
        return sigma2 * std::exp2(-2.0 * b * rate);
    return sigma2;
}

double required_snr(double sigma2, double d_max, int b) {
    if (!(sigma2 > 0.0) || !(d_max > 0.0) || b < 1)
        throw std::domain_error("required_snr: invalid arguments");
    return std::max(0.0, std::pow(sigma2 / d_max, 1.0 / b) - 1.0);
}

double db_to_linear(double x_db) {
    if (!std::isfinite(x_db)) throw std::domain_error("db_to_linear: non-finite input");
    return std::pow(10.0, x_db / 10.0);
}

double linear_to_db(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::domain_error("linear_to_db: input must be positive");
    return 10.0 * std::log10(x);
}

StateSample sample_state(const SourceModel& source, const FadingChannel& channel,
                         RngStream& rng) {
    const int s = source.sample(rng.next_unit());
    const double alpha = channel.sample(rng.next_unit());
    return StateSample{s, source.variance(s), alpha};
}

} // namespace doutage
