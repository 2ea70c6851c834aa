#pragma once

#include "doutage/numerics.hpp"
#include "doutage/rng.hpp"

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace doutage {

/// Finite-state source: zero-mean Gaussian with per-state variance and a pmf
/// over states. Immutable after construction; the constructor validates the
/// invariants and renormalizes the pmf so it sums to one exactly.
class SourceModel {
public:
    SourceModel(std::vector<double> variances, std::vector<double> pmf);

    const std::vector<double>& variances() const { return variances_; }
    const std::vector<double>& pmf() const { return pmf_; }
    int state_count() const { return static_cast<int>(variances_.size()); }
    double variance(int s) const { return variances_[static_cast<std::size_t>(s)]; }
    double prob(int s) const { return pmf_[static_cast<std::size_t>(s)]; }

    double max_variance() const { return max_variance_; }

    /// Pr(sigma^2_s > threshold), strict inequality.
    double pr_variance_above(double threshold) const;

    /// Inverse-CDF draw of a state index from u in (0, 1).
    int sample(double u) const;

private:
    std::vector<double> variances_;
    std::vector<double> pmf_;
    std::vector<double> cumulative_;
    double max_variance_ = 0.0;
};

/// The experimental source family: 25 states with sigma_s = 1 + s/6,
/// Gaussian-kernel pmfs G1/G2/G3 centered on sigma = 3 with kernel variances
/// 0.05/0.48/1.07, a uniform source U, and the single-state source S with
/// sigma = 3.
SourceModel build_experimental_source(std::string_view label);

/// System-wide knobs: channel uses per source sample (b), the distortion
/// allowance, and the average transmit power limit. All linear scale.
struct SystemParams {
    int b = 1;
    double d_max = 1.0;
    double p_avg = 1.0;

    void validate() const;
};

struct StateSample {
    int s = 0;
    double sigma2 = 0.0;
    double alpha = 0.0;
};

/// Block fading gain distribution. Rayleigh fading means a unit-mean
/// exponential gain and gets closed-form treatment everywhere; a Custom
/// channel is described by callables (pdf, cdf, tail moment, sampler) and is
/// served by the generic quadrature paths.
class FadingChannel {
public:
    enum class Kind { Rayleigh, Custom };

    struct CustomSpec {
        std::function<double(double)> pdf;  // required
        std::function<double(double)> cdf;  // required
        std::function<double(double)> tail_moment;  // optional; numeric default
        std::function<double(double)> sample;       // optional; inverse-cdf default
        double support_max = 64.0;  // bracket for the numeric defaults
    };

    static FadingChannel rayleigh();

    /// Custom channel from callables; checks numerically that the pdf mass
    /// is 1 within 1e-6.
    static FadingChannel custom(CustomSpec spec);

    /// Custom channel from a tabulated pdf: piecewise-linear density on an
    /// ascending grid, zero outside. cdf, tail moment and sampling are exact
    /// for the interpolant.
    static FadingChannel tabulated(std::vector<double> alpha_grid,
                                   std::vector<double> pdf_values);

    Kind kind() const { return kind_; }

    double pdf(double a) const;
    double cdf(double a) const;
    double survival(double a) const { return 1.0 - cdf(a); }

    /// integral_a^inf f(alpha)/alpha dalpha. For Rayleigh this is E1(a).
    double tail_moment(double a) const;
    /// Same with the threshold passed as ln(a); exact for Rayleigh at
    /// thresholds below double range.
    double tail_moment_log(double ln_a) const;

    /// Inverse-CDF draw of a gain from u in (0, 1).
    double sample(double u) const;

    /// A stable identity for caching solved thresholds per channel.
    std::uintptr_t cache_key() const;

private:
    FadingChannel() = default;
    Kind kind_ = Kind::Rayleigh;
    std::shared_ptr<const CustomSpec> custom_;
};

/// Instantaneous capacity of the fading Gaussian channel, bits per channel
/// use: C = (1/2) log2(1 + alpha * gamma).
double capacity(double alpha, double gamma);

/// Distortion of a block: sigma2 * 2^(-2 b rate) when the channel carries
/// the rate, sigma2 otherwise (decoder falls back to the source mean).
/// The rate-vs-capacity comparison allows a 1e-9 relative slack: the power
/// policies set gamma so that capacity lands exactly on the coding rate, and
/// that equality must not flip to outage on rounding.
double instantaneous_distortion(double sigma2, double rate, double cap, int b);

/// Minimum receive SNR for state sigma2 to meet d_max:
/// (sigma2/d_max)^(1/b) - 1, clamped at 0.
double required_snr(double sigma2, double d_max, int b);

double db_to_linear(double x_db);
double linear_to_db(double x);

/// One independent (state, gain) draw. Consumes exactly two stream values:
/// first the state, then the gain.
StateSample sample_state(const SourceModel& source, const FadingChannel& channel,
                         RngStream& rng);

} // namespace doutage
