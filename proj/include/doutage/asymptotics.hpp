#pragma once

#include "doutage/schemes.hpp"

#include <optional>

namespace doutage {

enum class ExponentOrder { PowerOverLogPower, Constant };

std::string_view exponent_order_name(ExponentOrder order);

/// Finite-power evaluation of a scheme's outage distortion exponent, i.e.
/// the decay rate -ln(P_Dout)/ln(P) in the high-power regime.
struct ExponentEstimate {
    Scheme scheme = Scheme::Crcp;
    double p_bar = 0.0;
    double value = 0.0;
    ExponentOrder order = ExponentOrder::Constant;
};

/// Power saving (dB) of scheme1 over scheme2 at equal asymptotic outage:
/// 10 log10(P2) - 10 log10(P1). p_bar2 is carried only for the pair whose
/// gain depends on the reference power.
struct GainResult {
    Scheme scheme1 = Scheme::Crcp;
    Scheme scheme2 = Scheme::Crcp;
    std::optional<double> p_bar2;
    double value_db = 0.0;
};

/// exponent ~ P / (ln P * sum_{s above d_max} snr_s P(s)).
ExponentEstimate exponent_scopa(const SourceModel& source, const SystemParams& sys);

/// exponent ~ (P / snr_max - ln Pr(sigma2 > d_max)) / ln P.
ExponentEstimate exponent_copa(const SourceModel& source, const SystemParams& sys);

/// Constant-power schemes decay only inverse-linearly with power: the
/// exponent is 1, order O(1), independent of every parameter.
ExponentEstimate exponent_constant_power(Scheme scheme);

/// 10 log10(snr_max) - 10 log10(sum snr_s P(s)); power-independent, zero for
/// a single-state source.
GainResult gain_scopa_vs_copa(const SourceModel& source, const SystemParams& sys);

/// 10 log10(P2 / snr_max) - 10 log10(ln(P2 / sum snr_s P(s))); grows with
/// the reference power. Requires P2 > sum snr_s P(s).
GainResult gain_copa_vs_coracp(const SourceModel& source, const SystemParams& sys,
                               double p_bar2);

/// 10 log10(snr_max * Pr(sigma2 > d_max)) - 10 log10(sum snr_s P(s));
/// power-independent, zero for a single-state source.
GainResult gain_coracp_vs_crcp(const SourceModel& source, const SystemParams& sys);

/// Measured gain: inverts each scheme's analytic p_dout(P) curve at
/// target_pdout (log-domain, monotone bisection) and returns the dB power
/// difference scheme2 - scheme1. Throws NumericError when a scheme cannot
/// reach the target at any power.
double empirical_gain(Scheme scheme1, Scheme scheme2, const SourceModel& source,
                      const FadingChannel& channel, const SystemParams& sys,
                      double target_pdout);

} // namespace doutage
