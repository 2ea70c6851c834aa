#include "doutage/asymptotics.hpp"

#include <cmath>
#include <limits>

namespace doutage {

namespace {

struct TailAggregates {
    double snr_max = 0.0;      // (max sigma2 / d_max)^(1/b) - 1
    double snr_mean = 0.0;     // sum over qualifying states of snr_s P(s)
    double pr_above = 0.0;     // Pr(sigma2 > d_max)
};

TailAggregates tail_aggregates(const SourceModel& source, const SystemParams& sys) {
    sys.validate();
    TailAggregates agg;
    for (int s = 0; s < source.state_count(); ++s) {
        const double v = source.variance(s);
        if (v > sys.d_max) {
            const double snr = required_snr(v, sys.d_max, sys.b);
            agg.snr_mean += snr * source.prob(s);
            agg.pr_above += source.prob(s);
        }
    }
    if (agg.pr_above == 0.0)
        throw std::domain_error("asymptotics: no source state exceeds the distortion allowance");
    agg.snr_max = required_snr(source.max_variance(), sys.d_max, sys.b);
    return agg;
}

} // namespace

std::string_view exponent_order_name(ExponentOrder order) {
    return order == ExponentOrder::Constant ? "O(1)" : "O(P/lnP)";
}

ExponentEstimate exponent_scopa(const SourceModel& source, const SystemParams& sys) {
    const TailAggregates agg = tail_aggregates(source, sys);
    if (!(sys.p_avg > 1.0))
        throw std::domain_error("exponent_scopa: p_avg must exceed 1 (ln P must be positive)");
    return {Scheme::ScopaMdo, sys.p_avg,
            sys.p_avg / (std::log(sys.p_avg) * agg.snr_mean),
            ExponentOrder::PowerOverLogPower};
}

ExponentEstimate exponent_copa(const SourceModel& source, const SystemParams& sys) {
    const TailAggregates agg = tail_aggregates(source, sys);
    if (!(sys.p_avg > 1.0))
        throw std::domain_error("exponent_copa: p_avg must exceed 1 (ln P must be positive)");
    return {Scheme::CopaMdo, sys.p_avg,
            (sys.p_avg / agg.snr_max - std::log(agg.pr_above)) / std::log(sys.p_avg),
            ExponentOrder::PowerOverLogPower};
}

ExponentEstimate exponent_constant_power(Scheme scheme) {
    if (scheme != Scheme::Coracp && scheme != Scheme::Crcp)
        throw std::invalid_argument("exponent_constant_power: scheme must be CORACP or CRCP");
    return {scheme, 0.0, 1.0, ExponentOrder::Constant};
}

GainResult gain_scopa_vs_copa(const SourceModel& source, const SystemParams& sys) {
    const TailAggregates agg = tail_aggregates(source, sys);
    return {Scheme::ScopaMdo, Scheme::CopaMdo, std::nullopt,
            linear_to_db(agg.snr_max) - linear_to_db(agg.snr_mean)};
}

GainResult gain_copa_vs_coracp(const SourceModel& source, const SystemParams& sys,
                               double p_bar2) {
    const TailAggregates agg = tail_aggregates(source, sys);
    if (!(p_bar2 > 0.0) || !std::isfinite(p_bar2))
        throw std::domain_error("gain_copa_vs_coracp: p_bar2 must be positive");
    const double ratio = p_bar2 / agg.snr_mean;
    if (ratio <= 1.0)
        throw std::domain_error(
            "gain_copa_vs_coracp: p_bar2 too small, ln argument must exceed 1");
    return {Scheme::CopaMdo, Scheme::Coracp, p_bar2,
            linear_to_db(p_bar2 / agg.snr_max) - linear_to_db(std::log(ratio))};
}

GainResult gain_coracp_vs_crcp(const SourceModel& source, const SystemParams& sys) {
    const TailAggregates agg = tail_aggregates(source, sys);
    return {Scheme::Coracp, Scheme::Crcp, std::nullopt,
            linear_to_db(agg.snr_max * agg.pr_above) - linear_to_db(agg.snr_mean)};
}

double empirical_gain(Scheme scheme1, Scheme scheme2, const SourceModel& source,
                      const FadingChannel& channel, const SystemParams& sys,
                      double target_pdout) {
    if (!(target_pdout > 0.0) || !(target_pdout < 1.0))
        throw std::domain_error("empirical_gain: target_pdout must lie in (0, 1)");
    const double ln_target = std::log(target_pdout);

    auto invert = [&](Scheme scheme) {
        auto ln_p_at_db = [&](double p_db) {
            SystemParams at = sys;
            at.p_avg = db_to_linear(p_db);
            return solve(scheme, source, channel, at).ln_p_dout;
        };
        double lo_db = -400.0, hi_db = 1200.0;
        if (!(ln_p_at_db(lo_db) > ln_target))
            throw NumericError("empirical_gain: target outage probability unattainable (" +
                               std::string(scheme_name(scheme)) +
                               " cannot be driven up to the target)");
        if (!(ln_p_at_db(hi_db) < ln_target))
            throw NumericError("empirical_gain: target outage probability unattainable (" +
                               std::string(scheme_name(scheme)) +
                               " cannot be driven down to the target)");
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo_db + hi_db);
            if (hi_db - lo_db <= 1e-9) break;
            (ln_p_at_db(mid) > ln_target ? lo_db : hi_db) = mid;
        }
        return 0.5 * (lo_db + hi_db);
    };

    const double p1_db = invert(scheme1);
    const double p2_db = scheme1 == scheme2 ? p1_db : invert(scheme2);
    return p2_db - p1_db;
}

} // namespace doutage
