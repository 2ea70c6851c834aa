#pragma once

#include "doutage/models.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace doutage {

/// The four transmission schemes.
///  - ScopaMdo: per-(state, gain) truncated channel inversion with the rate
///    matched to the state, thresholded at q2*.
///  - CopaMdo: one optimized fixed rate, truncated channel inversion
///    thresholded at q1*.
///  - Coracp: constant power, rate tracks the instantaneous capacity.
///  - Crcp: constant power, one optimized fixed rate.
enum class Scheme { ScopaMdo, CopaMdo, Coracp, Crcp };

std::string_view scheme_name(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);

struct PolicyDescriptor {
    Scheme scheme = Scheme::Crcp;
    std::optional<double> r_star;  // fixed rate, when the scheme has one
    std::optional<double> ln_q;    // ln of the solved threshold q1* or q2*
    std::string to_string() const;
};

/// Transmission policy: power and rate as deterministic functions of
/// (state index, gain). Shareable read-only across threads.
struct PowerRatePolicy {
    std::function<double(int, double)> power;
    std::function<double(int, double)> rate;
    PolicyDescriptor descriptor;
};

/// A solved scheme: the policy plus the analytic distortion outage
/// probability. p_dout saturates to 0 below double range; ln_p_dout stays
/// meaningful there (the high-power tails reach exp(-2000) and beyond).
/// r_star is present for the fixed-rate schemes (CopaMdo, Crcp); q_star and
/// ln_q_star for the threshold schemes (CopaMdo, ScopaMdo) whenever a
/// threshold was actually solved (degenerate no-outage inputs carry none).
/// q_star overflows to +inf past p_avg of roughly 35 dB; ln_q_star does not.
struct SchemeSolution {
    Scheme scheme = Scheme::Crcp;
    PowerRatePolicy policy;
    double p_dout = 0.0;
    double ln_p_dout = 0.0;
    std::optional<double> r_star;
    std::optional<double> q_star;
    std::optional<double> ln_q_star;
};

/// Candidate fixed rates 1/(2b) log2(sigma2_s / d_max) over states with
/// sigma2_s >= d_max, deduplicated and ascending. Empty iff every state sits
/// strictly below d_max.
std::vector<double> rate_candidates(const SourceModel& source, const SystemParams& sys);

/// Threshold q1* for the fixed-rate inversion policy: solves
/// (2^{2R} - 1) * tail_moment((2^{2R} - 1)/q1) == p_avg. Rayleigh channels
/// go through the E1 inverse; Custom channels through the generic root
/// finder. Returns ln(q1*); the plain variant exponentiates (and can
/// overflow for extreme power limits).
double solve_q1_log(double rate, const FadingChannel& channel, double p_avg);
double solve_q1(double rate, const FadingChannel& channel, double p_avg);

/// Threshold q2* for the per-state inversion policy: solves
/// sum_{s: sigma2_s > d_max} snr_s * tail_moment(snr_s/q2) * P(s) == p_avg.
/// Requires at least one state above d_max.
double solve_q2_log(const SourceModel& source, const FadingChannel& channel,
                    const SystemParams& sys);
double solve_q2(const SourceModel& source, const FadingChannel& channel,
                const SystemParams& sys);

SchemeSolution solve_scopa(const SourceModel& source, const FadingChannel& channel,
                           const SystemParams& sys);
SchemeSolution solve_copa(const SourceModel& source, const FadingChannel& channel,
                          const SystemParams& sys);
SchemeSolution solve_coracp(const SourceModel& source, const FadingChannel& channel,
                            const SystemParams& sys);
SchemeSolution solve_crcp(const SourceModel& source, const FadingChannel& channel,
                          const SystemParams& sys);

SchemeSolution solve(Scheme scheme, const SourceModel& source,
                     const FadingChannel& channel, const SystemParams& sys);

} // namespace doutage
