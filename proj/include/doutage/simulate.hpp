#pragma once

#include "doutage/schemes.hpp"

#include <cstdint>

namespace doutage {

/// Monte Carlo outcome. Half-widths are 95% normal-approximation confidence
/// intervals. Reports are bitwise reproducible for a fixed (seed, trials)
/// pair regardless of the worker count: trials are keyed to a counter-based
/// generator and aggregated in fixed batch order.
struct SimReport {
    std::uint64_t trials = 0;
    std::uint64_t outages = 0;
    double p_dout_hat = 0.0;
    double p_ci_halfwidth = 0.0;
    double power_mean = 0.0;
    double power_ci_halfwidth = 0.0;
    std::uint64_t seed = 0;
    int workers = 1;
};

/// Draws (state, gain) blocks, applies the policy, and counts distortion
/// outages against sys.d_max. Power is accumulated with compensated
/// summation so the aggregation order cannot perturb the mean.
SimReport run_sim(const PowerRatePolicy& policy, const SourceModel& source,
                  const FadingChannel& channel, const SystemParams& sys,
                  std::uint64_t trials, std::uint64_t seed, int workers = 1);

struct PolicyCheckReport {
    std::uint64_t trials = 0;
    std::uint64_t transmitting = 0;
    std::uint64_t silent = 0;
    double max_rel_deviation = 0.0;
};

/// Structural check of the on/off policies. For a ScopaMdo policy, every
/// transmitting trial must land the distortion exactly on d_max (1e-9
/// relative) and every silent trial on sigma2_s. For a CopaMdo policy, the
/// transmit region must be exactly the gains at or above the solved
/// threshold, with capacity meeting the fixed rate there and zero below.
/// Throws NumericError naming the offending (s, alpha) on violation; other
/// scheme policies are rejected with std::invalid_argument.
PolicyCheckReport probabilistic_policy_check(const PowerRatePolicy& policy,
                                             const SourceModel& source,
                                             const FadingChannel& channel,
                                             const SystemParams& sys,
                                             std::uint64_t trials, std::uint64_t seed);

} // namespace doutage
