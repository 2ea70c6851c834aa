#pragma once

#include <cmath>
#include <cstdint>

namespace doutage {

/// Counter-based pseudo-random stream (splitmix64 finalizer over an affine
/// counter walk). Output depends only on (seed, counter), so trial i of a
/// simulation can be reproduced on any worker by jumping straight to its
/// counter slot. Aggregate results are therefore independent of how trials
/// are partitioned across threads.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t counter = 0;

    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    static RngStream at(std::uint64_t seed, std::uint64_t counter) {
        return RngStream{seed, counter};
    }

    std::uint64_t next_u64() { return mix(seed + (++counter) * kGamma); }

    /// Uniform on the open interval (0, 1); never returns an endpoint.
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Unit-mean exponential via inverse CDF, alpha = -ln(u).
    double next_exponential() { return -std::log(next_unit()); }
};

} // namespace doutage
