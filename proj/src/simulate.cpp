#include "doutage/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>
#include <vector>

namespace doutage {

namespace {

constexpr std::uint64_t kBatchSize = 1 << 14;

struct BatchPartial {
    std::uint64_t outages = 0;
    double power_sum = 0.0;
    double power_comp = 0.0;  // Neumaier compensation
    double power_sq_sum = 0.0;
    double power_sq_comp = 0.0;
};

void neumaier_add(double& sum, double& comp, double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
        comp += (sum - t) + v;
    else
        comp += (v - t) + sum;
    sum = t;
}

} // namespace

SimReport run_sim(const PowerRatePolicy& policy, const SourceModel& source,
                  const FadingChannel& channel, const SystemParams& sys,
                  std::uint64_t trials, std::uint64_t seed, int workers) {
    sys.validate();
    if (trials < 1) throw std::invalid_argument("run_sim: trials must be >= 1");
    if (workers < 1) throw std::invalid_argument("run_sim: workers must be >= 1");

    const std::uint64_t n_batches = (trials + kBatchSize - 1) / kBatchSize;
    std::vector<BatchPartial> partials(n_batches);

    auto run_batch = [&](std::uint64_t batch) {
        BatchPartial acc;
        const std::uint64_t begin = batch * kBatchSize;
        const std::uint64_t end = std::min(trials, begin + kBatchSize);
        for (std::uint64_t t = begin; t < end; ++t) {
            RngStream rng = RngStream::at(seed, 2 * t);
            const StateSample draw = sample_state(source, channel, rng);
            const double gamma = policy.power(draw.s, draw.alpha);
            const double rate = policy.rate(draw.s, draw.alpha);
            const double cap = capacity(draw.alpha, gamma);
            const double d = instantaneous_distortion(draw.sigma2, rate, cap, sys.b);
            if (d > sys.d_max) ++acc.outages;
            neumaier_add(acc.power_sum, acc.power_comp, gamma);
            neumaier_add(acc.power_sq_sum, acc.power_sq_comp, gamma * gamma);
        }
        partials[batch] = acc;
    };

    const int n_workers = static_cast<int>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), n_batches));
    if (n_workers <= 1) {
        for (std::uint64_t b = 0; b < n_batches; ++b) run_batch(b);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::uint64_t b = static_cast<std::uint64_t>(w); b < n_batches;
                     b += static_cast<std::uint64_t>(n_workers))
                    run_batch(b);
            });
        }
        for (auto& th : pool) th.join();
    }

    // Fixed-order reduction over batches keeps the result thread-count
    // independent.
    std::uint64_t outages = 0;
    double sum = 0.0, comp = 0.0, sq_sum = 0.0, sq_comp = 0.0;
    for (const BatchPartial& p : partials) {
        outages += p.outages;
        neumaier_add(sum, comp, p.power_sum + p.power_comp);
        neumaier_add(sq_sum, sq_comp, p.power_sq_sum + p.power_sq_comp);
    }

    SimReport report;
    report.trials = trials;
    report.outages = outages;
    report.seed = seed;
    report.workers = workers;
    const double n = static_cast<double>(trials);
    report.p_dout_hat = static_cast<double>(outages) / n;
    report.p_ci_halfwidth =
        1.96 * std::sqrt(std::max(0.0, report.p_dout_hat * (1.0 - report.p_dout_hat)) / n);
    report.power_mean = (sum + comp) / n;
    if (trials > 1) {
        const double total_sq = sq_sum + sq_comp;
        const double var =
            std::max(0.0, (total_sq - n * report.power_mean * report.power_mean) / (n - 1.0));
        report.power_ci_halfwidth = 1.96 * std::sqrt(var / n);
    }
    return report;
}

PolicyCheckReport probabilistic_policy_check(const PowerRatePolicy& policy,
                                             const SourceModel& source,
                                             const FadingChannel& channel,
                                             const SystemParams& sys,
                                             std::uint64_t trials, std::uint64_t seed) {
    sys.validate();
    if (trials < 1) throw std::invalid_argument("probabilistic_policy_check: trials must be >= 1");
    const Scheme scheme = policy.descriptor.scheme;
    if (scheme != Scheme::ScopaMdo && scheme != Scheme::CopaMdo)
        throw std::invalid_argument(
            "probabilistic_policy_check: policy must belong to SCOPA-MDO or COPA-MDO");

    auto violation = [](const char* what, int s, double alpha) {
        std::ostringstream os;
        os << "probabilistic_policy_check: " << what << " at (s=" << s << ", alpha=" << alpha
           << ")";
        return NumericError(os.str());
    };

    PolicyCheckReport report;
    report.trials = trials;

    // COPA transmit region: alpha >= (2^{2R*}-1)/q1*. The threshold can
    // underflow to zero at large power limits, in which case the region is
    // the whole gain axis.
    double copa_alpha_min = 0.0, copa_rate = 0.0;
    bool copa_has_region = false;
    if (scheme == Scheme::CopaMdo) {
        copa_rate = policy.descriptor.r_star.value_or(0.0);
        const double t = std::exp2(2.0 * copa_rate) - 1.0;
        if (t > 0.0 && policy.descriptor.ln_q) {
            copa_has_region = true;
            copa_alpha_min = std::exp(std::log(t) - *policy.descriptor.ln_q);
        }
    }

    for (std::uint64_t t = 0; t < trials; ++t) {
        RngStream rng = RngStream::at(seed, 2 * t);
        const StateSample draw = sample_state(source, channel, rng);
        const double gamma = policy.power(draw.s, draw.alpha);
        const double rate = policy.rate(draw.s, draw.alpha);
        const bool transmitting = gamma > 0.0;
        transmitting ? ++report.transmitting : ++report.silent;

        const double cap = capacity(draw.alpha, gamma);
        const double d = instantaneous_distortion(draw.sigma2, rate, cap, sys.b);

        if (scheme == Scheme::ScopaMdo) {
            if (transmitting) {
                const double dev = std::abs(d - sys.d_max) / sys.d_max;
                report.max_rel_deviation = std::max(report.max_rel_deviation, dev);
                if (dev > 1e-9)
                    throw violation("transmitting distortion missed d_max", draw.s, draw.alpha);
            } else {
                if (rate != 0.0)
                    throw violation("silent trial with nonzero rate", draw.s, draw.alpha);
                if (d != draw.sigma2)
                    throw violation("silent distortion must equal the state variance", draw.s,
                                    draw.alpha);
            }
        } else {
            const bool should_transmit = copa_has_region && draw.alpha >= copa_alpha_min;
            if (transmitting != should_transmit)
                throw violation("transmit region mismatch against the gain threshold", draw.s,
                                draw.alpha);
            if (transmitting) {
                const double dev =
                    copa_rate > 0.0 ? std::abs(cap - copa_rate) / copa_rate : std::abs(cap);
                report.max_rel_deviation = std::max(report.max_rel_deviation, dev);
                if (dev > 1e-9)
                    throw violation("capacity missed the fixed rate on the transmit region",
                                    draw.s, draw.alpha);
            } else if (gamma != 0.0 || cap != 0.0) {
                throw violation("silent trial must carry zero power and capacity", draw.s,
                                draw.alpha);
            }
        }
    }
    return report;
}

} // namespace doutage
