#include "doutage/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace doutage {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double exp2m1_rate(double rate) { return std::exp2(2.0 * rate) - 1.0; }

struct Candidate {
    double rate;
    double sigma2;  // the state variance the rate was derived from
};

// Candidates with their originating variances. The outage factor
// Pr(sigma2 2^{-2bR} > d_max) at candidate R_j is the mass strictly above
// sigma2_j; comparing against sigma2_j directly instead of d_max * 2^{2bR}
// avoids boundary flips from exp2/log2 round-trip noise.
std::vector<Candidate> candidate_set(const SourceModel& source, const SystemParams& sys) {
    std::vector<Candidate> out;
    for (int s = 0; s < source.state_count(); ++s) {
        const double v = source.variance(s);
        if (v >= sys.d_max)
            out.push_back({0.5 / sys.b * std::log2(v / sys.d_max), v});
    }
    std::sort(out.begin(), out.end(),
              [](const Candidate& a, const Candidate& b) { return a.rate < b.rate; });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const Candidate& a, const Candidate& b) {
                              return a.rate == b.rate;
                          }),
              out.end());
    return out;
}

// Cache of solved ln(q1) keyed by (rate, p_avg, channel identity). Solves are
// pure, so a racing recompute lands the same value; lookup-or-compute behaves
// atomically.
double solve_q1_log_cached(double rate, const FadingChannel& channel, double p_avg);

double solve_q1_log_impl(double rate, const FadingChannel& channel, double p_avg) {
    const double t = exp2m1_rate(rate);
    if (channel.kind() == FadingChannel::Kind::Rayleigh) {
        const double ln_x = e1_inverse_log(p_avg / t);
        return std::log(t) - ln_x;
    }
    const double q = find_root_monotone(
        [&](double q1) { return t * channel.tail_moment(t / q1); },
        /*bracket_seed=*/1.0, /*increasing=*/true, /*target=*/p_avg,
        Tolerance{1e-12, 0.0, 400});
    return std::log(q);
}

std::mutex q1_cache_mutex;
std::map<std::tuple<double, double, std::uintptr_t>, double> q1_cache;

double solve_q1_log_cached(double rate, const FadingChannel& channel, double p_avg) {
    const auto key = std::make_tuple(rate, p_avg, channel.cache_key());
    {
        std::lock_guard<std::mutex> lock(q1_cache_mutex);
        if (const auto it = q1_cache.find(key); it != q1_cache.end()) return it->second;
    }
    const double value = solve_q1_log_impl(rate, channel, p_avg);
    {
        std::lock_guard<std::mutex> lock(q1_cache_mutex);
        if (q1_cache.size() > 65536) q1_cache.clear();
        q1_cache.emplace(key, value);
    }
    return value;
}

// Pr(alpha < x) and its log, with x carried as ln(x) so Rayleigh stays exact
// when x underflows.
double ln_pr_gain_below(const FadingChannel& channel, double ln_x) {
    if (channel.kind() == FadingChannel::Kind::Rayleigh)
        return ln_one_minus_exp_neg_log(ln_x);
    const double c = channel.cdf(std::exp(ln_x));
    return c > 0.0 ? std::log(c) : -kInf;
}

double pr_gain_below(const FadingChannel& channel, double ln_x) {
    if (channel.kind() == FadingChannel::Kind::Rayleigh) {
        const double x = std::exp(ln_x);
        return -std::expm1(-x);
    }
    return channel.cdf(std::exp(ln_x));
}

double pr_gain_at_least(const FadingChannel& channel, double ln_x) {
    if (channel.kind() == FadingChannel::Kind::Rayleigh) return std::exp(-std::exp(ln_x));
    return channel.survival(std::exp(ln_x));
}

PowerRatePolicy zero_power_policy(Scheme scheme) {
    PowerRatePolicy policy;
    policy.power = [](int, double) { return 0.0; };
    policy.rate = [](int, double) { return 0.0; };
    policy.descriptor.scheme = scheme;
    return policy;
}

} // namespace

std::string_view scheme_name(Scheme s) {
    switch (s) {
        case Scheme::ScopaMdo: return "SCOPA-MDO";
        case Scheme::CopaMdo: return "COPA-MDO";
        case Scheme::Coracp: return "CORACP";
        case Scheme::Crcp: return "CRCP";
    }
    return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
    std::string lower;
    lower.reserve(name.size());
    for (char c : name)
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "scopa" || lower == "scopa-mdo") return Scheme::ScopaMdo;
    if (lower == "copa" || lower == "copa-mdo") return Scheme::CopaMdo;
    if (lower == "coracp") return Scheme::Coracp;
    if (lower == "crcp") return Scheme::Crcp;
    return std::nullopt;
}

std::string PolicyDescriptor::to_string() const {
    std::ostringstream os;
    os << scheme_name(scheme);
    if (r_star) os << " R*=" << *r_star;
    if (ln_q) os << " ln(q*)=" << *ln_q;
    return os.str();
}

std::vector<double> rate_candidates(const SourceModel& source, const SystemParams& sys) {
    sys.validate();
    std::vector<double> rates;
    for (const Candidate& c : candidate_set(source, sys)) rates.push_back(c.rate);
    return rates;
}

double solve_q1_log(double rate, const FadingChannel& channel, double p_avg) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw std::domain_error("solve_q1: rate must be positive");
    if (!(p_avg > 0.0) || !std::isfinite(p_avg))
        throw std::domain_error("solve_q1: p_avg must be positive");
    return solve_q1_log_cached(rate, channel, p_avg);
}

double solve_q1(double rate, const FadingChannel& channel, double p_avg) {
    return std::exp(solve_q1_log(rate, channel, p_avg));
}

double solve_q2_log(const SourceModel& source, const FadingChannel& channel,
                    const SystemParams& sys) {
    sys.validate();
    struct Term {
        double snr;
        double ln_snr;
        double prob;
    };
    std::vector<Term> terms;
    for (int s = 0; s < source.state_count(); ++s) {
        const double v = source.variance(s);
        if (v > sys.d_max && source.prob(s) > 0.0) {
            const double snr = required_snr(v, sys.d_max, sys.b);
            terms.push_back({snr, std::log(snr), source.prob(s)});
        }
    }
    if (terms.empty())
        throw std::domain_error("solve_q2: no source state exceeds the distortion allowance");

    auto constraint_gap = [&](double ln_q2) {
        double sum = 0.0;
        for (const Term& t : terms)
            sum += t.snr * channel.tail_moment_log(t.ln_snr - ln_q2) * t.prob;
        return sum - sys.p_avg;
    };

    // Increasing in ln_q2. Expand additively first (the solution is often
    // within a few e-folds), then geometrically for the far regime where
    // ln(q2) grows like p_avg itself.
    double lo = -64.0, hi = 64.0;
    for (int i = 0; i < 64 && constraint_gap(lo) > 0.0; ++i) lo *= 2.0;
    for (int i = 0; i < 64 && constraint_gap(hi) < 0.0; ++i) hi *= 2.0;
    if (constraint_gap(lo) > 0.0 || constraint_gap(hi) < 0.0)
        throw NumericError("solve_q2: failed to bracket the power constraint");
    double mid = 0.5 * (lo + hi);
    for (int i = 0; i < 300; ++i) {
        mid = 0.5 * (lo + hi);
        if (hi - lo <= 1e-13 * std::max(1.0, std::abs(mid))) break;
        (constraint_gap(mid) < 0.0 ? lo : hi) = mid;
    }
    return mid;
}

double solve_q2(const SourceModel& source, const FadingChannel& channel,
                const SystemParams& sys) {
    return std::exp(solve_q2_log(source, channel, sys));
}

SchemeSolution solve_scopa(const SourceModel& source, const FadingChannel& channel,
                           const SystemParams& sys) {
    sys.validate();
    SchemeSolution sol;
    sol.scheme = Scheme::ScopaMdo;

    const double pr_above = source.pr_variance_above(sys.d_max);
    if (pr_above == 0.0) {
        sol.policy = zero_power_policy(Scheme::ScopaMdo);
        sol.p_dout = 0.0;
        sol.ln_p_dout = -kInf;
        return sol;
    }

    const double ln_q2 = solve_q2_log(source, channel, sys);

    const int n = source.state_count();
    std::vector<double> snr(static_cast<std::size_t>(n)), rate_s(static_cast<std::size_t>(n));
    double p_lin = 0.0, ln_p = -kInf;
    for (int s = 0; s < n; ++s) {
        const double v = source.variance(s);
        snr[static_cast<std::size_t>(s)] = v > sys.d_max ? required_snr(v, sys.d_max, sys.b) : 0.0;
        rate_s[static_cast<std::size_t>(s)] =
            v > sys.d_max ? 0.5 / sys.b * std::log2(v / sys.d_max) : 0.0;
        if (v > sys.d_max && source.prob(s) > 0.0) {
            const double ln_x = std::log(snr[static_cast<std::size_t>(s)]) - ln_q2;
            p_lin += pr_gain_below(channel, ln_x) * source.prob(s);
            ln_p = log_sum_exp(ln_p, ln_pr_gain_below(channel, ln_x) + std::log(source.prob(s)));
        }
    }
    sol.p_dout = p_lin > 0.0 ? p_lin : std::exp(ln_p);
    sol.ln_p_dout = ln_p;
    sol.ln_q_star = ln_q2;
    sol.q_star = std::exp(ln_q2);

    std::vector<double> alpha_min(static_cast<std::size_t>(n), 0.0);
    for (int s = 0; s < n; ++s) {
        const double th = snr[static_cast<std::size_t>(s)];
        if (th > 0.0)
            alpha_min[static_cast<std::size_t>(s)] = std::exp(std::log(th) - ln_q2);
    }
    auto snr_shared = std::make_shared<const std::vector<double>>(std::move(snr));
    auto rate_shared = std::make_shared<const std::vector<double>>(std::move(rate_s));
    auto amin_shared = std::make_shared<const std::vector<double>>(std::move(alpha_min));
    PowerRatePolicy policy;
    policy.power = [snr_shared, amin_shared](int s, double alpha) {
        const double th = (*snr_shared)[static_cast<std::size_t>(s)];
        if (th <= 0.0) return 0.0;
        return alpha >= (*amin_shared)[static_cast<std::size_t>(s)] ? th / alpha : 0.0;
    };
    policy.rate = [snr_shared, rate_shared, amin_shared](int s, double alpha) {
        const double th = (*snr_shared)[static_cast<std::size_t>(s)];
        if (th <= 0.0) return 0.0;
        return alpha >= (*amin_shared)[static_cast<std::size_t>(s)]
                   ? (*rate_shared)[static_cast<std::size_t>(s)]
                   : 0.0;
    };
    policy.descriptor.scheme = Scheme::ScopaMdo;
    policy.descriptor.ln_q = ln_q2;
    sol.policy = std::move(policy);
    return sol;
}

SchemeSolution solve_copa(const SourceModel& source, const FadingChannel& channel,
                          const SystemParams& sys) {
    sys.validate();
    SchemeSolution sol;
    sol.scheme = Scheme::CopaMdo;

    const auto candidates = candidate_set(source, sys);
    const double pr_above = source.pr_variance_above(sys.d_max);
    if (candidates.empty()) {
        sol.policy = zero_power_policy(Scheme::CopaMdo);
        sol.policy.descriptor.r_star = 0.0;
        sol.r_star = 0.0;
        sol.p_dout = 0.0;
        sol.ln_p_dout = -kInf;
        return sol;
    }

    struct Pick {
        double objective = -1.0;
        double rate = 0.0;
        double sigma2 = 0.0;
        double ln_x = -kInf;  // ln of the gain threshold (2^{2R}-1)/q1
        bool zero_rate = false;
    } best;

    for (const Candidate& cand : candidates) {
        const double t = exp2m1_rate(cand.rate);
        double ln_x = -kInf;
        double pr_rate_carried = 1.0;
        const bool zero_rate = !(t > 0.0);
        if (!zero_rate) {
            const double ln_q1 = solve_q1_log_cached(cand.rate, channel, sys.p_avg);
            ln_x = std::log(t) - ln_q1;
            pr_rate_carried = pr_gain_at_least(channel, ln_x);
        }
        const double pr_src_residual = source.pr_variance_above(cand.sigma2);
        const double objective = pr_rate_carried * (pr_above - pr_src_residual);
        if (objective > best.objective) {
            best = {objective, cand.rate, cand.sigma2, ln_x, zero_rate};
        }
    }

    const double pr_src_residual = source.pr_variance_above(best.sigma2);
    if (best.zero_rate) {
        sol.p_dout = pr_src_residual;
        sol.ln_p_dout = pr_src_residual > 0.0 ? std::log(pr_src_residual) : -kInf;
    } else {
        const double chan_out = pr_gain_below(channel, best.ln_x);
        const double chan_ok = pr_gain_at_least(channel, best.ln_x);
        sol.p_dout = chan_out * pr_above + chan_ok * pr_src_residual;
        double ln_term1 = pr_above > 0.0
                              ? ln_pr_gain_below(channel, best.ln_x) + std::log(pr_above)
                              : -kInf;
        double ln_term2 = pr_src_residual > 0.0
                              ? std::log(chan_ok) + std::log(pr_src_residual)
                              : -kInf;
        if (channel.kind() == FadingChannel::Kind::Rayleigh && pr_src_residual > 0.0)
            ln_term2 = -std::exp(best.ln_x) + std::log(pr_src_residual);
        sol.ln_p_dout = log_sum_exp(ln_term1, ln_term2);
        if (sol.p_dout <= 0.0) sol.p_dout = std::exp(sol.ln_p_dout);
    }

    sol.r_star = best.rate;
    if (!best.zero_rate) {
        const double t = exp2m1_rate(best.rate);
        sol.ln_q_star = std::log(t) - best.ln_x;
        sol.q_star = std::exp(*sol.ln_q_star);
    }

    const double t_star = exp2m1_rate(best.rate);
    const double alpha_min = best.zero_rate ? 0.0 : std::exp(best.ln_x);
    const double r_star = best.rate;
    PowerRatePolicy policy;
    policy.power = [t_star, alpha_min](int, double alpha) {
        if (t_star <= 0.0) return 0.0;
        return alpha >= alpha_min ? t_star / alpha : 0.0;
    };
    policy.rate = [r_star](int, double) { return r_star; };
    policy.descriptor.scheme = Scheme::CopaMdo;
    policy.descriptor.r_star = r_star;
    policy.descriptor.ln_q = sol.ln_q_star;
    sol.policy = std::move(policy);
    return sol;
}

SchemeSolution solve_coracp(const SourceModel& source, const FadingChannel& channel,
                            const SystemParams& sys) {
    sys.validate();
    SchemeSolution sol;
    sol.scheme = Scheme::Coracp;

    double p_lin = 0.0, ln_p = -kInf;
    for (int s = 0; s < source.state_count(); ++s) {
        const double v = source.variance(s);
        if (v > sys.d_max && source.prob(s) > 0.0) {
            const double ln_x = std::log(required_snr(v, sys.d_max, sys.b) / sys.p_avg);
            p_lin += pr_gain_below(channel, ln_x) * source.prob(s);
            ln_p = log_sum_exp(ln_p, ln_pr_gain_below(channel, ln_x) + std::log(source.prob(s)));
        }
    }
    sol.p_dout = p_lin > 0.0 ? p_lin : std::exp(ln_p);
    sol.ln_p_dout = ln_p;

    const double p_avg = sys.p_avg;
    PowerRatePolicy policy;
    policy.power = [p_avg](int, double) { return p_avg; };
    policy.rate = [p_avg](int, double alpha) { return capacity(alpha, p_avg); };
    policy.descriptor.scheme = Scheme::Coracp;
    sol.policy = std::move(policy);
    return sol;
}

SchemeSolution solve_crcp(const SourceModel& source, const FadingChannel& channel,
                          const SystemParams& sys) {
    sys.validate();
    SchemeSolution sol;
    sol.scheme = Scheme::Crcp;

    const auto candidates = candidate_set(source, sys);
    const double pr_above = source.pr_variance_above(sys.d_max);
    const double p_avg = sys.p_avg;

    double best_objective = -1.0;
    double r_star = 0.0, best_sigma2 = kInf;
    bool best_zero_rate = true;
    if (candidates.empty()) {
        best_objective = 0.0;
    } else {
        for (const Candidate& cand : candidates) {
            const double t = exp2m1_rate(cand.rate);
            const bool zero_rate = !(t > 0.0);
            const double pr_rate_carried =
                zero_rate ? 1.0 : pr_gain_at_least(channel, std::log(t / p_avg));
            const double objective =
                pr_rate_carried * (pr_above - source.pr_variance_above(cand.sigma2));
            if (objective > best_objective) {
                best_objective = objective;
                r_star = cand.rate;
                best_sigma2 = cand.sigma2;
                best_zero_rate = zero_rate;
            }
        }
    }

    if (candidates.empty() || best_zero_rate) {
        const double residual = candidates.empty() ? 0.0 : source.pr_variance_above(best_sigma2);
        sol.p_dout = residual;
        sol.ln_p_dout = residual > 0.0 ? std::log(residual) : -kInf;
    } else {
        const double ln_x = std::log(exp2m1_rate(r_star) / p_avg);
        const double pr_src_residual = source.pr_variance_above(best_sigma2);
        const double chan_out = pr_gain_below(channel, ln_x);
        const double chan_ok = pr_gain_at_least(channel, ln_x);
        sol.p_dout = chan_out * pr_above + chan_ok * pr_src_residual;
        double ln_term1 =
            pr_above > 0.0 ? ln_pr_gain_below(channel, ln_x) + std::log(pr_above) : -kInf;
        double ln_term2 = pr_src_residual > 0.0
                              ? std::log(chan_ok) + std::log(pr_src_residual)
                              : -kInf;
        sol.ln_p_dout = log_sum_exp(ln_term1, ln_term2);
        if (sol.p_dout <= 0.0) sol.p_dout = std::exp(sol.ln_p_dout);
    }

    sol.r_star = r_star;
    PowerRatePolicy policy;
    policy.power = [p_avg](int, double) { return p_avg; };
    policy.rate = [r_star](int, double) { return r_star; };
    policy.descriptor.scheme = Scheme::Crcp;
    policy.descriptor.r_star = r_star;
    sol.policy = std::move(policy);
    return sol;
}

SchemeSolution solve(Scheme scheme, const SourceModel& source, const FadingChannel& channel,
                     const SystemParams& sys) {
    switch (scheme) {
        case Scheme::ScopaMdo: return solve_scopa(source, channel, sys);
        case Scheme::CopaMdo: return solve_copa(source, channel, sys);
        case Scheme::Coracp: return solve_coracp(source, channel, sys);
        case Scheme::Crcp: return solve_crcp(source, channel, sys);
    }
    throw std::invalid_argument("solve: unknown scheme");
}

} // namespace doutage
