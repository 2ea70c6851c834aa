#include "doutage/commands.hpp"

#include "doutage/asymptotics.hpp"
#include "doutage/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace doutage {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("config: cannot write output file '" + path + "'");
    out << content;
}

std::string with_extension(const std::string& path, const std::string& ext) {
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + ext;
    return path.substr(0, dot) + ext;
}

} // namespace

std::string_view scheme_token(Scheme s) {
    switch (s) {
        case Scheme::ScopaMdo: return "scopa";
        case Scheme::CopaMdo: return "copa";
        case Scheme::Coracp: return "coracp";
        case Scheme::Crcp: return "crcp";
    }
    return "?";
}

std::string csv_solve(const ExperimentConfig& cfg) {
    const SourceModel source = cfg.make_source();
    const FadingChannel channel = cfg.make_channel();
    const SystemParams sys = cfg.make_params(cfg.single_p_avg_db());

    std::ostringstream os;
    os << "scheme,r_star,q_star,p_dout,ln_p_dout\n";
    for (Scheme s : cfg.schemes) {
        const SchemeSolution sol = solve(s, source, channel, sys);
        os << scheme_name(s) << ',' << fmt_opt(sol.r_star) << ',' << fmt_opt(sol.q_star) << ','
           << fmt(sol.p_dout) << ',' << fmt(sol.ln_p_dout) << '\n';
    }
    return os.str();
}

std::string csv_sweep(const ExperimentConfig& cfg) {
    if (!cfg.sweep) throw ConfigError("config: field 'sweep': required by the sweep command");
    const SourceModel source = cfg.make_source();
    const FadingChannel channel = cfg.make_channel();
    const std::vector<double> points = cfg.sweep->points();

    std::ostringstream os;
    os << "p_bar_db";
    for (Scheme s : cfg.schemes) os << ",p_dout_" << scheme_token(s);
    for (Scheme s : cfg.schemes) os << ",ln_p_dout_" << scheme_token(s);
    os << '\n';
    for (double p_db : points) {
        const SystemParams sys = cfg.make_params(p_db);
        std::vector<SchemeSolution> sols;
        sols.reserve(cfg.schemes.size());
        for (Scheme s : cfg.schemes) sols.push_back(solve(s, source, channel, sys));
        os << fmt(p_db);
        for (const auto& sol : sols) os << ',' << fmt(sol.p_dout);
        for (const auto& sol : sols) os << ',' << fmt(sol.ln_p_dout);
        os << '\n';
    }
    return os.str();
}

std::string plot_script_sweep(const ExperimentConfig& cfg, const std::string& csv_path) {
    std::ostringstream os;
    os << "# distortion outage probability vs average power limit\n"
       << "set datafile separator ','\n"
       << "set logscale y\n"
       << "set grid\n"
       << "set xlabel 'average power limit P (dB)'\n"
       << "set ylabel 'distortion outage probability'\n"
       << "set key bottom left\n"
       << "plot";
    for (std::size_t i = 0; i < cfg.schemes.size(); ++i) {
        if (i) os << ',';
        os << " '" << csv_path << "' using 1:" << (i + 2) << " with linespoints title '"
           << scheme_name(cfg.schemes[i]) << "'";
    }
    os << "\n";
    return os.str();
}

std::string csv_exponents(const ExperimentConfig& cfg) {
    const SourceModel source = cfg.make_source();

    std::ostringstream os;
    os << "b,d_max_db,p_avg_db,scheme,delta_od,order\n";
    for (int b : {1, 5}) {
        for (double d_max_db : {5.0, 8.0}) {
            for (double p_db : {16.0, 20.0}) {
                SystemParams sys;
                sys.b = b;
                sys.d_max = db_to_linear(d_max_db);
                sys.p_avg = db_to_linear(p_db);
                for (Scheme s : cfg.schemes) {
                    ExponentEstimate est;
                    switch (s) {
                        case Scheme::ScopaMdo: est = exponent_scopa(source, sys); break;
                        case Scheme::CopaMdo: est = exponent_copa(source, sys); break;
                        default: est = exponent_constant_power(s); break;
                    }
                    os << b << ',' << fmt(d_max_db) << ',' << fmt(p_db) << ','
                       << scheme_name(s) << ',' << fmt(est.value) << ','
                       << exponent_order_name(est.order) << '\n';
                }
            }
        }
    }
    return os.str();
}

std::string csv_gains(const ExperimentConfig& cfg) {
    const SourceModel source = cfg.make_source();
    SystemParams sys;
    sys.b = cfg.b;
    sys.d_max = db_to_linear(cfg.d_max_db);
    sys.p_avg = 1.0;

    std::ostringstream os;
    os << "scheme1,scheme2,p_bar2_db,gain_db\n";
    for (double p2_db : {25.0, 20.0}) {
        const GainResult g1 = gain_scopa_vs_copa(source, sys);
        const GainResult g2 = gain_copa_vs_coracp(source, sys, db_to_linear(p2_db));
        const GainResult g3 = gain_coracp_vs_crcp(source, sys);
        for (const GainResult& g : {g1, g2, g3}) {
            os << scheme_name(g.scheme1) << ',' << scheme_name(g.scheme2) << ',' << fmt(p2_db)
               << ',' << fmt(g.value_db) << '\n';
        }
    }
    return os.str();
}

std::string csv_simulate(const ExperimentConfig& cfg) {
    const SourceModel source = cfg.make_source();
    const FadingChannel channel = cfg.make_channel();
    const SystemParams sys = cfg.make_params(cfg.single_p_avg_db());
    if (cfg.trials < 1) throw ConfigError("config: field 'trials': must be >= 1");

    std::ostringstream os;
    os << "scheme,trials,seed,workers,outages,p_dout_hat,p_ci_halfwidth,power_mean,"
          "power_ci_halfwidth,p_dout_analytic,ln_p_dout_analytic,p_avg\n";
    for (Scheme s : cfg.schemes) {
        const SchemeSolution sol = solve(s, source, channel, sys);
        const SimReport rep =
            run_sim(sol.policy, source, channel, sys, cfg.trials, cfg.seed, cfg.workers);
        os << scheme_name(s) << ',' << rep.trials << ',' << rep.seed << ',' << rep.workers
           << ',' << rep.outages << ',' << fmt(rep.p_dout_hat) << ','
           << fmt(rep.p_ci_halfwidth) << ',' << fmt(rep.power_mean) << ','
           << fmt(rep.power_ci_halfwidth) << ',' << fmt(sol.p_dout) << ','
           << fmt(sol.ln_p_dout) << ',' << fmt(sys.p_avg) << '\n';
    }
    return os.str();
}

std::vector<std::string> run_command(const std::string& subcommand,
                                     const ExperimentConfig& cfg,
                                     const std::string& out_path) {
    std::string out = !out_path.empty() ? out_path : cfg.out;
    if (out.empty()) out = subcommand + ".csv";

    std::vector<std::string> written;
    if (subcommand == "solve") {
        write_file(out, csv_solve(cfg));
        written.push_back(out);
    } else if (subcommand == "sweep") {
        write_file(out, csv_sweep(cfg));
        written.push_back(out);
        const std::string script = with_extension(out, ".gnuplot");
        write_file(script, plot_script_sweep(cfg, out));
        written.push_back(script);
    } else if (subcommand == "exponents") {
        write_file(out, csv_exponents(cfg));
        written.push_back(out);
    } else if (subcommand == "gains") {
        write_file(out, csv_gains(cfg));
        written.push_back(out);
    } else if (subcommand == "simulate") {
        write_file(out, csv_simulate(cfg));
        written.push_back(out);
    } else {
        throw ConfigError("config: unknown subcommand '" + subcommand + "'");
    }
    return written;
}

} // namespace doutage
