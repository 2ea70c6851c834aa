#pragma once

#include "doutage/config.hpp"

#include <string>
#include <vector>

namespace doutage {

/// Short lowercase token for CSV column names and CLI labels.
std::string_view scheme_token(Scheme s);

// CSV renderers; comma separated, header row, LF line endings, doubles at
// full round-trip precision.

/// One row per scheme: scheme, R*, q*, p_dout, ln_p_dout.
std::string csv_solve(const ExperimentConfig& cfg);

/// One row per sweep point: p_bar_db, p_dout per scheme, ln_p_dout per
/// scheme. Rows ascend in power.
std::string csv_sweep(const ExperimentConfig& cfg);

/// gnuplot script rendering the sweep CSV on log-scale outage axes.
std::string plot_script_sweep(const ExperimentConfig& cfg, const std::string& csv_path);

/// Outage distortion exponent grid over b in {1,5}, d_max in {5,8} dB,
/// p_avg in {16,20} dB for the configured source and schemes.
std::string csv_exponents(const ExperimentConfig& cfg);

/// Asymptotic gain table: the three adjacent scheme pairs at reference
/// powers 25 and 20 dB.
std::string csv_gains(const ExperimentConfig& cfg);

/// Monte Carlo report per scheme: empirical vs analytic outage, power mean,
/// confidence half-widths, seed and worker count.
std::string csv_simulate(const ExperimentConfig& cfg);

/// Runs one subcommand end to end and writes its outputs; returns the list
/// of files written. out_path overrides cfg.out when nonempty.
std::vector<std::string> run_command(const std::string& subcommand,
                                     const ExperimentConfig& cfg,
                                     const std::string& out_path);

} // namespace doutage
