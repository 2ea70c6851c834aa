#pragma once

#include "doutage/schemes.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace doutage {

/// Raised for malformed or inconsistent experiment configuration; the
/// message names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SweepRange {
    double start_db = 0.0;
    double stop_db = 0.0;
    double step_db = 1.0;

    std::vector<double> points() const;
};

/// One experiment description, loaded from a JSON document. dB-valued fields
/// carry a _db suffix; everything else is linear scale.
///
/// {
///   "source":  {"label": "G2"}            or {"variances": [...], "pmf": [...]},
///   "channel": {"kind": "rayleigh"}       or {"kind": "custom",
///                                             "alpha_grid": [...], "pdf": [...]},
///   "b": 1,
///   "d_max_db": 8.0,
///   "p_avg_db": 10.0,                     or "sweep": {"start_db", "stop_db", "step_db"},
///   "schemes": ["SCOPA-MDO", "COPA-MDO", "CORACP", "CRCP"],
///   "trials": 1000000, "seed": 1, "workers": 1,
///   "out": "results.csv"
/// }
struct ExperimentConfig {
    std::optional<std::string> source_label;
    std::vector<double> source_variances;  // used when no label is given
    std::vector<double> source_pmf;

    bool channel_rayleigh = true;
    std::vector<double> channel_alpha_grid;
    std::vector<double> channel_pdf;

    int b = 1;
    double d_max_db = 0.0;
    std::optional<double> p_avg_db;
    std::optional<SweepRange> sweep;

    std::vector<Scheme> schemes{Scheme::ScopaMdo, Scheme::CopaMdo, Scheme::Coracp,
                                Scheme::Crcp};
    std::uint64_t trials = 1000000;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out;

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_file(const std::string& path);
    std::string to_json_text() const;

    SourceModel make_source() const;
    FadingChannel make_channel() const;
    SystemParams make_params(double p_avg_db_value) const;
    /// Single-power value; throws ConfigError when only a sweep is present.
    double single_p_avg_db() const;
};

} // namespace doutage
