#include "doutage/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace doutage {

using nlohmann::json;

std::vector<double> SweepRange::points() const {
    if (!(step_db > 0.0)) throw ConfigError("config: field 'sweep.step_db' must be positive");
    if (stop_db < start_db)
        throw ConfigError("config: field 'sweep.stop_db' must not precede 'sweep.start_db'");
    std::vector<double> out;
    const int n = static_cast<int>(std::floor((stop_db - start_db) / step_db + 1e-9));
    for (int i = 0; i <= n; ++i) out.push_back(start_db + i * step_db);
    return out;
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError("config: field '" + field + "': " + what);
}

double require_number(const json& j, const std::string& field) {
    if (!j.contains(field)) fail(field, "missing");
    if (!j.at(field).is_number()) fail(field, "must be a number");
    return j.at(field).get<double>();
}

std::vector<double> number_array(const json& j, const std::string& field) {
    if (!j.is_array()) fail(field, "must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) fail(field, "must be an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: document must be a JSON object");

    ExperimentConfig cfg;

    if (!j.contains("source")) fail("source", "missing");
    const json& src = j.at("source");
    if (src.contains("label")) {
        if (!src.at("label").is_string()) fail("source.label", "must be a string");
        cfg.source_label = src.at("label").get<std::string>();
    } else if (src.contains("variances") && src.contains("pmf")) {
        cfg.source_variances = number_array(src.at("variances"), "source.variances");
        cfg.source_pmf = number_array(src.at("pmf"), "source.pmf");
    } else {
        fail("source", "needs either 'label' or both 'variances' and 'pmf'");
    }

    if (j.contains("channel")) {
        const json& ch = j.at("channel");
        std::string kind = ch.value("kind", std::string("rayleigh"));
        if (kind == "rayleigh") {
            cfg.channel_rayleigh = true;
        } else if (kind == "custom") {
            cfg.channel_rayleigh = false;
            if (!ch.contains("alpha_grid") || !ch.contains("pdf"))
                fail("channel", "custom channel needs 'alpha_grid' and 'pdf' arrays");
            cfg.channel_alpha_grid = number_array(ch.at("alpha_grid"), "channel.alpha_grid");
            cfg.channel_pdf = number_array(ch.at("pdf"), "channel.pdf");
        } else {
            fail("channel.kind", "must be 'rayleigh' or 'custom'");
        }
    }

    if (j.contains("b")) {
        if (!j.at("b").is_number_integer() || j.at("b").get<long long>() < 1)
            fail("b", "must be a positive integer");
        cfg.b = j.at("b").get<int>();
    }
    cfg.d_max_db = require_number(j, "d_max_db");

    if (j.contains("p_avg_db")) cfg.p_avg_db = require_number(j, "p_avg_db");
    if (j.contains("sweep")) {
        const json& sw = j.at("sweep");
        SweepRange range;
        range.start_db = require_number(sw, "start_db");
        range.stop_db = require_number(sw, "stop_db");
        range.step_db = require_number(sw, "step_db");
        if (!(range.step_db > 0.0)) fail("sweep.step_db", "must be positive");
        if (range.stop_db < range.start_db) fail("sweep.stop_db", "must be >= sweep.start_db");
        cfg.sweep = range;
    }
    if (!cfg.p_avg_db && !cfg.sweep) fail("p_avg_db", "either 'p_avg_db' or 'sweep' is required");

    if (j.contains("schemes")) {
        if (!j.at("schemes").is_array()) fail("schemes", "must be an array of scheme names");
        cfg.schemes.clear();
        for (const auto& v : j.at("schemes")) {
            if (!v.is_string()) fail("schemes", "must be an array of scheme names");
            const auto parsed = parse_scheme(v.get<std::string>());
            if (!parsed)
                fail("schemes", "unknown scheme '" + v.get<std::string>() +
                                    "' (expected SCOPA-MDO, COPA-MDO, CORACP or CRCP)");
            cfg.schemes.push_back(*parsed);
        }
        if (cfg.schemes.empty()) fail("schemes", "must not be empty");
    }

    if (j.contains("trials")) {
        if (!j.at("trials").is_number_integer() || j.at("trials").get<long long>() < 1)
            fail("trials", "must be a positive integer");
        cfg.trials = j.at("trials").get<std::uint64_t>();
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer()) fail("seed", "must be an integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("workers")) {
        if (!j.at("workers").is_number_integer() || j.at("workers").get<long long>() < 1)
            fail("workers", "must be a positive integer");
        cfg.workers = j.at("workers").get<int>();
    }
    if (j.contains("out")) {
        if (!j.at("out").is_string()) fail("out", "must be a string path");
        cfg.out = j.at("out").get<std::string>();
    }

    // Validate the models eagerly so config errors surface with exit code 2
    // rather than as numeric failures mid-run.
    try {
        cfg.make_source();
        cfg.make_channel();
        SystemParams sys;
        sys.b = cfg.b;
        sys.d_max = db_to_linear(cfg.d_max_db);
        sys.p_avg = 1.0;
        sys.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json_text(buffer.str());
}

std::string ExperimentConfig::to_json_text() const {
    json j;
    if (source_label) {
        j["source"] = {{"label", *source_label}};
    } else {
        j["source"] = {{"variances", source_variances}, {"pmf", source_pmf}};
    }
    if (channel_rayleigh) {
        j["channel"] = {{"kind", "rayleigh"}};
    } else {
        j["channel"] = {{"kind", "custom"},
                        {"alpha_grid", channel_alpha_grid},
                        {"pdf", channel_pdf}};
    }
    j["b"] = b;
    j["d_max_db"] = d_max_db;
    if (p_avg_db) j["p_avg_db"] = *p_avg_db;
    if (sweep)
        j["sweep"] = {{"start_db", sweep->start_db},
                      {"stop_db", sweep->stop_db},
                      {"step_db", sweep->step_db}};
    std::vector<std::string> names;
    for (Scheme s : schemes) names.emplace_back(scheme_name(s));
    j["schemes"] = names;
    j["trials"] = trials;
    j["seed"] = seed;
    j["workers"] = workers;
    if (!out.empty()) j["out"] = out;
    return j.dump(2) + "\n";
}

SourceModel ExperimentConfig::make_source() const {
    if (source_label) return build_experimental_source(*source_label);
    return SourceModel(source_variances, source_pmf);
}

FadingChannel ExperimentConfig::make_channel() const {
    if (channel_rayleigh) return FadingChannel::rayleigh();
    return FadingChannel::tabulated(channel_alpha_grid, channel_pdf);
}

SystemParams ExperimentConfig::make_params(double p_avg_db_value) const {
    SystemParams sys;
    sys.b = b;
    sys.d_max = db_to_linear(d_max_db);
    sys.p_avg = db_to_linear(p_avg_db_value);
    sys.validate();
    return sys;
}

double ExperimentConfig::single_p_avg_db() const {
    if (!p_avg_db)
        throw ConfigError("config: field 'p_avg_db': this command needs a single power point");
    return *p_avg_db;
}

} // namespace doutage
