#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "footfall/csv.hpp"
#include "footfall/errors.hpp"
#include "footfall/info_theory.hpp"
#include "footfall/time.hpp"

namespace footfall {

// Every tunable the pipeline accepts, with the documented defaults.
// A flat key=value config file populates this; CLI flags override it; the
// effective values are echoed next to every output for provenance.
struct PipelineConfig {
    std::string input;     // probe log or footfall CSV, per subcommand
    std::string pairs;     // PairGeometry CSV
    std::string routes;    // cached route JSON
    std::string scenario;  // synth scenario JSON
    std::string out_dir = "out";
    Duration step_seconds = kStepSeconds;
    int max_gap_minutes = 30;
    int bins = 4;
    std::string strategy = "equal_frequency";
    std::size_t lag = 1;
    int surrogates = 100;
    double alpha = 0.05;
    double epsilon_bits = 1e-3;
    double coverage_threshold = 0.9;
    double quadrant_center_seconds = 150.0;
    double quadrant_center_correlation = 0.5;
    double preferred_direction_threshold = 10.0;
    std::uint64_t seed = 0;
    std::string timezone = "UTC";
    int jobs = 1;

    BinStrategy bin_strategy() const {
        if (strategy == "equal_frequency") return BinStrategy::equal_frequency;
        if (strategy == "equal_width") return BinStrategy::equal_width;
        throw ConfigError("strategy: want equal_frequency or equal_width, got '" + strategy +
                          "'");
    }
    UtcOffset utc_offset() const { return parse_utc_offset(timezone); }
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

inline long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long long r = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw ConfigError(key + ": not an integer: '" + v + "'");
    }
}

inline double to_real(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double r = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw ConfigError(key + ": not a number: '" + v + "'");
    }
}

}  // namespace detail

// Flat key = value grammar: one pair per line, '#' comments, values
// optionally double-quoted. Unknown keys are rejected by name.
inline void apply_config_text(PipelineConfig& cfg, std::string_view text) {
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string line = detail::trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty() || line[0] == '#') {
            if (pos > text.size()) break;
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = detail::trim(std::string_view(line).substr(0, eq));
        std::string value = detail::trim(std::string_view(line).substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);

        if (key == "input") cfg.input = value;
        else if (key == "pairs") cfg.pairs = value;
        else if (key == "routes") cfg.routes = value;
        else if (key == "scenario") cfg.scenario = value;
        else if (key == "out_dir") cfg.out_dir = value;
        else if (key == "step_seconds") cfg.step_seconds = detail::to_int(key, value);
        else if (key == "max_gap_minutes") cfg.max_gap_minutes =
            static_cast<int>(detail::to_int(key, value));
        else if (key == "bins") cfg.bins = static_cast<int>(detail::to_int(key, value));
        else if (key == "strategy") cfg.strategy = value;
        else if (key == "lag") cfg.lag = static_cast<std::size_t>(detail::to_int(key, value));
        else if (key == "surrogates") cfg.surrogates =
            static_cast<int>(detail::to_int(key, value));
        else if (key == "alpha") cfg.alpha = detail::to_real(key, value);
        else if (key == "epsilon_bits") cfg.epsilon_bits = detail::to_real(key, value);
        else if (key == "coverage_threshold") cfg.coverage_threshold =
            detail::to_real(key, value);
        else if (key == "quadrant_center_seconds") cfg.quadrant_center_seconds =
            detail::to_real(key, value);
        else if (key == "quadrant_center_correlation") cfg.quadrant_center_correlation =
            detail::to_real(key, value);
        else if (key == "preferred_direction_threshold") cfg.preferred_direction_threshold =
            detail::to_real(key, value);
        else if (key == "seed") cfg.seed =
            static_cast<std::uint64_t>(detail::to_int(key, value));
        else if (key == "timezone") cfg.timezone = value;
        else if (key == "jobs") cfg.jobs = static_cast<int>(detail::to_int(key, value));
        else throw ConfigError("unknown config key '" + key + "'");
        if (pos > text.size()) break;
    }
}

inline void validate_config(const PipelineConfig& cfg) {
    auto bad = [](const std::string& why) { throw ConfigError(why); };
    if (cfg.step_seconds <= 0 || kSecondsPerDay % cfg.step_seconds != 0)
        bad("step_seconds: must divide one day evenly");
    if (cfg.max_gap_minutes < 0) bad("max_gap_minutes: must be non-negative");
    if (cfg.bins < 2 || cfg.bins > 64) bad("bins: must be in [2, 64]");
    if (cfg.lag == 0) bad("lag: must be positive");
    if (cfg.surrogates < 1) bad("surrogates: must be positive");
    if (cfg.alpha <= 0.0 || cfg.alpha >= 1.0) bad("alpha: must be in (0, 1)");
    if (cfg.epsilon_bits < 0.0) bad("epsilon_bits: must be non-negative");
    if (cfg.coverage_threshold < 0.0 || cfg.coverage_threshold > 1.0)
        bad("coverage_threshold: must be in [0, 1]");
    if (cfg.quadrant_center_seconds <= 0.0) bad("quadrant_center_seconds: must be positive");
    if (cfg.quadrant_center_correlation < -1.0 || cfg.quadrant_center_correlation > 1.0)
        bad("quadrant_center_correlation: must be in [-1, 1]");
    if (cfg.preferred_direction_threshold < 0.0 || cfg.preferred_direction_threshold > 100.0)
        bad("preferred_direction_threshold: must be in [0, 100]");
    if (cfg.jobs < 1) bad("jobs: must be positive");
    cfg.bin_strategy();
    cfg.utc_offset();
}

inline std::string dump_config(const PipelineConfig& cfg) {
    std::string out;
    auto put = [&](const char* key, const std::string& v) {
        out += key;
        out += " = ";
        out += v;
        out += '\n';
    };
    put("input", cfg.input);
    put("pairs", cfg.pairs);
    put("routes", cfg.routes);
    put("scenario", cfg.scenario);
    put("out_dir", cfg.out_dir);
    put("step_seconds", std::to_string(cfg.step_seconds));
    put("max_gap_minutes", std::to_string(cfg.max_gap_minutes));
    put("bins", std::to_string(cfg.bins));
    put("strategy", cfg.strategy);
    put("lag", std::to_string(cfg.lag));
    put("surrogates", std::to_string(cfg.surrogates));
    put("alpha", format_count(cfg.alpha));
    put("epsilon_bits", format_count(cfg.epsilon_bits));
    put("coverage_threshold", format_count(cfg.coverage_threshold));
    put("quadrant_center_seconds", format_count(cfg.quadrant_center_seconds));
    put("quadrant_center_correlation", format_count(cfg.quadrant_center_correlation));
    put("preferred_direction_threshold", format_count(cfg.preferred_direction_threshold));
    put("seed", std::to_string(cfg.seed));
    put("timezone", cfg.timezone);
    put("jobs", std::to_string(cfg.jobs));
    return out;
}

}  // namespace footfall
