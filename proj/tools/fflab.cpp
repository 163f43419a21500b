// footfall-lab command line: turns raw probe-request logs into cleaned
// footfall series and runs the pairwise flow, quadrant, and route-score
// analyses. Subcommands share one flat config file; flags override it and
// the effective settings are echoed next to every output.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "footfall/footfall.hpp"

namespace fs = std::filesystem;
using namespace footfall;

namespace {

int log_level() {
    static int level = [] {
        const char* env = std::getenv("FOOTFALL_LAB_LOG");
        std::string v = env ? env : "warn";
        if (v == "error") return 0;
        if (v == "warn") return 1;
        if (v == "info") return 2;
        if (v == "debug") return 3;
        return 1;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 2) std::cerr << "[info] " << msg << "\n";
}

void log_warn(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[warn] " << msg << "\n";
}

std::string error_name(const Error& e) {
    if (dynamic_cast<const MalformedRecord*>(&e)) return "MalformedRecord";
    if (dynamic_cast<const UnknownField*>(&e)) return "UnknownField";
    if (dynamic_cast<const WindowNotMultipleOfStep*>(&e)) return "WindowNotMultipleOfStep";
    if (dynamic_cast<const MismatchedInterval*>(&e)) return "MismatchedInterval";
    if (dynamic_cast<const GridMismatch*>(&e)) return "GridMismatch";
    if (dynamic_cast<const InsufficientData*>(&e)) return "InsufficientData";
    if (dynamic_cast<const TooShort*>(&e)) return "TooShort";
    if (dynamic_cast<const ContainsMissing*>(&e)) return "ContainsMissing";
    if (dynamic_cast<const ConstantInput*>(&e)) return "ConstantInput";
    if (dynamic_cast<const LengthMismatch*>(&e)) return "LengthMismatch";
    if (dynamic_cast<const NoOverlap*>(&e)) return "NoOverlap";
    if (dynamic_cast<const EmptyInput*>(&e)) return "EmptyInput";
    if (dynamic_cast<const InvalidParameter*>(&e)) return "InvalidParameter";
    if (dynamic_cast<const ParameterMismatch*>(&e)) return "ParameterMismatch";
    if (dynamic_cast<const OutOfRange*>(&e)) return "OutOfRange";
    if (dynamic_cast<const ZeroDistanceStep*>(&e)) return "ZeroDistanceStep";
    if (dynamic_cast<const InvalidScenario*>(&e)) return "InvalidScenario";
    if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
    if (dynamic_cast<const IoError*>(&e)) return "IoError";
    return "Error";
}

// CLI flags land here; only the ones the user actually passed override the
// config file.
struct Overrides {
    std::optional<std::string> input, pairs, routes, scenario, out_dir, strategy, timezone;
    std::optional<Duration> step_seconds;
    std::optional<int> max_gap_minutes, bins, surrogates, jobs;
    std::optional<std::size_t> lag;
    std::optional<double> alpha, epsilon_bits, coverage_threshold;
    std::optional<double> preferred_direction_threshold;
    std::optional<std::uint64_t> seed;
    // subcommand-specific
    std::string format = "auto";
    bool lenient = false;
    std::string pair;    // te: "A,B"
    std::string sensor;  // decompose
    std::size_t period = 288;
};

PipelineConfig build_config(const std::string& config_path, const Overrides& ov) {
    PipelineConfig cfg;
    if (!config_path.empty()) apply_config_text(cfg, read_file(config_path));
    if (ov.input) cfg.input = *ov.input;
    if (ov.pairs) cfg.pairs = *ov.pairs;
    if (ov.routes) cfg.routes = *ov.routes;
    if (ov.scenario) cfg.scenario = *ov.scenario;
    if (ov.out_dir) cfg.out_dir = *ov.out_dir;
    if (ov.step_seconds) cfg.step_seconds = *ov.step_seconds;
    if (ov.max_gap_minutes) cfg.max_gap_minutes = *ov.max_gap_minutes;
    if (ov.bins) cfg.bins = *ov.bins;
    if (ov.strategy) cfg.strategy = *ov.strategy;
    if (ov.lag) cfg.lag = *ov.lag;
    if (ov.surrogates) cfg.surrogates = *ov.surrogates;
    if (ov.alpha) cfg.alpha = *ov.alpha;
    if (ov.epsilon_bits) cfg.epsilon_bits = *ov.epsilon_bits;
    if (ov.coverage_threshold) cfg.coverage_threshold = *ov.coverage_threshold;
    if (ov.preferred_direction_threshold)
        cfg.preferred_direction_threshold = *ov.preferred_direction_threshold;
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.timezone) cfg.timezone = *ov.timezone;
    if (ov.jobs) cfg.jobs = *ov.jobs;
    validate_config(cfg);
    return cfg;
}

FlowParams flow_params(const PipelineConfig& cfg) {
    FlowParams p;
    p.bins = cfg.bins;
    p.strategy = cfg.bin_strategy();
    p.lag = cfg.lag;
    p.n_surrogates = cfg.surrogates;
    p.alpha = cfg.alpha;
    p.epsilon_bits = cfg.epsilon_bits;
    p.coverage_threshold = cfg.coverage_threshold;
    p.seed = cfg.seed;
    return p;
}

void write_output(const PipelineConfig& cfg, const std::string& name,
                  const std::string& content) {
    fs::path path = fs::path(cfg.out_dir) / name;
    write_file_atomic(path, content);
    log_info("wrote " + path.string());
}

void echo_config(const PipelineConfig& cfg) {
    write_output(cfg, "effective_config.txt", dump_config(cfg));
}

std::string require_path(const std::string& value, const char* key) {
    if (value.empty()) throw ConfigError(std::string(key) + ": no path configured");
    if (!fs::exists(value)) throw IoError(std::string(key) + ": no such file: " + value);
    return value;
}

ParseResult load_probe_log(const PipelineConfig& cfg, const Overrides& ov) {
    auto path = require_path(cfg.input, "input");
    LogFormat format = LogFormat::autodetect;
    if (ov.format == "jsonl") format = LogFormat::jsonl;
    else if (ov.format == "csv") format = LogFormat::csv;
    else if (ov.format != "auto") throw ConfigError("format: want auto, jsonl or csv");
    std::ifstream in = open_input(path);
    ParseResult parsed =
        parse_probe_log(in, format, ov.lenient ? ParseMode::lenient : ParseMode::strict);
    if (!parsed.issues.empty())
        log_warn(std::to_string(parsed.issues.size()) + " malformed lines skipped");
    log_info("parsed " + std::to_string(parsed.events.size()) + " events from " + path);
    return parsed;
}

std::string issues_to_csv(const std::vector<ParseIssue>& issues) {
    std::string out = "line,reason\n";
    for (const auto& issue : issues) {
        out += std::to_string(issue.line);
        out += ',';
        out += csv::escape(issue.reason);
        out += '\n';
    }
    return out;
}

std::vector<FootfallSeries> load_footfall(const PipelineConfig& cfg) {
    auto path = require_path(cfg.input, "input");
    std::ifstream in = open_input(path);
    return footfall_from_csv(in, cfg.step_seconds);
}

std::vector<PairGeometry> load_pairs(const PipelineConfig& cfg) {
    auto path = require_path(cfg.pairs, "pairs");
    std::ifstream in = open_input(path);
    return geometry_from_csv(in);
}

int run_ingest(const PipelineConfig& cfg, const Overrides& ov) {
    echo_config(cfg);
    ParseResult parsed = load_probe_log(cfg, ov);
    auto aggregates = aggregate_intervals(parsed.events, cfg.step_seconds);
    write_output(cfg, "intervals.csv", intervals_to_csv(aggregates));
    if (ov.lenient) write_output(cfg, "parse_issues.csv", issues_to_csv(parsed.issues));
    return 0;
}

int run_clean(const PipelineConfig& cfg, const Overrides& ov) {
    echo_config(cfg);
    ParseResult parsed = load_probe_log(cfg, ov);
    auto series = clean_all(parsed.events, cfg.step_seconds, 1800, cfg.utc_offset(), cfg.jobs);
    write_output(cfg, "footfall.csv", footfall_to_csv(series));
    return 0;
}

int run_impute(const PipelineConfig& cfg) {
    echo_config(cfg);
    auto series = load_footfall(cfg);
    auto imputed = impute_all(series, static_cast<Duration>(cfg.max_gap_minutes) * 60, cfg.jobs);
    write_output(cfg, "footfall_imputed.csv", footfall_to_csv(imputed));
    return 0;
}

int run_decompose(const PipelineConfig& cfg, const Overrides& ov) {
    echo_config(cfg);
    auto series = load_footfall(cfg);
    const FootfallSeries* chosen = nullptr;
    if (!ov.sensor.empty()) {
        chosen = &series_for(series, ov.sensor);
    } else if (series.size() == 1) {
        chosen = &series[0];
    } else {
        throw ConfigError("sensor: required when the input holds several sensors");
    }
    // trim edge MISSING; the decomposition needs a gap-free interior
    std::size_t lo = 0, hi = chosen->size();
    while (lo < hi && !chosen->values[lo]) ++lo;
    while (hi > lo && !chosen->values[hi - 1]) --hi;
    std::vector<double> observed;
    observed.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
        if (!chosen->values[i])
            throw ContainsMissing("decompose: interior gap at slot " + std::to_string(i) +
                                  "; run impute first");
        observed.push_back(*chosen->values[i]);
    }
    Decomposition d = decompose_additive(observed, ov.period);
    write_output(cfg, "decomposition_" + chosen->sensor_id + ".csv",
                 decomposition_to_csv(observed, d));
    return 0;
}

int run_te(const PipelineConfig& cfg, const Overrides& ov) {
    echo_config(cfg);
    auto series = load_footfall(cfg);
    std::size_t comma = ov.pair.find(',');
    if (ov.pair.empty() || comma == std::string::npos)
        throw ConfigError("pair: want --pair SENSOR_A,SENSOR_B");
    PairGeometry geom{ov.pair.substr(0, comma), ov.pair.substr(comma + 1), 1.0};
    std::vector<PairGeometry> pairs{geom};
    auto table = compute_pair_flows(series, pairs, flow_params(cfg), cfg.utc_offset(), cfg.jobs);
    write_output(cfg, "te.csv", flows_to_csv(table));
    return 0;
}

int run_flows(const PipelineConfig& cfg) {
    echo_config(cfg);
    auto series = load_footfall(cfg);
    auto pairs = load_pairs(cfg);
    auto table = compute_pair_flows(series, pairs, flow_params(cfg), cfg.utc_offset(), cfg.jobs);
    write_output(cfg, "flows.csv", flows_to_csv(table));
    write_output(cfg, "preferred.csv",
                 preferred_to_csv(table, cfg.preferred_direction_threshold));
    write_output(cfg, "skipped.csv", skips_to_csv(table));
    return 0;
}

int run_quadrants(const PipelineConfig& cfg) {
    echo_config(cfg);
    auto series = load_footfall(cfg);
    auto pairs = load_pairs(cfg);
    QuadrantCenter center{cfg.quadrant_center_seconds, cfg.quadrant_center_correlation};
    auto table = compute_pair_quadrants(series, pairs, center, cfg.coverage_threshold,
                                        cfg.utc_offset(), cfg.jobs);
    write_output(cfg, "quadrants.csv", quadrants_to_csv(table));
    write_output(cfg, "quadrants_max.csv", quadrant_max_to_csv(table));
    return 0;
}

int run_route_score(const PipelineConfig& cfg) {
    echo_config(cfg);
    auto path = require_path(cfg.routes, "routes");
    nlohmann::json j = nlohmann::json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw IoError("routes: invalid JSON: " + path);
    std::vector<RouteFile> files;
    if (j.is_array())
        for (const auto& item : j) files.push_back(parse_route_file(item));
    else
        files.push_back(parse_route_file(j));

    std::string scores = "pair_id,score,duration_s,n_steps\n";
    std::string terms = "pair_id,word,weight,distance_m,term\n";
    for (const RouteFile& file : files) {
        const Route& fastest = select_fastest_route(file.routes);
        RouteScore score = route_score(fastest.steps);
        scores += csv::escape(file.pair_id);
        scores += ',';
        scores += format_count(score.value);
        scores += ',';
        scores += format_count(fastest.duration_s);
        scores += ',';
        scores += std::to_string(fastest.steps.size());
        scores += '\n';
        for (const auto& term : score.contributions) {
            terms += csv::escape(file.pair_id);
            terms += ',';
            terms += term.word;
            terms += ',';
            terms += std::to_string(term.weight);
            terms += ',';
            terms += format_count(term.distance_m);
            terms += ',';
            terms += format_count(term.term);
            terms += '\n';
        }
    }
    write_output(cfg, "route_scores.csv", scores);
    write_output(cfg, "route_terms.csv", terms);
    return 0;
}

int run_synth(const PipelineConfig& cfg, const Overrides& ov) {
    echo_config(cfg);
    auto path = require_path(cfg.scenario, "scenario");
    nlohmann::json j = nlohmann::json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw IoError("scenario: invalid JSON: " + path);
    SynthScenario sc = scenario_from_json(j);
    if (ov.seed) sc.seed = *ov.seed;
    SynthOutput out = generate_probe_stream(sc);
    log_info("generated " + std::to_string(out.events.size()) + " events");
    write_output(cfg, "probes.jsonl", events_to_jsonl(out.events));
    write_output(cfg, "truth_counts.csv", truth_counts_to_csv(out.truth));
    write_output(cfg, "truth_directions.csv", planted_directions_to_csv(out.truth));
    // convenience geometry for the coupled pairs
    std::vector<PairGeometry> pairs;
    for (const Coupling& c : sc.couplings) pairs.push_back({c.source, c.target, 120.0});
    if (!pairs.empty()) write_output(cfg, "pairs.csv", geometry_to_csv(pairs));
    return 0;
}

int run_pipeline(const PipelineConfig& cfg, const Overrides& ov) {
    echo_config(cfg);
    ParseResult parsed = load_probe_log(cfg, ov);
    auto series = clean_all(parsed.events, cfg.step_seconds, 1800, cfg.utc_offset(), cfg.jobs);
    write_output(cfg, "footfall.csv", footfall_to_csv(series));
    auto imputed = impute_all(series, static_cast<Duration>(cfg.max_gap_minutes) * 60, cfg.jobs);
    write_output(cfg, "footfall_imputed.csv", footfall_to_csv(imputed));
    auto pairs = load_pairs(cfg);
    auto table = compute_pair_flows(imputed, pairs, flow_params(cfg), cfg.utc_offset(),
                                    cfg.jobs);
    write_output(cfg, "flows.csv", flows_to_csv(table));
    write_output(cfg, "preferred.csv",
                 preferred_to_csv(table, cfg.preferred_direction_threshold));
    write_output(cfg, "skipped.csv", skips_to_csv(table));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"footfall-lab: Wi-Fi probe-log footfall and information-flow analytics"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    Overrides ov;
    app.add_option("--config", config_path, "flat key=value config file");
    app.add_option("--out-dir", ov.out_dir, "output directory");
    app.add_option("--seed", ov.seed, "RNG seed");
    app.add_option("--jobs", ov.jobs, "worker threads for pair/series work");

    auto add_analysis_flags = [&](CLI::App* sub) {
        sub->add_option("--bins", ov.bins, "discretization bins");
        sub->add_option("--strategy", ov.strategy, "equal_frequency or equal_width");
        sub->add_option("--lag", ov.lag, "TE lag in slots");
        sub->add_option("--surrogates", ov.surrogates, "surrogate count");
        sub->add_option("--alpha", ov.alpha, "significance level");
        sub->add_option("--epsilon-bits", ov.epsilon_bits, "TE tie tolerance");
        sub->add_option("--coverage-threshold", ov.coverage_threshold, "per-day coverage gate");
        sub->add_option("--timezone", ov.timezone, "UTC or fixed offset +HH:MM");
    };

    auto* ingest = app.add_subcommand("ingest", "parse a probe log into interval summaries");
    ingest->add_option("--input", ov.input, "probe log (JSONL or CSV)");
    ingest->add_option("--format", ov.format, "auto, jsonl or csv");
    ingest->add_flag("--lenient", ov.lenient, "skip malformed lines, reporting them");
    ingest->add_option("--step-seconds", ov.step_seconds, "interval step");

    auto* clean = app.add_subcommand("clean", "probe log -> cleaned footfall series");
    clean->add_option("--input", ov.input, "probe log (JSONL or CSV)");
    clean->add_option("--format", ov.format, "auto, jsonl or csv");
    clean->add_flag("--lenient", ov.lenient, "skip malformed lines");
    clean->add_option("--step-seconds", ov.step_seconds, "interval step");
    clean->add_option("--timezone", ov.timezone, "UTC or fixed offset +HH:MM");

    auto* impute = app.add_subcommand("impute", "fill short gaps in a footfall CSV");
    impute->add_option("--input", ov.input, "footfall CSV");
    impute->add_option("--max-gap-minutes", ov.max_gap_minutes, "longest gap to fill");

    auto* decompose = app.add_subcommand("decompose", "additive trend/seasonal/residual split");
    decompose->add_option("--input", ov.input, "footfall CSV");
    decompose->add_option("--sensor", ov.sensor, "sensor to decompose");
    decompose->add_option("--period", ov.period, "seasonal period in slots");

    auto* te = app.add_subcommand("te", "daily transfer entropy for one sensor pair");
    te->add_option("--input", ov.input, "footfall CSV");
    te->add_option("--pair", ov.pair, "SENSOR_A,SENSOR_B")->required();
    add_analysis_flags(te);

    auto* flows = app.add_subcommand("flows", "daily flow codes for all configured pairs");
    flows->add_option("--input", ov.input, "footfall CSV");
    flows->add_option("--pairs", ov.pairs, "geometry CSV");
    flows->add_option("--preferred-direction-threshold", ov.preferred_direction_threshold,
                      "percentage-point gap for a preferred direction");
    add_analysis_flags(flows);

    auto* quadrants = app.add_subcommand("quadrants", "correlation-distance quadrant occupancy");
    quadrants->add_option("--input", ov.input, "footfall CSV");
    quadrants->add_option("--pairs", ov.pairs, "geometry CSV");
    quadrants->add_option("--coverage-threshold", ov.coverage_threshold, "per-day coverage gate");
    quadrants->add_option("--timezone", ov.timezone, "UTC or fixed offset +HH:MM");

    auto* route = app.add_subcommand("route-score", "complexity score for cached routes");
    route->add_option("--routes", ov.routes, "route JSON file");

    auto* synth = app.add_subcommand("synth", "generate a synthetic probe stream");
    synth->add_option("--scenario", ov.scenario, "scenario JSON file");

    auto* pipeline =
        app.add_subcommand("pipeline", "ingest -> clean -> impute -> te -> flows in one run");
    pipeline->add_option("--input", ov.input, "probe log (JSONL or CSV)");
    pipeline->add_option("--pairs", ov.pairs, "geometry CSV");
    pipeline->add_option("--format", ov.format, "auto, jsonl or csv");
    pipeline->add_flag("--lenient", ov.lenient, "skip malformed lines");
    pipeline->add_option("--step-seconds", ov.step_seconds, "interval step");
    pipeline->add_option("--max-gap-minutes", ov.max_gap_minutes, "longest gap to fill");
    pipeline->add_option("--preferred-direction-threshold", ov.preferred_direction_threshold,
                         "percentage-point gap for a preferred direction");
    add_analysis_flags(pipeline);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        PipelineConfig cfg = build_config(config_path, ov);
        if (ingest->parsed()) return run_ingest(cfg, ov);
        if (clean->parsed()) return run_clean(cfg, ov);
        if (impute->parsed()) return run_impute(cfg);
        if (decompose->parsed()) return run_decompose(cfg, ov);
        if (te->parsed()) return run_te(cfg, ov);
        if (flows->parsed()) return run_flows(cfg);
        if (quadrants->parsed()) return run_quadrants(cfg);
        if (route->parsed()) return run_route_score(cfg);
        if (synth->parsed()) return run_synth(cfg, ov);
        if (pipeline->parsed()) return run_pipeline(cfg, ov);
        throw ConfigError("no subcommand selected");
    } catch (const Error& e) {
        nlohmann::json err{{"error", error_name(e)}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        nlohmann::json err{{"error", "InternalError"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
}
