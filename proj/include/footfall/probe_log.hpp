#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "footfall/csv.hpp"
#include "footfall/errors.hpp"
#include "footfall/time.hpp"

namespace footfall {

// One hashed probe request. mac_hash is an opaque token produced upstream;
// this library never sees a raw MAC.
struct ProbeEvent {
    std::string sensor_id;
    TimePoint ts = 0;
    std::string mac_hash;
    bool randomized = false;

    friend bool operator==(const ProbeEvent&, const ProbeEvent&) = default;
};

enum class LogFormat { autodetect, jsonl, csv };
enum class ParseMode { strict, lenient };

struct StudyWindow {
    TimePoint begin = 0;
    TimePoint end = 0;  // exclusive
};

struct ParseIssue {
    std::size_t line = 0;
    std::string reason;
};

struct ParseResult {
    std::vector<ProbeEvent> events;  // file order
    std::vector<ParseIssue> issues;  // lenient mode only
};

namespace detail {

inline ProbeEvent event_from_json(const nlohmann::json& j, std::size_t line_no) {
    if (!j.is_object()) throw MalformedRecord(line_no, "not a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k != "sensor_id" && k != "ts" && k != "mac_hash" && k != "randomized")
            throw UnknownField("line " + std::to_string(line_no) + ": unknown field '" + k + "'");
    }
    ProbeEvent ev;
    if (!j.contains("sensor_id") || !j["sensor_id"].is_string())
        throw MalformedRecord(line_no, "missing or non-string sensor_id");
    if (!j.contains("ts") || !j["ts"].is_string())
        throw MalformedRecord(line_no, "missing or non-string ts");
    if (!j.contains("mac_hash") || !j["mac_hash"].is_string())
        throw MalformedRecord(line_no, "missing or non-string mac_hash");
    if (!j.contains("randomized") || !j["randomized"].is_boolean())
        throw MalformedRecord(line_no, "missing or non-boolean randomized");
    ev.sensor_id = j["sensor_id"].get<std::string>();
    ev.mac_hash = j["mac_hash"].get<std::string>();
    ev.randomized = j["randomized"].get<bool>();
    try {
        ev.ts = parse_rfc3339(j["ts"].get<std::string>());
    } catch (const Error& e) {
        throw MalformedRecord(line_no, e.what());
    }
    return ev;
}

inline ProbeEvent event_from_csv(const std::vector<std::string>& fields, std::size_t line_no) {
    if (fields.size() != 4) throw MalformedRecord(line_no, "expected 4 fields");
    ProbeEvent ev;
    ev.sensor_id = fields[0];
    try {
        ev.ts = parse_rfc3339(fields[1]);
    } catch (const Error& e) {
        throw MalformedRecord(line_no, e.what());
    }
    ev.mac_hash = fields[2];
    const std::string& r = fields[3];
    if (r == "true" || r == "1")
        ev.randomized = true;
    else if (r == "false" || r == "0")
        ev.randomized = false;
    else
        throw MalformedRecord(line_no, "bad randomized flag: " + r);
    return ev;
}

inline void validate_event(const ProbeEvent& ev, std::size_t line_no,
                           const std::optional<StudyWindow>& window) {
    if (ev.sensor_id.empty()) throw MalformedRecord(line_no, "empty sensor_id");
    if (ev.mac_hash.empty()) throw MalformedRecord(line_no, "empty mac_hash");
    if (window && (ev.ts < window->begin || ev.ts >= window->end))
        throw MalformedRecord(line_no, "timestamp outside study window: " + format_rfc3339(ev.ts));
}

}  // namespace detail

// Reads a probe log (JSONL or CSV). Strict mode throws on the first bad
// line; lenient mode skips bad lines and reports them with line numbers.
inline ParseResult parse_probe_log(std::istream& in, LogFormat format = LogFormat::autodetect,
                                   ParseMode mode = ParseMode::strict,
                                   std::optional<StudyWindow> window = std::nullopt) {
    ParseResult result;
    std::string line;
    std::size_t line_no = 0;
    bool saw_csv_header = false;
    static const std::vector<std::string> kCsvHeader = {"sensor_id", "ts", "mac_hash",
                                                        "randomized"};
    while (get_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (format == LogFormat::autodetect)
            format = line.front() == '{' ? LogFormat::jsonl : LogFormat::csv;
        try {
            ProbeEvent ev;
            if (format == LogFormat::jsonl) {
                nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
                if (j.is_discarded()) throw MalformedRecord(line_no, "invalid JSON");
                ev = detail::event_from_json(j, line_no);
            } else {
                auto fields = csv::split_line(line);
                if (!saw_csv_header) {
                    if (fields != kCsvHeader)
                        throw MalformedRecord(line_no,
                                              "bad CSV header (want sensor_id,ts,mac_hash,"
                                              "randomized)");
                    saw_csv_header = true;
                    continue;
                }
                ev = detail::event_from_csv(fields, line_no);
            }
            detail::validate_event(ev, line_no, window);
            result.events.push_back(std::move(ev));
        } catch (const Error& e) {
            if (mode == ParseMode::strict) throw;
            result.issues.push_back({line_no, e.what()});
        }
    }
    return result;
}

// Per-sensor, per-interval probe and unique-device tallies, split by the
// MAC-randomization flag.
struct IntervalSummary {
    std::string sensor_id;
    TimePoint interval_start = 0;
    std::uint64_t probes_random = 0;
    std::uint64_t probes_nonrandom = 0;
    std::uint64_t unique_random = 0;
    std::uint64_t unique_nonrandom = 0;

    friend bool operator==(const IntervalSummary&, const IntervalSummary&) = default;
};

// Distinct hashes seen in one interval, kept so the long-dweller filter
// downstream can track presence across intervals. Sorted for determinism.
struct IntervalHashes {
    std::vector<std::string> random;
    std::vector<std::string> nonrandom;
};

struct SensorAggregate {
    std::string sensor_id;
    TimePoint span_start = 0;
    Duration step = kStepSeconds;
    std::vector<IntervalSummary> intervals;  // contiguous from span_start
    std::vector<IntervalHashes> hashes;      // parallel to intervals

    std::size_t slot_of(TimePoint interval_start) const {
        return static_cast<std::size_t>((interval_start - span_start) / step);
    }
    TimePoint interval_at(std::size_t slot) const {
        return span_start + static_cast<Duration>(slot) * step;
    }
};

// Buckets events into fixed intervals: floor alignment, boundary events go
// to the later interval. Zero-event intervals between a sensor's first and
// last event are materialized with all-zero counts; outside that span no
// rows exist (the sensor was not observing).
inline std::vector<SensorAggregate> aggregate_intervals(std::span<const ProbeEvent> events,
                                                        Duration step = kStepSeconds) {
    if (step <= 0 || kSecondsPerDay % step != 0)
        throw InvalidParameter("interval step must divide one day evenly");

    struct Bucket {
        std::uint64_t probes_random = 0;
        std::uint64_t probes_nonrandom = 0;
        std::vector<std::string> random;
        std::vector<std::string> nonrandom;
    };
    std::map<std::string, std::map<TimePoint, Bucket>> by_sensor;
    for (const ProbeEvent& ev : events) {
        Bucket& b = by_sensor[ev.sensor_id][floor_to(ev.ts, step)];
        if (ev.randomized) {
            ++b.probes_random;
            b.random.push_back(ev.mac_hash);
        } else {
            ++b.probes_nonrandom;
            b.nonrandom.push_back(ev.mac_hash);
        }
    }

    auto dedup = [](std::vector<std::string>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };

    std::vector<SensorAggregate> out;
    out.reserve(by_sensor.size());
    for (auto& [sensor, buckets] : by_sensor) {
        SensorAggregate agg;
        agg.sensor_id = sensor;
        agg.step = step;
        agg.span_start = buckets.begin()->first;
        TimePoint last = buckets.rbegin()->first;
        std::size_t n_slots = static_cast<std::size_t>((last - agg.span_start) / step) + 1;
        agg.intervals.reserve(n_slots);
        agg.hashes.reserve(n_slots);
        for (std::size_t slot = 0; slot < n_slots; ++slot) {
            TimePoint t = agg.interval_at(slot);
            IntervalSummary row;
            row.sensor_id = sensor;
            row.interval_start = t;
            IntervalHashes hh;
            if (auto it = buckets.find(t); it != buckets.end()) {
                Bucket& b = it->second;
                dedup(b.random);
                dedup(b.nonrandom);
                row.probes_random = b.probes_random;
                row.probes_nonrandom = b.probes_nonrandom;
                row.unique_random = b.random.size();
                row.unique_nonrandom = b.nonrandom.size();
                hh.random = std::move(b.random);
                hh.nonrandom = std::move(b.nonrandom);
            }
            agg.intervals.push_back(std::move(row));
            agg.hashes.push_back(std::move(hh));
        }
        out.push_back(std::move(agg));
    }
    return out;
}

inline std::string intervals_to_csv(std::span<const SensorAggregate> aggregates) {
    std::string out =
        "sensor_id,interval_start,probes_random,probes_nonrandom,unique_random,unique_nonrandom\n";
    for (const SensorAggregate& agg : aggregates) {
        for (const IntervalSummary& row : agg.intervals) {
            out += csv::escape(row.sensor_id);
            out += ',';
            out += format_rfc3339(row.interval_start);
            out += ',';
            out += std::to_string(row.probes_random);
            out += ',';
            out += std::to_string(row.probes_nonrandom);
            out += ',';
            out += std::to_string(row.unique_random);
            out += ',';
            out += std::to_string(row.unique_nonrandom);
            out += '\n';
        }
    }
    return out;
}

}  // namespace footfall
