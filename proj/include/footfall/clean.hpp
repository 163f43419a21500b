#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "footfall/csv.hpp"
#include "footfall/errors.hpp"
#include "footfall/probe_log.hpp"
#include "footfall/time.hpp"

namespace footfall {

// Unique-device counts after long-dweller suppression.
struct FilteredCounts {
    std::string sensor_id;
    TimePoint interval_start = 0;
    std::uint64_t filtered_random = 0;
    std::uint64_t filtered_nonrandom = 0;

    friend bool operator==(const FilteredCounts&, const FilteredCounts&) = default;
};

// Suppresses devices that sit in range across back-to-back intervals: a
// hash present in a run of consecutive intervals counts once per
// window-sized block of the run (so a device parked for hours still
// registers once per half hour, not once per interval). Randomized and
// non-randomized hashes are handled independently.
inline std::vector<FilteredCounts> remove_long_dwellers(const SensorAggregate& agg,
                                                        Duration window = 1800) {
    if (window <= 0 || window % agg.step != 0)
        throw WindowNotMultipleOfStep("dweller window must be a positive multiple of the step");
    const std::size_t block_slots = static_cast<std::size_t>(window / agg.step);
    const std::size_t n = agg.intervals.size();

    std::vector<FilteredCounts> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].sensor_id = agg.sensor_id;
        out[i].interval_start = agg.interval_at(i);
    }

    auto run_filter = [&](auto member, auto counter) {
        std::unordered_map<std::string_view, std::vector<std::size_t>> presence;
        for (std::size_t i = 0; i < n; ++i)
            for (const std::string& h : agg.hashes[i].*member) presence[h].push_back(i);
        for (auto& [hash, slots] : presence) {
            std::size_t run_start = slots.front();
            std::size_t prev = slots.front();
            out[run_start].*counter += 1;
            for (std::size_t k = 1; k < slots.size(); ++k) {
                std::size_t s = slots[k];
                if (s != prev + 1) run_start = s;  // new run
                if ((s - run_start) % block_slots == 0) out[s].*counter += 1;
                prev = s;
            }
        }
    };
    run_filter(&IntervalHashes::random, &FilteredCounts::filtered_random);
    run_filter(&IntervalHashes::nonrandom, &FilteredCounts::filtered_nonrandom);
    return out;
}

// Scales the randomized unique count by the survival ratio the dweller
// filter produced on the non-randomized stream. Randomized hashes rotate
// every interval, so the filter cannot act on them directly; the
// non-randomized ratio is the best available stand-in. With no
// non-randomized devices in the interval the ratio is undefined and the
// count passes through unadjusted.
inline double adjust_randomized(const FilteredCounts& filtered, const IntervalSummary& summary) {
    if (filtered.sensor_id != summary.sensor_id ||
        filtered.interval_start != summary.interval_start)
        throw MismatchedInterval("adjust_randomized: sensor/interval mismatch");
    if (summary.unique_nonrandom == 0) return static_cast<double>(summary.unique_random);
    return static_cast<double>(summary.unique_random) *
           (static_cast<double>(filtered.filtered_nonrandom) /
            static_cast<double>(summary.unique_nonrandom));
}

inline std::vector<double> adjust_randomized_all(std::span<const FilteredCounts> filtered,
                                                 const SensorAggregate& agg) {
    if (filtered.size() != agg.intervals.size())
        throw GridMismatch("adjust_randomized_all: grid size mismatch");
    std::vector<double> out(filtered.size());
    for (std::size_t i = 0; i < filtered.size(); ++i)
        out[i] = adjust_randomized(filtered[i], agg.intervals[i]);
    return out;
}

// Fixed-step count series; slots are either a non-negative real count or
// missing (sensor not observing).
struct FootfallSeries {
    std::string sensor_id;
    TimePoint start = 0;
    Duration step = kStepSeconds;
    std::vector<std::optional<double>> values;

    std::size_t size() const { return values.size(); }
    TimePoint slot_time(std::size_t i) const {
        return start + static_cast<Duration>(i) * step;
    }
    std::size_t present_count() const {
        std::size_t n = 0;
        for (const auto& v : values) n += v.has_value();
        return n;
    }
};

// Final estimate per interval: filtered non-randomized plus adjusted
// randomized. A span wider than the observed one yields MISSING slots
// outside it; by default the series covers exactly the observed span.
inline FootfallSeries estimate_footfall(
    std::span<const FilteredCounts> filtered, std::span<const double> adjusted_random,
    std::optional<std::pair<TimePoint, TimePoint>> span = std::nullopt,
    Duration step = kStepSeconds) {
    if (filtered.size() != adjusted_random.size())
        throw GridMismatch("estimate_footfall: filtered/adjusted size mismatch");
    for (std::size_t i = 1; i < filtered.size(); ++i)
        if (filtered[i].interval_start != filtered[i - 1].interval_start + step)
            throw GridMismatch("estimate_footfall: filtered grid not contiguous");

    FootfallSeries series;
    series.step = step;
    if (!filtered.empty()) series.sensor_id = filtered.front().sensor_id;

    TimePoint begin, end;  // [begin, end)
    if (span) {
        begin = span->first;
        end = span->second;
        if (!is_aligned(begin, step) || !is_aligned(end, step) || end < begin)
            throw GridMismatch("estimate_footfall: span not aligned to step");
    } else if (filtered.empty()) {
        return series;
    } else {
        begin = filtered.front().interval_start;
        end = filtered.back().interval_start + step;
    }

    series.start = begin;
    series.values.assign(static_cast<std::size_t>((end - begin) / step), std::nullopt);
    for (std::size_t i = 0; i < filtered.size(); ++i) {
        TimePoint t = filtered[i].interval_start;
        if (t < begin || t >= end) continue;
        std::size_t slot = static_cast<std::size_t>((t - begin) / step);
        series.values[slot] =
            static_cast<double>(filtered[i].filtered_nonrandom) + adjusted_random[i];
    }
    return series;
}

// Steps 4-5 in one call: dweller filter, randomized adjustment, estimate.
inline FootfallSeries clean_sensor(const SensorAggregate& agg, Duration window = 1800,
                                   std::optional<std::pair<TimePoint, TimePoint>> span =
                                       std::nullopt) {
    std::vector<FilteredCounts> filtered = remove_long_dwellers(agg, window);
    std::vector<double> adjusted = adjust_randomized_all(filtered, agg);
    return estimate_footfall(filtered, adjusted, span, agg.step);
}

inline std::string footfall_to_csv(std::span<const FootfallSeries> series) {
    std::string out = "sensor_id,interval_start,count\n";
    for (const FootfallSeries& s : series) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            out += csv::escape(s.sensor_id);
            out += ',';
            out += format_rfc3339(s.slot_time(i));
            out += ',';
            if (s.values[i]) out += format_count(*s.values[i]);
            out += '\n';
        }
    }
    return out;
}

// Reads the footfall CSV back. Rows may arrive in any order; absent slots
// inside a sensor's [first,last] row range are MISSING.
inline std::vector<FootfallSeries> footfall_from_csv(std::istream& in,
                                                     Duration step = kStepSeconds) {
    std::string line;
    std::size_t line_no = 0;
    if (!get_line(in, line) || line != "sensor_id,interval_start,count")
        throw MalformedRecord(1, "bad footfall CSV header (want sensor_id,interval_start,count)");
    ++line_no;
    std::map<std::string, std::map<TimePoint, std::optional<double>>> rows;
    while (get_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = csv::split_line(line);
        if (fields.size() != 3) throw MalformedRecord(line_no, "expected 3 fields");
        TimePoint t;
        try {
            t = parse_rfc3339(fields[1]);
        } catch (const Error& e) {
            throw MalformedRecord(line_no, e.what());
        }
        if (!is_aligned(t, step))
            throw MalformedRecord(line_no, "interval_start not aligned to step");
        std::optional<double> v;
        if (!fields[2].empty()) {
            char* endp = nullptr;
            double d = std::strtod(fields[2].c_str(), &endp);
            if (endp != fields[2].c_str() + fields[2].size() || d < 0.0)
                throw MalformedRecord(line_no, "bad count: " + fields[2]);
            v = d;
        }
        rows[fields[0]][t] = v;
    }
    std::vector<FootfallSeries> out;
    out.reserve(rows.size());
    for (auto& [sensor, slots] : rows) {
        FootfallSeries s;
        s.sensor_id = sensor;
        s.step = step;
        s.start = slots.begin()->first;
        TimePoint last = slots.rbegin()->first;
        s.values.assign(static_cast<std::size_t>((last - s.start) / step) + 1, std::nullopt);
        for (const auto& [t, v] : slots)
            s.values[static_cast<std::size_t>((t - s.start) / step)] = v;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace footfall
