#pragma once

#include <atomic>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "footfall/clean.hpp"
#include "footfall/config.hpp"
#include "footfall/csv.hpp"
#include "footfall/errors.hpp"
#include "footfall/flow.hpp"
#include "footfall/impute.hpp"
#include "footfall/probe_log.hpp"

namespace footfall {

// Runs f(0..n) across `jobs` threads with strided assignment. Work item i
// always writes result slot i, so the output is identical for any job
// count.
template <typename F>
inline void parallel_for(std::size_t n, int jobs, F&& f) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
        });
    }
    for (auto& t : pool) t.join();
}

inline std::vector<PairGeometry> geometry_from_csv(std::istream& in) {
    std::string line;
    if (!get_line(in, line) || line != "sensor_a,sensor_b,walking_seconds")
        throw MalformedRecord(1, "bad geometry header (want sensor_a,sensor_b,walking_seconds)");
    std::vector<PairGeometry> out;
    std::size_t line_no = 1;
    while (get_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = csv::split_line(line);
        if (fields.size() != 3) throw MalformedRecord(line_no, "expected 3 fields");
        char* endp = nullptr;
        double secs = std::strtod(fields[2].c_str(), &endp);
        if (endp != fields[2].c_str() + fields[2].size() || !(secs > 0.0))
            throw MalformedRecord(line_no, "walking_seconds must be positive");
        out.push_back({fields[0], fields[1], secs});
    }
    return out;
}

inline std::string geometry_to_csv(std::span<const PairGeometry> pairs) {
    std::string out = "sensor_a,sensor_b,walking_seconds\n";
    for (const PairGeometry& p : pairs) {
        out += csv::escape(p.sensor_a);
        out += ',';
        out += csv::escape(p.sensor_b);
        out += ',';
        out += format_count(p.walking_seconds);
        out += '\n';
    }
    return out;
}

inline std::string pair_label(const std::string& a, const std::string& b) { return a + "|" + b; }

struct PairFlows {
    PairGeometry geometry;
    DailyFlowResult flows;
};

inline const FootfallSeries& series_for(const std::vector<FootfallSeries>& all,
                                        const std::string& sensor_id) {
    for (const FootfallSeries& s : all)
        if (s.sensor_id == sensor_id) return s;
    throw InvalidParameter("no series for sensor '" + sensor_id + "'");
}

// Per-pair daily TE/flow classification over the whole cohort. Pairs are
// independent work units; seeds derive from (seed, pair, date) inside
// daily_flow_series, so the result is job-count invariant.
inline std::vector<PairFlows> compute_pair_flows(const std::vector<FootfallSeries>& series,
                                                 std::span<const PairGeometry> pairs,
                                                 const FlowParams& params, UtcOffset tz,
                                                 int jobs = 1) {
    std::vector<PairFlows> out(pairs.size());
    std::vector<std::exception_ptr> errors(pairs.size());
    parallel_for(pairs.size(), jobs, [&](std::size_t i) {
        try {
            const FootfallSeries& a = series_for(series, pairs[i].sensor_a);
            const FootfallSeries& b = series_for(series, pairs[i].sensor_b);
            out[i] = {pairs[i], daily_flow_series(a, b, params, tz)};
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

inline std::string flows_to_csv(std::span<const PairFlows> table) {
    std::string out = "pair,date,te_ab_bits,te_ba_bits,p_ab,p_ba,vf_code\n";
    for (const PairFlows& pf : table) {
        std::string label = pair_label(pf.geometry.sensor_a, pf.geometry.sensor_b);
        for (const DayFlow& d : pf.flows.days) {
            out += csv::escape(label);
            out += ',';
            out += to_string(d.date);
            out += ',';
            out += format_count(d.te_ab);
            out += ',';
            out += format_count(d.te_ba);
            out += ',';
            out += format_count(d.p_ab);
            out += ',';
            out += format_count(d.p_ba);
            out += ',';
            out += std::to_string(to_int(d.code));
            out += '\n';
        }
    }
    return out;
}

inline std::string skips_to_csv(std::span<const PairFlows> table) {
    std::string out = "pair,date,coverage,reason\n";
    for (const PairFlows& pf : table) {
        std::string label = pair_label(pf.geometry.sensor_a, pf.geometry.sensor_b);
        for (const SkippedDay& s : pf.flows.skipped) {
            out += csv::escape(label);
            out += ',';
            out += to_string(s.date);
            out += ',';
            out += format_count(s.coverage);
            out += ',';
            out += csv::escape(s.reason);
            out += '\n';
        }
    }
    return out;
}

inline std::string preferred_to_csv(std::span<const PairFlows> table,
                                    double threshold_points = 10.0) {
    std::string out = "pair,preferred_code,days\n";
    for (const PairFlows& pf : table) {
        std::vector<FlowCode> codes;
        codes.reserve(pf.flows.days.size());
        for (const DayFlow& d : pf.flows.days) codes.push_back(d.code);
        out += csv::escape(pair_label(pf.geometry.sensor_a, pf.geometry.sensor_b));
        out += ',';
        if (!codes.empty()) {
            auto pref = preferred_direction(codes, threshold_points);
            out += pref ? std::to_string(to_int(*pref)) : std::string("none");
        } else {
            out += "none";
        }
        out += ',';
        out += std::to_string(codes.size());
        out += '\n';
    }
    return out;
}

struct PairQuadrants {
    PairGeometry geometry;
    QuadrantOccupancy occupancy;
    std::size_t n_days = 0;
};

inline std::vector<PairQuadrants> compute_pair_quadrants(
    const std::vector<FootfallSeries>& series, std::span<const PairGeometry> pairs,
    QuadrantCenter center, double coverage_threshold, UtcOffset tz, int jobs = 1) {
    std::vector<PairQuadrants> out(pairs.size());
    std::vector<std::exception_ptr> errors(pairs.size());
    parallel_for(pairs.size(), jobs, [&](std::size_t i) {
        try {
            const FootfallSeries& a = series_for(series, pairs[i].sensor_a);
            const FootfallSeries& b = series_for(series, pairs[i].sensor_b);
            auto daily = daily_correlations(a, b, coverage_threshold, tz);
            std::vector<double> corr;
            corr.reserve(daily.size());
            for (const auto& d : daily) corr.push_back(d.correlation);
            PairQuadrants pq;
            pq.geometry = pairs[i];
            pq.n_days = corr.size();
            if (!corr.empty())
                pq.occupancy = quadrant_membership(corr, pairs[i].walking_seconds, center);
            out[i] = std::move(pq);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

inline std::string quadrants_to_csv(std::span<const PairQuadrants> table) {
    std::string out = "pair,quadrant,percent\n";
    for (const PairQuadrants& pq : table) {
        std::string label = pair_label(pq.geometry.sensor_a, pq.geometry.sensor_b);
        for (QuadrantLabel q : pq.occupancy.visited) {
            out += csv::escape(label);
            out += ',';
            out += to_string(q);
            out += ',';
            out += format_count(pq.occupancy.percent[static_cast<std::size_t>(q)]);
            out += '\n';
        }
    }
    return out;
}

inline std::string quadrant_max_to_csv(std::span<const PairQuadrants> table) {
    std::string out = "pair,max_percent,days\n";
    for (const PairQuadrants& pq : table) {
        out += csv::escape(pair_label(pq.geometry.sensor_a, pq.geometry.sensor_b));
        out += ',';
        out += format_count(pq.occupancy.max_percent);
        out += ',';
        out += std::to_string(pq.n_days);
        out += '\n';
    }
    return out;
}

// ingest -> clean: aggregate the probe events and run the cleaning steps,
// one series per sensor, each covering that sensor's observed span padded
// out to whole civil days so per-day analyses align.
inline std::vector<FootfallSeries> clean_all(std::span<const ProbeEvent> events,
                                             Duration step = kStepSeconds,
                                             Duration dweller_window = 1800, UtcOffset tz = {},
                                             int jobs = 1) {
    std::vector<SensorAggregate> aggregates = aggregate_intervals(events, step);
    std::vector<FootfallSeries> out(aggregates.size());
    std::vector<std::exception_ptr> errors(aggregates.size());
    parallel_for(aggregates.size(), jobs, [&](std::size_t i) {
        try {
            const SensorAggregate& agg = aggregates[i];
            TimePoint lo = day_start(civil_date_at(agg.span_start, tz), tz);
            TimePoint end = agg.interval_at(agg.intervals.size());
            TimePoint hi = day_start(civil_date_at(end - 1, tz), tz) + kSecondsPerDay;
            out[i] = clean_sensor(agg, dweller_window, std::make_pair(lo, hi));
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

inline std::vector<FootfallSeries> impute_all(const std::vector<FootfallSeries>& series,
                                              Duration max_gap, int jobs = 1) {
    std::vector<FootfallSeries> out(series.size());
    std::vector<std::exception_ptr> errors(series.size());
    parallel_for(series.size(), jobs, [&](std::size_t i) {
        try {
            out[i] = impute_series(series[i], max_gap);
        } catch (const InsufficientData&) {
            out[i] = series[i];  // too sparse to model; leave untouched
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace footfall
