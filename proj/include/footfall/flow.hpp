#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "footfall/clean.hpp"
#include "footfall/errors.hpp"
#include "footfall/info_theory.hpp"
#include "footfall/series_ops.hpp"
#include "footfall/time.hpp"

namespace footfall {

// Geometry is unordered (a walking route has one duration); TE direction is
// ordered and always reported as a->b alongside b->a.
struct PairGeometry {
    std::string sensor_a;
    std::string sensor_b;
    double walking_seconds = 0.0;
};

// Daily information-flow code for a sensor pair:
//   1  flow a->b dominates, 2  flow b->a dominates,
//   0  balanced,           -1  nothing significant.
enum class FlowCode : int {
    not_significant = -1,
    balanced = 0,
    a_to_b = 1,
    b_to_a = 2,
};

inline int to_int(FlowCode c) { return static_cast<int>(c); }

struct DirectedTe {
    TeEstimate te;
    SurrogateResult sig;
};

// Compares the two directed TE values. The dominant direction must clear
// the permutation test, otherwise the day is coded -1; values within
// epsilon of each other are a balanced 0.
inline FlowCode classify_flow(const DirectedTe& ab, const DirectedTe& ba,
                              double epsilon_bits = 1e-3, double alpha = 0.05) {
    if (ab.te.lag != ba.te.lag || ab.te.n_samples != ba.te.n_samples)
        throw ParameterMismatch("classify_flow: estimates not comparable");
    double p_top;
    if (ab.te.value_bits > ba.te.value_bits)
        p_top = ab.sig.p_value;
    else if (ba.te.value_bits > ab.te.value_bits)
        p_top = ba.sig.p_value;
    else
        p_top = std::min(ab.sig.p_value, ba.sig.p_value);
    if (p_top > alpha) return FlowCode::not_significant;
    if (std::abs(ab.te.value_bits - ba.te.value_bits) <= epsilon_bits) return FlowCode::balanced;
    return ab.te.value_bits > ba.te.value_bits ? FlowCode::a_to_b : FlowCode::b_to_a;
}

struct FlowParams {
    int bins = 4;
    BinStrategy strategy = BinStrategy::equal_frequency;
    std::size_t lag = 1;
    int n_surrogates = 100;
    double alpha = 0.05;
    double epsilon_bits = 1e-3;
    double coverage_threshold = 0.9;
    std::uint64_t seed = 0;
};

struct DayFlow {
    CivilDate date;
    double te_ab = 0.0;
    double te_ba = 0.0;
    double p_ab = 1.0;
    double p_ba = 1.0;
    FlowCode code = FlowCode::not_significant;
    double coverage = 0.0;
};

struct SkippedDay {
    CivilDate date;
    double coverage = 0.0;
    std::string reason;
};

struct DailyFlowResult {
    std::vector<DayFlow> days;
    std::vector<SkippedDay> skipped;
};

// Copies the slots of `series` that fall inside the civil day `date`;
// slots the series does not cover come back MISSING.
inline FootfallSeries slice_day(const FootfallSeries& series, CivilDate date, UtcOffset tz) {
    TimePoint begin = day_start(date, tz);
    FootfallSeries day;
    day.sensor_id = series.sensor_id;
    day.step = series.step;
    day.start = begin;
    const std::size_t slots = static_cast<std::size_t>(kSecondsPerDay / series.step);
    day.values.assign(slots, std::nullopt);
    for (std::size_t i = 0; i < slots; ++i) {
        TimePoint t = begin + static_cast<Duration>(i) * series.step;
        if (t < series.start) continue;
        std::size_t src = static_cast<std::size_t>((t - series.start) / series.step);
        if (src >= series.size()) break;
        day.values[i] = series.values[src];
    }
    return day;
}

namespace detail {

inline std::uint64_t pair_day_seed(std::uint64_t seed, const std::string& a,
                                   const std::string& b, CivilDate date) {
    return mix_seed(seed, stable_hash(a + "|" + b + "|" + to_string(date)));
}

}  // namespace detail

// Enumerates the civil days both series touch and classifies the flow for
// each; days under the coverage threshold (or too short to estimate) are
// skipped and reported rather than failing the pair.
inline DailyFlowResult daily_flow_series(const FootfallSeries& a, const FootfallSeries& b,
                                         const FlowParams& params, UtcOffset tz = {}) {
    if (a.step != b.step) throw GridMismatch("daily_flow_series: step mismatch");
    DailyFlowResult result;
    if (a.values.empty() || b.values.empty()) return result;
    TimePoint begin = std::max(a.start, b.start);
    TimePoint end = std::min(a.slot_time(a.size()), b.slot_time(b.size()));
    if (end <= begin) return result;

    const std::size_t min_len =
        std::max<std::size_t>(static_cast<std::size_t>(params.bins), params.lag + 2);
    for (TimePoint cursor = day_start(civil_date_at(begin, tz), tz); cursor < end;
         cursor += kSecondsPerDay) {
        CivilDate date = civil_date_at(cursor, tz);
        FootfallSeries da = slice_day(a, date, tz);
        FootfallSeries db = slice_day(b, date, tz);
        AlignedPair aligned = align_pair(da, db);
        if (aligned.coverage < params.coverage_threshold) {
            result.skipped.push_back({date, aligned.coverage, "coverage below threshold"});
            continue;
        }
        if (aligned.a.size() < min_len) {
            result.skipped.push_back({date, aligned.coverage, "too few aligned samples"});
            continue;
        }
        SymbolSeq sa = discretize(aligned.a, params.bins, params.strategy);
        SymbolSeq sb = discretize(aligned.b, params.bins, params.strategy);
        std::uint64_t day_seed =
            detail::pair_day_seed(params.seed, a.sensor_id, b.sensor_id, date);
        DirectedTe ab{transfer_entropy(sa, sb, params.lag),
                      surrogate_test(sa, sb, params.lag, params.n_surrogates,
                                     mix_seed(day_seed, 0))};
        DirectedTe ba{transfer_entropy(sb, sa, params.lag),
                      surrogate_test(sb, sa, params.lag, params.n_surrogates,
                                     mix_seed(day_seed, 1))};
        DayFlow day;
        day.date = date;
        day.te_ab = ab.te.value_bits;
        day.te_ba = ba.te.value_bits;
        day.p_ab = ab.sig.p_value;
        day.p_ba = ba.sig.p_value;
        day.code = classify_flow(ab, ba, params.epsilon_bits, params.alpha);
        day.coverage = aligned.coverage;
        result.days.push_back(day);
    }
    return result;
}

// The 10-point rule: a pair has a preferred direction only when the most
// frequent code beats the runner-up by more than `threshold_points`
// percentage points.
inline std::optional<FlowCode> preferred_direction(std::span<const FlowCode> codes,
                                                   double threshold_points = 10.0) {
    if (codes.empty()) throw EmptyInput("preferred_direction: no codes");
    std::array<std::size_t, 4> counts{};  // -1, 0, 1, 2
    for (FlowCode c : codes) counts[static_cast<std::size_t>(to_int(c) + 1)] += 1;
    std::size_t top_idx = 0;
    for (std::size_t i = 1; i < counts.size(); ++i)
        if (counts[i] > counts[top_idx]) top_idx = i;
    std::size_t second = 0;
    for (std::size_t i = 0; i < counts.size(); ++i)
        if (i != top_idx) second = std::max(second, counts[i]);
    const double total = static_cast<double>(codes.size());
    double gap_points =
        100.0 * (static_cast<double>(counts[top_idx]) - static_cast<double>(second)) / total;
    if (gap_points > threshold_points)
        return static_cast<FlowCode>(static_cast<int>(top_idx) - 1);
    return std::nullopt;
}

enum class QuadrantLabel { I, II, III, IV };

inline const char* to_string(QuadrantLabel q) {
    switch (q) {
        case QuadrantLabel::I: return "I";
        case QuadrantLabel::II: return "II";
        case QuadrantLabel::III: return "III";
        case QuadrantLabel::IV: return "IV";
    }
    return "?";
}

struct QuadrantCenter {
    double walking_seconds = 150.0;
    double correlation = 0.5;
};

// Cartesian quadrant of a (walking time, correlation) point relative to the
// center. Points on a center line go left/bottom (<= convention), so the
// four labels partition the plane.
inline QuadrantLabel quadrant(double walking_seconds, double correlation,
                              QuadrantCenter center = {}) {
    if (!(walking_seconds > 0.0)) throw OutOfRange("quadrant: walking_seconds must be positive");
    if (!(correlation >= -1.0 && correlation <= 1.0))
        throw OutOfRange("quadrant: correlation outside [-1, 1]");
    const bool right = walking_seconds > center.walking_seconds;
    const bool top = correlation > center.correlation;
    if (right && top) return QuadrantLabel::I;
    if (!right && top) return QuadrantLabel::II;
    if (!right && !top) return QuadrantLabel::III;
    return QuadrantLabel::IV;
}

struct QuadrantOccupancy {
    std::array<double, 4> percent{};  // I, II, III, IV
    std::vector<QuadrantLabel> visited;
    double max_percent = 0.0;
};

inline QuadrantOccupancy quadrant_membership(std::span<const double> daily_correlations,
                                             double walking_seconds,
                                             QuadrantCenter center = {}) {
    if (daily_correlations.empty()) throw EmptyInput("quadrant_membership: no valid days");
    std::array<std::size_t, 4> counts{};
    for (double c : daily_correlations)
        counts[static_cast<std::size_t>(quadrant(walking_seconds, c, center))] += 1;
    QuadrantOccupancy occ;
    const double total = static_cast<double>(daily_correlations.size());
    for (std::size_t q = 0; q < 4; ++q) {
        occ.percent[q] = 100.0 * static_cast<double>(counts[q]) / total;
        if (counts[q] > 0) occ.visited.push_back(static_cast<QuadrantLabel>(q));
        occ.max_percent = std::max(occ.max_percent, occ.percent[q]);
    }
    return occ;
}

struct DailyCorrelation {
    CivilDate date;
    double correlation = 0.0;
};

// Per-day Pearson correlation for a pair, with the same per-day alignment
// and coverage gate the flow analysis uses. Degenerate days (constant
// series) are skipped.
inline std::vector<DailyCorrelation> daily_correlations(const FootfallSeries& a,
                                                        const FootfallSeries& b,
                                                        double coverage_threshold = 0.9,
                                                        UtcOffset tz = {}) {
    std::vector<DailyCorrelation> out;
    if (a.values.empty() || b.values.empty()) return out;
    TimePoint begin = std::max(a.start, b.start);
    TimePoint end = std::min(a.slot_time(a.size()), b.slot_time(b.size()));
    for (TimePoint cursor = day_start(civil_date_at(begin, tz), tz); cursor < end;
         cursor += kSecondsPerDay) {
        CivilDate date = civil_date_at(cursor, tz);
        AlignedPair aligned = align_pair(slice_day(a, date, tz), slice_day(b, date, tz));
        if (aligned.coverage < coverage_threshold || aligned.a.size() < 3) continue;
        try {
            out.push_back({date, pearson(aligned.a, aligned.b)});
        } catch (const ConstantInput&) {
        }
    }
    return out;
}

}  // namespace footfall
