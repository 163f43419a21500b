#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "footfall/clean.hpp"
#include "footfall/errors.hpp"

namespace footfall {

// Additive decomposition: observed = trend + seasonal + residual, with the
// residual defined as the exact remainder so reconstruction is identically
// true wherever the trend exists. Edge slots whose centered moving average
// is undefined carry no trend (and no residual).
struct Decomposition {
    std::vector<std::optional<double>> trend;
    std::vector<double> seasonal;
    std::vector<std::optional<double>> residual;
    std::size_t period = 0;
};

inline Decomposition decompose_additive(std::span<const double> series, std::size_t period) {
    if (period == 0) throw InvalidParameter("decompose_additive: period must be positive");
    const std::size_t n = series.size();
    if (n < 2 * period) throw TooShort("decompose_additive: need at least 2*period points");

    Decomposition d;
    d.period = period;
    d.trend.assign(n, std::nullopt);
    d.seasonal.assign(n, 0.0);
    d.residual.assign(n, std::nullopt);

    // Centered moving average; even periods take half weights at both ends
    // (the classic 2xMA) so the window stays symmetric.
    if (period % 2 == 1) {
        const std::size_t h = period / 2;
        for (std::size_t i = h; i + h < n; ++i) {
            double sum = 0.0;
            for (std::size_t k = i - h; k <= i + h; ++k) sum += series[k];
            d.trend[i] = sum / static_cast<double>(period);
        }
    } else {
        const std::size_t h = period / 2;
        for (std::size_t i = h; i + h < n; ++i) {
            double sum = 0.5 * series[i - h] + 0.5 * series[i + h];
            for (std::size_t k = i - h + 1; k < i + h; ++k) sum += series[k];
            d.trend[i] = sum / static_cast<double>(period);
        }
    }

    std::vector<double> phase_sum(period, 0.0);
    std::vector<std::size_t> phase_n(period, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!d.trend[i]) continue;
        phase_sum[i % period] += series[i] - *d.trend[i];
        ++phase_n[i % period];
    }
    std::vector<double> phase_mean(period);
    for (std::size_t k = 0; k < period; ++k)
        phase_mean[k] = phase_sum[k] / static_cast<double>(phase_n[k]);
    double grand = std::accumulate(phase_mean.begin(), phase_mean.end(), 0.0) /
                   static_cast<double>(period);
    for (double& m : phase_mean) m -= grand;

    for (std::size_t i = 0; i < n; ++i) {
        d.seasonal[i] = phase_mean[i % period];
        if (d.trend[i]) d.residual[i] = series[i] - *d.trend[i] - d.seasonal[i];
    }
    return d;
}

inline Decomposition decompose_additive(const FootfallSeries& series, std::size_t period) {
    std::vector<double> vals;
    vals.reserve(series.size());
    for (const auto& v : series.values) {
        if (!v) throw ContainsMissing("decompose_additive: series has missing slots");
        vals.push_back(*v);
    }
    return decompose_additive(std::span<const double>(vals), period);
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw LengthMismatch("pearson: length mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw TooShort("pearson: need at least 3 points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw ConstantInput("pearson: constant input");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace detail {

// Mid-ranks (1-based); tied values share the average of their positions.
inline std::vector<double> midranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace detail

inline double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw LengthMismatch("spearman: length mismatch");
    if (x.size() < 3) throw TooShort("spearman: need at least 3 points");
    std::vector<double> rx = detail::midranks(x);
    std::vector<double> ry = detail::midranks(y);
    return pearson(rx, ry);
}

// Intersection of two series on a common grid, with any slot missing on
// either side dropped. Callers gate on the coverage ratio (the flow
// pipeline defaults to 0.9).
struct AlignedPair {
    std::vector<double> a;
    std::vector<double> b;
    double coverage = 0.0;  // kept / overlap slots
    TimePoint start = 0;    // start of the overlapping range
};

inline AlignedPair align_pair(const FootfallSeries& a, const FootfallSeries& b) {
    if (a.step != b.step) throw GridMismatch("align_pair: step mismatch");
    const Duration step = a.step;
    if ((a.start - b.start) % step != 0) throw NoOverlap("align_pair: grids out of phase");
    TimePoint begin = std::max(a.start, b.start);
    TimePoint end = std::min(a.slot_time(a.size()), b.slot_time(b.size()));
    if (end <= begin) throw NoOverlap("align_pair: disjoint time ranges");

    AlignedPair out;
    out.start = begin;
    const std::size_t total = static_cast<std::size_t>((end - begin) / step);
    out.a.reserve(total);
    out.b.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        TimePoint t = begin + static_cast<Duration>(i) * step;
        const auto& va = a.values[static_cast<std::size_t>((t - a.start) / step)];
        const auto& vb = b.values[static_cast<std::size_t>((t - b.start) / step)];
        if (va && vb) {
            out.a.push_back(*va);
            out.b.push_back(*vb);
        }
    }
    out.coverage = static_cast<double>(out.a.size()) / static_cast<double>(total);
    return out;
}

inline std::string decomposition_to_csv(std::span<const double> observed,
                                        const Decomposition& d) {
    std::string out = "slot,observed,trend,seasonal,residual\n";
    for (std::size_t i = 0; i < observed.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_count(observed[i]);
        out += ',';
        if (d.trend[i]) out += format_count(*d.trend[i]);
        out += ',';
        out += format_count(d.seasonal[i]);
        out += ',';
        if (d.residual[i]) out += format_count(*d.residual[i]);
        out += '\n';
    }
    return out;
}

}  // namespace footfall
