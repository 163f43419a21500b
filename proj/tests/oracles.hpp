#pragma once

// Test-only reference implementations, deliberately written along different
// code paths than the library: joint-table entropies for the estimators, a
// straight-line interval walk for the cleaning pipeline, and a dense
// Gaussian solve for the smoother. They stay independent of the production
// headers' internals so a shared bug cannot hide.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "footfall/clean.hpp"
#include "footfall/info_theory.hpp"
#include "footfall/probe_log.hpp"
#include "footfall/time.hpp"

namespace oracle {

// Entropy via the log-sum identity H = log2(n) - (1/n) * sum c*log2(c),
// a different algebraic route from the library's -sum p*log2(p).
inline double entropy_of_counts(const std::map<std::vector<int>, std::size_t>& counts,
                                std::size_t n) {
    double acc = 0.0;
    for (const auto& [key, c] : counts) acc += static_cast<double>(c) * std::log2(c);
    return std::log2(static_cast<double>(n)) - acc / static_cast<double>(n);
}

inline std::map<std::vector<int>, std::size_t> tally(const std::vector<std::vector<int>>& rows) {
    std::map<std::vector<int>, std::size_t> counts;
    for (const auto& r : rows) ++counts[r];
    return counts;
}

inline double shannon_entropy(const footfall::SymbolSeq& x) {
    std::vector<std::vector<int>> rows;
    for (int s : x.symbols) rows.push_back({s});
    return entropy_of_counts(tally(rows), rows.size());
}

// MI via H(X) + H(Y) - H(X,Y).
inline double mutual_information(const footfall::SymbolSeq& x, const footfall::SymbolSeq& y) {
    std::vector<std::vector<int>> rx, ry, rxy;
    for (std::size_t i = 0; i < x.symbols.size(); ++i) {
        rx.push_back({x.symbols[i]});
        ry.push_back({y.symbols[i]});
        rxy.push_back({x.symbols[i], y.symbols[i]});
    }
    std::size_t n = rx.size();
    return entropy_of_counts(tally(rx), n) + entropy_of_counts(tally(ry), n) -
           entropy_of_counts(tally(rxy), n);
}

// TE via the entropy combination H(T',T) + H(T,S) - H(T) - H(T',T,S).
inline double transfer_entropy(const footfall::SymbolSeq& source,
                               const footfall::SymbolSeq& target, std::size_t lag) {
    std::vector<std::vector<int>> r_tt, r_ts, r_t, r_tts;
    for (std::size_t t = 0; t + lag < target.symbols.size(); ++t) {
        int t_next = target.symbols[t + lag];
        int t_now = target.symbols[t];
        int s_now = source.symbols[t];
        r_tt.push_back({t_next, t_now});
        r_ts.push_back({t_now, s_now});
        r_t.push_back({t_now});
        r_tts.push_back({t_next, t_now, s_now});
    }
    std::size_t n = r_t.size();
    return entropy_of_counts(tally(r_tt), n) + entropy_of_counts(tally(r_ts), n) -
           entropy_of_counts(tally(r_t), n) - entropy_of_counts(tally(r_tts), n);
}

// Straight-line reference for pipeline steps 2-5: count probes, dedupe
// hashes per interval, suppress dwellers by walking intervals in order with
// a running run-start per hash, adjust randomized by the filtered ratio,
// and sum. One sensor at a time, contiguous interval grid.
struct CleanedInterval {
    footfall::TimePoint interval_start;
    std::uint64_t probes_random = 0, probes_nonrandom = 0;
    std::uint64_t unique_random = 0, unique_nonrandom = 0;
    std::uint64_t filtered_random = 0, filtered_nonrandom = 0;
    double adjusted_random = 0.0;
    double estimate = 0.0;
};

inline std::map<std::string, std::vector<CleanedInterval>> clean_reference(
    const std::vector<footfall::ProbeEvent>& events, footfall::Duration step,
    footfall::Duration window) {
    using footfall::TimePoint;
    struct Cell {
        std::uint64_t probes_r = 0, probes_n = 0;
        std::set<std::string> set_r, set_n;
    };
    std::map<std::string, std::map<TimePoint, Cell>> grid;
    for (const auto& ev : events) {
        Cell& cell = grid[ev.sensor_id][footfall::floor_to(ev.ts, step)];
        if (ev.randomized) {
            ++cell.probes_r;
            cell.set_r.insert(ev.mac_hash);
        } else {
            ++cell.probes_n;
            cell.set_n.insert(ev.mac_hash);
        }
    }
    const std::size_t block = static_cast<std::size_t>(window / step);
    std::map<std::string, std::vector<CleanedInterval>> out;
    for (auto& [sensor, cells] : grid) {
        TimePoint lo = cells.begin()->first, hi = cells.rbegin()->first;
        std::vector<CleanedInterval> rows;
        std::map<std::string, std::size_t> run_start_r, run_start_n;
        std::size_t slot = 0;
        for (TimePoint t = lo; t <= hi; t += step, ++slot) {
            CleanedInterval row;
            row.interval_start = t;
            static const Cell empty;
            auto it = cells.find(t);
            const Cell& cell = it == cells.end() ? empty : it->second;
            row.probes_random = cell.probes_r;
            row.probes_nonrandom = cell.probes_n;
            row.unique_random = cell.set_r.size();
            row.unique_nonrandom = cell.set_n.size();

            auto filter = [&](const std::set<std::string>& present,
                              std::map<std::string, std::size_t>& run_start) {
                std::uint64_t kept = 0;
                for (const std::string& h : present) {
                    auto rs = run_start.find(h);
                    std::size_t start;
                    if (rs != run_start.end() && rs->second != static_cast<std::size_t>(-1))
                        start = rs->second;
                    else
                        start = slot;
                    if ((slot - start) % block == 0) ++kept;
                    run_start[h] = start;
                }
                // hashes absent this interval lose their run
                for (auto& [h, s] : run_start)
                    if (!present.count(h) && s != static_cast<std::size_t>(-1)) {
                        // mark dead; re-appearance starts a fresh run
                        s = static_cast<std::size_t>(-1);
                    }
                return kept;
            };
            row.filtered_random = filter(cell.set_r, run_start_r);
            row.filtered_nonrandom = filter(cell.set_n, run_start_n);

            row.adjusted_random =
                row.unique_nonrandom == 0
                    ? static_cast<double>(row.unique_random)
                    : static_cast<double>(row.unique_random) *
                          (static_cast<double>(row.filtered_nonrandom) /
                           static_cast<double>(row.unique_nonrandom));
            row.estimate = static_cast<double>(row.filtered_nonrandom) + row.adjusted_random;
            rows.push_back(row);
        }
        out[sensor] = std::move(rows);
    }
    return out;
}

// Exact posterior of the 3-point local-level model via the dense precision
// matrix: prior on x1, two random-walk links, one observation term per
// present y. Solved with plain Gaussian elimination.
struct Posterior3 {
    std::array<double, 3> mean;
    std::array<double, 3> variance;
};

inline Posterior3 local_level_posterior3(const std::array<std::optional<double>, 3>& y,
                                         double level_var, double obs_var, double prior_mean,
                                         double prior_var) {
    double lam[3][3] = {};
    double eta[3] = {};
    lam[0][0] += 1.0 / prior_var;
    eta[0] += prior_mean / prior_var;
    for (int t = 0; t < 2; ++t) {
        lam[t][t] += 1.0 / level_var;
        lam[t + 1][t + 1] += 1.0 / level_var;
        lam[t][t + 1] -= 1.0 / level_var;
        lam[t + 1][t] -= 1.0 / level_var;
    }
    for (int t = 0; t < 3; ++t) {
        if (!y[static_cast<std::size_t>(t)]) continue;
        lam[t][t] += 1.0 / obs_var;
        eta[t] += *y[static_cast<std::size_t>(t)] / obs_var;
    }
    // invert lam (3x3) by Gauss-Jordan to get both the mean and variances
    double aug[3][6] = {};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) aug[i][j] = lam[i][j];
        aug[i][3 + i] = 1.0;
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(aug[r][col]) > std::abs(aug[piv][col])) piv = r;
        for (int j = 0; j < 6; ++j) std::swap(aug[col][j], aug[piv][j]);
        double d = aug[col][col];
        for (int j = 0; j < 6; ++j) aug[col][j] /= d;
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            double f = aug[r][col];
            for (int j = 0; j < 6; ++j) aug[r][j] -= f * aug[col][j];
        }
    }
    Posterior3 post{};
    for (int i = 0; i < 3; ++i) {
        double m = 0.0;
        for (int j = 0; j < 3; ++j) m += aug[i][3 + j] * eta[j];
        post.mean[static_cast<std::size_t>(i)] = m;
        post.variance[static_cast<std::size_t>(i)] = aug[i][3 + i];
    }
    return post;
}

}  // namespace oracle
