#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "footfall/clean.hpp"
#include "footfall/errors.hpp"

namespace footfall {

// Maximal run of MISSING slots. Runs touching either end of the series are
// edge gaps: they have one-sided information only and are never imputed.
struct Gap {
    std::string series_id;
    std::size_t start_slot = 0;
    std::size_t length_slots = 0;
    bool at_edge = false;

    friend bool operator==(const Gap&, const Gap&) = default;
};

inline std::vector<Gap> detect_gaps(const FootfallSeries& series) {
    std::vector<Gap> gaps;
    const std::size_t n = series.size();
    std::size_t i = 0;
    while (i < n) {
        if (series.values[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && !series.values[j]) ++j;
        gaps.push_back({series.sensor_id, i, j - i, i == 0 || j == n});
        i = j;
    }
    return gaps;
}

// Local level model: random-walk level observed through noise.
//   level_{t+1} = level_t + xi,  xi  ~ N(0, level_variance)
//   y_t         = level_t + eps, eps ~ N(0, obs_variance)
struct LocalLevelModel {
    double level_variance = 0.0;  // sigma^2_xi
    double obs_variance = 1.0;    // sigma^2_eps

    double signal_noise_ratio() const { return level_variance / obs_variance; }
};

struct GaussianPrior {
    double mean = 0.0;
    double variance = 1.0;
};

struct SmootherResult {
    std::vector<double> mean;      // posterior level mean per slot
    std::vector<double> variance;  // posterior level variance per slot
};

namespace detail {

struct FilterState {
    std::vector<double> filt_mean, filt_var;  // a_{t|t}, P_{t|t}
    std::vector<double> pred_mean, pred_var;  // a_{t|t-1}, P_{t|t-1}
};

inline FilterState kalman_filter(std::span<const std::optional<double>> obs,
                                 const LocalLevelModel& m, const GaussianPrior& prior) {
    const std::size_t n = obs.size();
    FilterState st;
    st.filt_mean.resize(n);
    st.filt_var.resize(n);
    st.pred_mean.resize(n);
    st.pred_var.resize(n);
    double a = prior.mean, p = prior.variance;
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) p += m.level_variance;
        st.pred_mean[t] = a;
        st.pred_var[t] = p;
        if (obs[t]) {
            double f = p + m.obs_variance;
            double k = f > 0.0 ? p / f : 0.0;
            a += k * (*obs[t] - a);
            p *= (1.0 - k);
        }
        st.filt_mean[t] = a;
        st.filt_var[t] = p;
    }
    return st;
}

inline GaussianPrior default_prior(std::span<const std::optional<double>> obs,
                                   const LocalLevelModel& m) {
    double first = 0.0;
    for (const auto& v : obs)
        if (v) {
            first = *v;
            break;
        }
    return {first, 1e7 * (m.obs_variance + m.level_variance)};
}

}  // namespace detail

// Kalman filter + RTS backward pass; returns the posterior level at every
// slot given all observations. Missing slots contribute no update.
inline SmootherResult smooth_local_level(std::span<const std::optional<double>> obs,
                                         const LocalLevelModel& m,
                                         std::optional<GaussianPrior> prior = std::nullopt) {
    if (obs.empty()) throw EmptyInput("smooth_local_level: empty series");
    if (m.obs_variance <= 0.0 || m.level_variance < 0.0)
        throw InvalidParameter("smooth_local_level: bad model variances");
    GaussianPrior pr = prior ? *prior : detail::default_prior(obs, m);
    auto st = detail::kalman_filter(obs, m, pr);
    const std::size_t n = obs.size();
    SmootherResult out;
    out.mean.resize(n);
    out.variance.resize(n);
    out.mean[n - 1] = st.filt_mean[n - 1];
    out.variance[n - 1] = st.filt_var[n - 1];
    for (std::size_t t = n - 1; t-- > 0;) {
        double pred_var_next = st.filt_var[t] + m.level_variance;
        double c = pred_var_next > 0.0 ? st.filt_var[t] / pred_var_next : 0.0;
        out.mean[t] = st.filt_mean[t] + c * (out.mean[t + 1] - st.filt_mean[t]);
        out.variance[t] = st.filt_var[t] + c * c * (out.variance[t + 1] - pred_var_next);
    }
    return out;
}

namespace detail {

// Prediction-error decomposition with obs_variance concentrated out.
// Returns the log-likelihood (up to an additive constant) and the implied
// obs-variance estimate for a given signal-to-noise ratio q.
struct ConcentratedFit {
    double loglik = 0.0;
    double obs_variance = 0.0;
};

inline ConcentratedFit concentrated_loglik(std::span<const std::optional<double>> obs, double q) {
    LocalLevelModel unit{q, 1.0};
    GaussianPrior prior = default_prior(obs, unit);
    const std::size_t n = obs.size();
    double sum_scaled_sq = 0.0, sum_log_f = 0.0;
    std::size_t count = 0;
    bool first_seen = false;
    double a = prior.mean, p = prior.variance;
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) p += q;
        if (obs[t]) {
            double f = p + 1.0;
            if (first_seen) {  // the first observation only initializes the level
                double v = *obs[t] - a;
                sum_scaled_sq += v * v / f;
                sum_log_f += std::log(f);
                ++count;
            }
            first_seen = true;
            double k = p / f;
            a += k * (*obs[t] - a);
            p *= (1.0 - k);
        }
    }
    ConcentratedFit fit;
    fit.obs_variance = std::max(sum_scaled_sq / static_cast<double>(count), 1e-300);
    fit.loglik = -0.5 * (static_cast<double>(count) * (1.0 + std::log(fit.obs_variance)) +
                         sum_log_f);
    return fit;
}

}  // namespace detail

inline constexpr double kLogQLow = -8.0;
inline constexpr double kLogQHigh = 8.0;
inline constexpr std::size_t kFitMinPresent = 30;

// Maximum-likelihood fit of the local level model: 1-D search over
// log(signal-to-noise ratio) on a coarse grid, refined by golden section,
// with the observation variance recovered analytically.
inline LocalLevelModel fit_local_level(std::span<const std::optional<double>> obs) {
    std::size_t present = 0;
    for (const auto& v : obs) present += v.has_value();
    if (present < kFitMinPresent)
        throw InsufficientData("fit_local_level: need at least " +
                               std::to_string(kFitMinPresent) + " present values, have " +
                               std::to_string(present));

    auto objective = [&](double logq) { return detail::concentrated_loglik(obs, std::exp(logq)); };

    constexpr int grid_points = 33;
    double best_logq = kLogQLow, best_ll = -1e300;
    for (int i = 0; i < grid_points; ++i) {
        double logq = kLogQLow + (kLogQHigh - kLogQLow) * i / (grid_points - 1);
        double ll = objective(logq).loglik;
        if (ll > best_ll) {
            best_ll = ll;
            best_logq = logq;
        }
    }
    const double cell = (kLogQHigh - kLogQLow) / (grid_points - 1);
    double lo = std::max(kLogQLow, best_logq - cell);
    double hi = std::min(kLogQHigh, best_logq + cell);
    constexpr double golden = 0.6180339887498949;
    double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
    double f1 = objective(x1).loglik, f2 = objective(x2).loglik;
    for (int iter = 0; iter < 60 && hi - lo > 1e-10; ++iter) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = objective(x2).loglik;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = objective(x1).loglik;
        }
    }
    double logq = 0.5 * (lo + hi);
    auto fit = objective(logq);
    return {std::exp(logq) * fit.obs_variance, fit.obs_variance};
}

inline LocalLevelModel fit_local_level(const FootfallSeries& series) {
    return fit_local_level(std::span<const std::optional<double>>(series.values));
}

// Fills interior gaps strictly shorter than max_gap with the smoother's
// posterior mean, clamped at zero. Longer gaps and edge gaps stay MISSING;
// present values pass through untouched.
inline FootfallSeries impute_gaps(const FootfallSeries& series, const LocalLevelModel& model,
                                  Duration max_gap = 1800) {
    if (max_gap <= 0) throw InvalidParameter("impute_gaps: max_gap must be positive");
    std::vector<Gap> gaps = detect_gaps(series);
    if (gaps.empty()) return series;

    bool any = false;
    for (const Gap& g : gaps)
        any |= (!g.at_edge && static_cast<Duration>(g.length_slots) * series.step < max_gap);
    if (!any) return series;

    SmootherResult sm = smooth_local_level(series.values, model);
    FootfallSeries out = series;
    for (const Gap& g : gaps) {
        if (g.at_edge) continue;
        if (static_cast<Duration>(g.length_slots) * series.step >= max_gap) continue;
        for (std::size_t i = g.start_slot; i < g.start_slot + g.length_slots; ++i)
            out.values[i] = std::max(0.0, sm.mean[i]);
    }
    return out;
}

// Fit-and-fill convenience used by the CLI.
inline FootfallSeries impute_series(const FootfallSeries& series, Duration max_gap = 1800) {
    bool has_interior_short = false;
    for (const Gap& g : detect_gaps(series))
        has_interior_short |=
            (!g.at_edge && static_cast<Duration>(g.length_slots) * series.step < max_gap);
    if (!has_interior_short) return series;
    return impute_gaps(series, fit_local_level(series), max_gap);
}

}  // namespace footfall
