// Acceptance harness: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line each. Exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "footfall/footfall.hpp"
#include "oracles.hpp"

using namespace footfall;

namespace {

int g_failures = 0;

void report(int idx, const std::string& label, bool ok, const std::string& detail) {
    std::printf("[%s] C%d %s — %s\n", ok ? "PASS" : "FAIL", idx, label.c_str(), detail.c_str());
    if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- C1: analytic copy-map TE -------------------------------------------

void criterion1() {
    auto coupled = generate_coupled_series(100000, 1, 1.0, 2, 20170301);
    auto t0 = std::chrono::steady_clock::now();
    TeEstimate fwd = transfer_entropy(coupled.source, coupled.target, 1);
    double fwd_s = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    TeEstimate rev = transfer_entropy(coupled.target, coupled.source, 1);
    double rev_s = seconds_since(t0);
    bool ok = std::abs(fwd.value_bits - 1.0) <= 0.02 && rev.value_bits <= 0.01 &&
              fwd_s < 1.0 && rev_s < 1.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "TE(s->t)=%.4f bits (want 1.00+-0.02), TE(t->s)=%.4f (<=0.01), "
                  "%.3fs/%.3fs per estimate",
                  fwd.value_bits, rev.value_bits, fwd_s, rev_s);
    report(1, "analytic transfer-entropy oracle", ok, buf);
}

// --- C2: estimator equivalence against the joint-table oracle ------------

void criterion2() {
    Rng rng(20170302);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        int alphabet = 2 + static_cast<int>(rng.below(3));
        std::size_t n = 20 + rng.below(981);
        SymbolSeq x{{}, alphabet}, y{{}, alphabet};
        for (std::size_t i = 0; i < n; ++i) {
            x.symbols.push_back(static_cast<int>(rng.below(alphabet)));
            y.symbols.push_back(static_cast<int>(rng.below(alphabet)));
        }
        std::size_t lag = 1 + rng.below(2);
        worst = std::max(worst, std::abs(shannon_entropy(x) - oracle::shannon_entropy(x)));
        worst = std::max(worst,
                         std::abs(mutual_information(x, y) - oracle::mutual_information(x, y)));
        worst = std::max(worst, std::abs(transfer_entropy(x, y, lag).value_bits -
                                         oracle::transfer_entropy(x, y, lag)));
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "max |estimator - oracle| = %.3e over 200 fixtures", worst);
    report(2, "entropy/MI/TE match the brute-force oracle", worst <= 1e-10, buf);
}

// --- C3: direction recovery on planted couplings -------------------------

void criterion3() {
    int recovered = 0;
    for (int k = 0; k < 50; ++k) {
        double strength = 0.8 + 0.2 * (k % 5) / 4.0;
        auto c = generate_coupled_series(2000, 1, strength, 4,
                                         mix_seed(20170303, static_cast<std::uint64_t>(k)));
        DirectedTe ab{transfer_entropy(c.source, c.target, 1),
                      surrogate_test(c.source, c.target, 1, 100, mix_seed(1, k))};
        DirectedTe ba{transfer_entropy(c.target, c.source, 1),
                      surrogate_test(c.target, c.source, 1, 100, mix_seed(2, k))};
        recovered += (classify_flow(ab, ba) == FlowCode::a_to_b);
    }
    int null_coded = 0;
    for (int k = 0; k < 50; ++k) {
        auto c = generate_coupled_series(2000, 1, 0.0, 4,
                                         mix_seed(20170304, static_cast<std::uint64_t>(k)));
        DirectedTe ab{transfer_entropy(c.source, c.target, 1),
                      surrogate_test(c.source, c.target, 1, 100, mix_seed(3, k))};
        DirectedTe ba{transfer_entropy(c.target, c.source, 1),
                      surrogate_test(c.target, c.source, 1, 100, mix_seed(4, k))};
        null_coded += (classify_flow(ab, ba) == FlowCode::not_significant);
    }
    bool ok = recovered >= 45 && null_coded >= 45;
    char buf[120];
    std::snprintf(buf, sizeof(buf),
                  "planted direction recovered %d/50 (>=45), null coded -1 %d/50 (>=45)",
                  recovered, null_coded);
    report(3, "flow-direction recovery on synthetic pairs", ok, buf);
}

// --- C4: cleaning pipeline equals the straight-line reference ------------

void criterion4() {
    const TimePoint base = parse_rfc3339("2017-03-01T00:00:00Z");
    bool ok = true;
    std::string why = "bit-identical on 20 random fixtures";

    Rng rng(20170305);
    for (int trial = 0; trial < 20 && ok; ++trial) {
        std::vector<ProbeEvent> events;
        std::size_t n = 500 + rng.below(9500);
        for (std::size_t i = 0; i < n; ++i)
            events.push_back({"S" + std::to_string(rng.below(3)),
                              base + static_cast<TimePoint>(rng.below(8 * 3600)),
                              "h" + std::to_string(rng.below(25)), rng.bernoulli(0.4)});
        auto reference = oracle::clean_reference(events, 300, 1800);
        for (const auto& agg : aggregate_intervals(events)) {
            auto filtered = remove_long_dwellers(agg);
            auto adjusted = adjust_randomized_all(filtered, agg);
            FootfallSeries s = estimate_footfall(filtered, adjusted, std::nullopt, agg.step);
            const auto& ref = reference.at(agg.sensor_id);
            if (ref.size() != s.size()) {
                ok = false;
                why = "grid size mismatch";
                break;
            }
            for (std::size_t i = 0; i < ref.size(); ++i) {
                bool same = agg.intervals[i].probes_random == ref[i].probes_random &&
                            agg.intervals[i].probes_nonrandom == ref[i].probes_nonrandom &&
                            agg.intervals[i].unique_random == ref[i].unique_random &&
                            agg.intervals[i].unique_nonrandom == ref[i].unique_nonrandom &&
                            filtered[i].filtered_random == ref[i].filtered_random &&
                            filtered[i].filtered_nonrandom == ref[i].filtered_nonrandom &&
                            adjusted[i] == ref[i].adjusted_random &&
                            *s.values[i] == ref[i].estimate;
                if (!same) {
                    ok = false;
                    why = "mismatch at " + format_rfc3339(ref[i].interval_start);
                    break;
                }
            }
        }
    }

    // the two named cases: 15 probes of one MAC, and a six-interval dweller
    {
        std::vector<ProbeEvent> events;
        for (int i = 0; i < 15; ++i) events.push_back({"S1", base + 10 * i, "mac", false});
        auto aggs = aggregate_intervals(events);
        if (aggs[0].intervals[0].unique_nonrandom != 1 ||
            aggs[0].intervals[0].probes_nonrandom != 15) {
            ok = false;
            why = "15-probe dedup case failed";
        }
        events.clear();
        for (int s = 0; s < 6; ++s) events.push_back({"S1", base + 300 * s, "dweller", false});
        auto filtered = remove_long_dwellers(aggregate_intervals(events)[0]);
        std::uint64_t total = 0;
        for (const auto& f : filtered) total += f.filtered_nonrandom;
        if (total != 1 || filtered[0].filtered_nonrandom != 1) {
            ok = false;
            why = "six-interval dweller case failed";
        }
    }
    report(4, "cleaning pipeline equals the steps-2..5 reference", ok, why);
}

// --- C5: imputation gates, leave-out RMSE, exact 3-point smoother --------

void criterion5() {
    bool ok = true;
    std::string why;

    Rng rng(20170306);
    std::vector<std::optional<double>> v(300);
    for (auto& x : v) x = 60.0 + rng.normal(0.0, 2.0);
    for (int i = 40; i < 45; ++i) v[i] = std::nullopt;    // 25 min
    for (int i = 100; i < 106; ++i) v[i] = std::nullopt;  // exactly 30 min
    FootfallSeries s;
    s.sensor_id = "S";
    s.start = 0;
    s.values = v;
    FootfallSeries imputed = impute_gaps(s, fit_local_level(s), 1800);
    for (int i = 40; i < 45; ++i)
        if (!imputed.values[i]) ok = false;
    for (int i = 100; i < 106; ++i)
        if (imputed.values[i]) ok = false;
    if (!ok) why = "30-minute threshold misapplied; ";

    // leave-out prediction vs linear interpolation on a known-model fixture
    Rng sim(20170307);
    const double level_sd = 0.1, obs_sd = 2.0;
    std::vector<double> obs(1000);
    double level = 100.0;
    for (std::size_t t = 0; t < obs.size(); ++t) {
        if (t > 0) level += sim.normal(0.0, level_sd);
        obs[t] = level + sim.normal(0.0, obs_sd);
    }
    LocalLevelModel truth{level_sd * level_sd, obs_sd * obs_sd};
    Rng pick(20170308);
    double se_sm = 0.0, se_li = 0.0;
    for (int k = 0; k < 50; ++k) {
        std::size_t i = 1 + pick.below(obs.size() - 2);
        std::vector<std::optional<double>> with_gap(obs.begin(), obs.end());
        with_gap[i] = std::nullopt;
        SmootherResult sm = smooth_local_level(with_gap, truth);
        double e1 = sm.mean[i] - obs[i];
        double e2 = 0.5 * (obs[i - 1] + obs[i + 1]) - obs[i];
        se_sm += e1 * e1;
        se_li += e2 * e2;
    }
    double rmse_sm = std::sqrt(se_sm / 50.0), rmse_li = std::sqrt(se_li / 50.0);
    if (!(rmse_sm <= rmse_li)) {
        ok = false;
        why += "smoother RMSE above interpolation; ";
    }

    std::array<std::optional<double>, 3> y{2.0, std::nullopt, 3.5};
    auto post = oracle::local_level_posterior3(y, 0.7, 1.3, 1.0, 10.0);
    std::vector<std::optional<double>> y3(y.begin(), y.end());
    SmootherResult sm = smooth_local_level(y3, LocalLevelModel{0.7, 1.3}, GaussianPrior{1.0, 10.0});
    double worst = 0.0;
    for (int t = 0; t < 3; ++t)
        worst = std::max(worst, std::abs(sm.mean[t] - post.mean[t]));
    if (worst > 1e-10) {
        ok = false;
        why += "3-point posterior off by " + std::to_string(worst);
    }

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "threshold 5/6-slot gates hold, leave-out RMSE %.3f <= %.3f, 3-point max "
                  "err %.1e%s%s",
                  rmse_sm, rmse_li, worst, why.empty() ? "" : " -- ", why.c_str());
    report(5, "local-level imputation", ok, buf);
}

// --- C6: additive decomposition -------------------------------------------

void criterion6() {
    bool ok = true;
    Rng rng(20170309);
    double worst_recon = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t period = 2 + rng.below(20);
        std::size_t n = 2 * period + rng.below(300);
        std::vector<double> v(n);
        for (auto& x : v) x = 500.0 * rng.uniform();
        Decomposition d = decompose_additive(v, period);
        for (std::size_t i = 0; i < n; ++i) {
            if (!d.trend[i]) continue;
            worst_recon = std::max(
                worst_recon, std::abs(*d.trend[i] + d.seasonal[i] + *d.residual[i] - v[i]));
        }
    }
    if (worst_recon > 1e-9) ok = false;

    const std::size_t period = 24, n = 8 * period;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = 5.0 * std::sin(2.0 * 3.14159265358979323846 *
                              static_cast<double>(i % period) / static_cast<double>(period));
    Decomposition d = decompose_additive(v, period);
    double worst_seasonal = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        worst_seasonal = std::max(worst_seasonal, std::abs(d.seasonal[i] - v[i]));
    if (worst_seasonal > 1e-6) ok = false;

    char buf[120];
    std::snprintf(buf, sizeof(buf), "reconstruction max err %.2e (<=1e-9), sinusoid seasonal "
                  "max err %.2e (<=1e-6)",
                  worst_recon, worst_seasonal);
    report(6, "additive decomposition", ok, buf);
}

// --- C7: quadrant partition and the 10-point rule -------------------------

void criterion7() {
    Rng rng(20170310);
    bool ok = true;
    for (int i = 0; i < 10000; ++i) {
        double t = 1.0 + 299.0 * rng.uniform();
        double c = -1.0 + 2.0 * rng.uniform();
        QuadrantLabel q = quadrant(t, c);
        int matches = (t > 150.0 && c > 0.5) + (t <= 150.0 && c > 0.5) +
                      (t <= 150.0 && c <= 0.5) + (t > 150.0 && c <= 0.5);
        bool label_ok = false;
        switch (q) {
            case QuadrantLabel::I: label_ok = t > 150.0 && c > 0.5; break;
            case QuadrantLabel::II: label_ok = t <= 150.0 && c > 0.5; break;
            case QuadrantLabel::III: label_ok = t <= 150.0 && c <= 0.5; break;
            case QuadrantLabel::IV: label_ok = t > 150.0 && c <= 0.5; break;
        }
        if (matches != 1 || !label_ok) {
            ok = false;
            break;
        }
    }

    // the 10-point rule must flip exactly when the top-two gap crosses 10
    bool rule_ok = true;
    for (int top = 50; top <= 100; ++top) {
        std::vector<FlowCode> codes;
        codes.insert(codes.end(), top, FlowCode::a_to_b);
        codes.insert(codes.end(), 100 - top, FlowCode::b_to_a);
        double gap = static_cast<double>(top) - static_cast<double>(100 - top);
        auto pref = preferred_direction(codes, 10.0);
        if ((gap > 10.0) != pref.has_value()) rule_ok = false;
        if (pref && *pref != FlowCode::a_to_b) rule_ok = false;
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf),
                  "10^4 points each in exactly one quadrant: %s; 10-point boundary exact: %s",
                  ok ? "yes" : "no", rule_ok ? "yes" : "no");
    report(7, "quadrants and preferred direction", ok && rule_ok, buf);
}

// --- C8: route score -------------------------------------------------------

void criterion8() {
    bool ok = WeightTable::word_count == 13;
    const std::pair<const char*, int> table[] = {
        {"head", 1},  {"toward", 1}, {"towards", 1},   {"continue", 1}, {"follow", 1},
        {"straight", 1}, {"walk", 1}, {"slight", 2},   {"sharp", 2},    {"turn", 3},
        {"cross", 4}, {"upper", 5},  {"take", 5},      {"roundabout", 6}};
    for (const auto& [word, weight] : table)
        if (WeightTable::weight_of(word) != weight) ok = false;

    RouteScore a = route_score(std::vector<RouteStep>{{"Turn left onto High St", 50.0, {}}});
    RouteScore b = route_score(std::vector<RouteStep>{
        {"Head north toward Market Sq", 100.0, {}}, {"Turn right onto Low Rd", 50.0, {}}});
    if (std::abs(a.value - 0.06) > 1e-12) ok = false;
    if (std::abs(b.value - 0.08) > 1e-12) ok = false;

    Rng rng(20170311);
    std::vector<RouteStep> steps;
    const char* texts[] = {"Turn left", "Cross the square", "Head toward the bridge",
                           "Take the stairs"};
    for (int i = 0; i < 16; ++i)
        steps.push_back({texts[rng.below(4)], 1.0 + 400.0 * rng.uniform(), {}});
    std::vector<RouteStep> doubled = steps;
    for (auto& st : doubled) st.distance_m *= 2.0;
    if (route_score(doubled).value != route_score(steps).value / 2.0) ok = false;

    char buf[120];
    std::snprintf(buf, sizeof(buf),
                  "table verbatim, S fixtures %.6f/%.6f at 1e-12, doubling halves exactly",
                  a.value, b.value);
    report(8, "route complexity score", ok, buf);
}

// --- C9: determinism and scale --------------------------------------------

struct CohortResult {
    std::string flows_csv;
    std::string preferred_csv;
};

CohortResult run_cohort(const std::vector<PairGeometry>& pairs,
                        const std::vector<FootfallSeries>& series, int jobs) {
    FlowParams params;
    params.n_surrogates = 100;
    params.seed = 20170312;
    auto table = compute_pair_flows(series, pairs, params, {}, jobs);
    return {flows_to_csv(table), preferred_to_csv(table, 10.0)};
}

void criterion9() {
    const int n_pairs = 100, n_days = 30;
    const std::size_t slots = 288;
    std::vector<PairGeometry> pairs;
    std::vector<FootfallSeries> series;
    Rng rng(20170313);
    for (int p = 0; p < n_pairs; ++p) {
        char a_name[16], b_name[16];
        std::snprintf(a_name, sizeof(a_name), "A%03d", p);
        std::snprintf(b_name, sizeof(b_name), "B%03d", p);
        pairs.push_back({a_name, b_name, 60.0 + 240.0 * rng.uniform()});
        FootfallSeries a, b;
        a.sensor_id = a_name;
        b.sensor_id = b_name;
        a.start = b.start = parse_rfc3339("2017-03-01T00:00:00Z");
        const std::size_t n = slots * n_days;
        a.values.reserve(n);
        b.values.reserve(n);
        double prev = 100.0 * rng.uniform();
        for (std::size_t t = 0; t < n; ++t) {
            double cur = 100.0 * rng.uniform();
            a.values.push_back(cur);
            b.values.push_back(prev);  // b trails a by one slot
            prev = cur;
        }
        series.push_back(std::move(a));
        series.push_back(std::move(b));
    }

    auto t0 = std::chrono::steady_clock::now();
    CohortResult first = run_cohort(pairs, series, 1);
    CohortResult second = run_cohort(pairs, series, 1);
    CohortResult parallel = run_cohort(pairs, series, 4);
    double elapsed = seconds_since(t0);

    bool identical = first.flows_csv == second.flows_csv &&
                     first.flows_csv == parallel.flows_csv &&
                     first.preferred_csv == second.preferred_csv &&
                     first.preferred_csv == parallel.preferred_csv;
    std::size_t rows = 0;
    for (char c : first.flows_csv) rows += (c == '\n');
    bool ok = identical && elapsed < 300.0 && rows == 1 + n_pairs * n_days;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "3 runs (jobs 1/1/4) of 100 pairs x 30 days, 100 surrogates in %.1fs "
                  "(<300s), outputs byte-identical: %s",
                  elapsed, identical ? "yes" : "no");
    report(9, "determinism and scale", ok, buf);
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    if (g_failures == 0)
        std::printf("all 9 acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria FAILED\n", g_failures);
    return g_failures;
}
