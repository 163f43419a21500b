#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "footfall/errors.hpp"
#include "footfall/rng.hpp"

namespace footfall {

// Discrete series over a fixed alphabet; what the plug-in estimators eat.
struct SymbolSeq {
    std::vector<int> symbols;
    int alphabet = 0;

    std::size_t size() const { return symbols.size(); }
};

enum class BinStrategy { equal_frequency, equal_width };

// Maps counts to symbols. equal_frequency splits by quantile with ties
// broken by position (stable), so class sizes differ by at most one;
// equal_width spans [min, max]. Either way the alphabet is `bins`, and
// empty bins are allowed.
inline SymbolSeq discretize(std::span<const double> series, int bins = 4,
                            BinStrategy strategy = BinStrategy::equal_frequency) {
    if (bins <= 0) throw InvalidParameter("discretize: bins must be positive");
    const std::size_t n = series.size();
    if (n < static_cast<std::size_t>(bins))
        throw TooShort("discretize: need at least `bins` points");

    SymbolSeq out;
    out.alphabet = bins;
    out.symbols.resize(n);
    if (strategy == BinStrategy::equal_frequency) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return series[a] < series[b]; });
        for (std::size_t rank = 0; rank < n; ++rank)
            out.symbols[idx[rank]] =
                static_cast<int>(rank * static_cast<std::size_t>(bins) / n);
    } else {
        auto [lo_it, hi_it] = std::minmax_element(series.begin(), series.end());
        double lo = *lo_it, hi = *hi_it;
        double width = hi - lo;
        for (std::size_t i = 0; i < n; ++i) {
            int s = width > 0.0
                        ? static_cast<int>((series[i] - lo) / width * static_cast<double>(bins))
                        : 0;
            out.symbols[i] = std::min(s, bins - 1);
        }
    }
    return out;
}

// Plug-in Shannon entropy in bits, with 0*log(0) taken as 0.
inline double shannon_entropy(const SymbolSeq& seq) {
    if (seq.symbols.empty()) throw EmptyInput("shannon_entropy: empty sequence");
    std::vector<std::size_t> counts(static_cast<std::size_t>(seq.alphabet), 0);
    for (int s : seq.symbols) ++counts[static_cast<std::size_t>(s)];
    const double n = static_cast<double>(seq.symbols.size());
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

// Plug-in mutual information in bits from the empirical joint.
inline double mutual_information(const SymbolSeq& x, const SymbolSeq& y) {
    if (x.symbols.size() != y.symbols.size())
        throw LengthMismatch("mutual_information: length mismatch");
    if (x.symbols.empty()) throw EmptyInput("mutual_information: empty sequence");
    const std::size_t ax = static_cast<std::size_t>(x.alphabet);
    const std::size_t ay = static_cast<std::size_t>(y.alphabet);
    std::vector<std::size_t> joint(ax * ay, 0), mx(ax, 0), my(ay, 0);
    for (std::size_t i = 0; i < x.symbols.size(); ++i) {
        std::size_t sx = static_cast<std::size_t>(x.symbols[i]);
        std::size_t sy = static_cast<std::size_t>(y.symbols[i]);
        ++joint[sx * ay + sy];
        ++mx[sx];
        ++my[sy];
    }
    const double n = static_cast<double>(x.symbols.size());
    double mi = 0.0;
    for (std::size_t sx = 0; sx < ax; ++sx) {
        for (std::size_t sy = 0; sy < ay; ++sy) {
            std::size_t c = joint[sx * ay + sy];
            if (c == 0) continue;
            double pxy = static_cast<double>(c) / n;
            double px = static_cast<double>(mx[sx]) / n;
            double py = static_cast<double>(my[sy]) / n;
            mi += pxy * std::log2(pxy / (px * py));
        }
    }
    return mi;
}

struct TeEstimate {
    double value_bits = 0.0;
    std::size_t n_samples = 0;
    std::size_t lag = 1;
};

// Transfer entropy source -> target, in bits: the reduction in uncertainty
// about target[t+lag] from knowing source[t] on top of target[t]. Plug-in
// estimate over the empirical (target_next, target_now, source_now)
// distribution; equals H(T'|T) - H(T'|T,S).
inline TeEstimate transfer_entropy(const SymbolSeq& source, const SymbolSeq& target,
                                   std::size_t lag = 1) {
    if (lag == 0) throw InvalidParameter("transfer_entropy: lag must be positive");
    if (source.symbols.size() != target.symbols.size())
        throw LengthMismatch("transfer_entropy: length mismatch");
    const std::size_t n = target.symbols.size();
    if (n <= lag) throw TooShort("transfer_entropy: need more samples than the lag");

    const std::size_t at = static_cast<std::size_t>(target.alphabet);
    const std::size_t as = static_cast<std::size_t>(source.alphabet);
    std::vector<std::size_t> triple(at * at * as, 0);  // (t_next, t_now, s_now)
    std::vector<std::size_t> pair_ts(at * as, 0);      // (t_now, s_now)
    std::vector<std::size_t> pair_tt(at * at, 0);      // (t_next, t_now)
    std::vector<std::size_t> marg_t(at, 0);            // (t_now)

    const std::size_t m = n - lag;
    for (std::size_t t = 0; t < m; ++t) {
        std::size_t t_next = static_cast<std::size_t>(target.symbols[t + lag]);
        std::size_t t_now = static_cast<std::size_t>(target.symbols[t]);
        std::size_t s_now = static_cast<std::size_t>(source.symbols[t]);
        ++triple[(t_next * at + t_now) * as + s_now];
        ++pair_ts[t_now * as + s_now];
        ++pair_tt[t_next * at + t_now];
        ++marg_t[t_now];
    }
    const double dn = static_cast<double>(m);
    double te = 0.0;
    for (std::size_t t_next = 0; t_next < at; ++t_next) {
        for (std::size_t t_now = 0; t_now < at; ++t_now) {
            for (std::size_t s_now = 0; s_now < as; ++s_now) {
                std::size_t c = triple[(t_next * at + t_now) * as + s_now];
                if (c == 0) continue;
                double p3 = static_cast<double>(c) / dn;
                double p_ts = static_cast<double>(pair_ts[t_now * as + s_now]) / dn;
                double p_tt = static_cast<double>(pair_tt[t_next * at + t_now]) / dn;
                double p_t = static_cast<double>(marg_t[t_now]) / dn;
                te += p3 * std::log2(p3 * p_t / (p_ts * p_tt));
            }
        }
    }
    return {te, m, lag};
}

struct SurrogateResult {
    double observed_bits = 0.0;
    std::vector<double> surrogate_values;
    double p_value = 1.0;
    std::uint64_t seed = 0;
};

// One-sided permutation test: the source is time-shuffled, which preserves
// its marginal while destroying any lagged coupling. Each surrogate draws
// its RNG stream from (seed, index), so batches can run in any order, or
// in parallel, with bit-identical results.
inline SurrogateResult surrogate_test(const SymbolSeq& source, const SymbolSeq& target,
                                      std::size_t lag = 1, int n_surrogates = 100,
                                      std::uint64_t seed = 0) {
    if (n_surrogates <= 0) throw InvalidParameter("surrogate_test: n_surrogates must be positive");
    SurrogateResult result;
    result.seed = seed;
    result.observed_bits = transfer_entropy(source, target, lag).value_bits;
    result.surrogate_values.reserve(static_cast<std::size_t>(n_surrogates));
    std::size_t ge = 0;
    SymbolSeq shuffled = source;
    for (int k = 0; k < n_surrogates; ++k) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(k)));
        shuffled.symbols = source.symbols;
        rng.shuffle(shuffled.symbols);
        double v = transfer_entropy(shuffled, target, lag).value_bits;
        result.surrogate_values.push_back(v);
        ge += (v >= result.observed_bits);
    }
    result.p_value = static_cast<double>(1 + ge) / static_cast<double>(1 + n_surrogates);
    return result;
}

}  // namespace footfall
