#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <span>

#include <json.hpp>

#include "footfall/errors.hpp"
#include "footfall/info_theory.hpp"
#include "footfall/probe_log.hpp"
#include "footfall/rng.hpp"
#include "footfall/time.hpp"

namespace footfall {

struct OutageWindow {
    std::string sensor_id;
    TimePoint start = 0;
    Duration length = 0;
};

// Directed lagged coupling: a strength-weighted share of the target's
// arrivals is replaced by copies of the source's arrivals lag_slots back.
struct Coupling {
    std::string source;
    std::string target;
    std::size_t lag_slots = 1;
    double strength = 0.0;
};

// Knobs map onto the five acquisition biases: sensor range / counting noise
// (base_rate + Poisson arrivals), probing frequency spread
// (probing_rate_jitter), hash collisions (collision_rate), power outages
// (outages), and the post-processing assumptions exercised downstream
// (dwellers, randomization).
struct SynthScenario {
    int n_sensors = 2;
    TimePoint start = 0;
    Duration duration = kSecondsPerDay;
    Duration step = kStepSeconds;
    double base_rate = 50.0;            // expected new devices per interval
    double dweller_fraction = 0.0;      // share of devices that linger
    double mean_dwell_intervals = 3.0;  // mean stay of a dweller, >= 2
    double randomized_fraction = 0.0;   // share emitting rotating hashes
    double probing_rate_jitter = 0.0;   // lognormal sigma on per-device rate
    double collision_rate = 1e-4;       // hash reuse across devices, <= 1e-3
    std::vector<OutageWindow> outages;
    std::vector<Coupling> couplings;
    std::uint64_t seed = 0;
};

inline std::string scenario_sensor_id(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "S%03d", index + 1);
    return buf;
}

struct GroundTruth {
    TimePoint start = 0;
    Duration step = kStepSeconds;
    // True footfall: new-device arrivals per sensor per interval.
    std::map<std::string, std::vector<double>> true_counts;

    struct PlantedDirection {
        std::string source;
        std::string target;
        CivilDate date;
        int code = 0;  // 1 = source->target, 0 = uncoupled
    };
    std::vector<PlantedDirection> planted;
};

// Generator-internal roster, exposed so tests can brute-force the truth.
struct DeviceRecord {
    std::string sensor_id;
    std::size_t first_slot = 0;
    std::size_t dwell_slots = 1;
    bool randomized = false;
    std::string base_hash;
};

struct SynthOutput {
    std::vector<ProbeEvent> events;  // sorted by (ts, sensor, hash)
    GroundTruth truth;
    std::vector<DeviceRecord> devices;
};

namespace detail {

inline void validate_scenario(const SynthScenario& sc) {
    auto bad = [](const std::string& why) { throw InvalidScenario("scenario: " + why); };
    if (sc.n_sensors < 1) bad("n_sensors must be >= 1");
    if (sc.step <= 0 || kSecondsPerDay % sc.step != 0) bad("step must divide one day");
    if (sc.duration <= 0 || sc.duration % sc.step != 0) bad("duration must be a multiple of step");
    if (!is_aligned(sc.start, sc.step)) bad("start must be aligned to step");
    if (sc.base_rate < 0.0) bad("base_rate must be non-negative");
    if (sc.dweller_fraction < 0.0 || sc.dweller_fraction > 1.0) bad("dweller_fraction in [0,1]");
    if (sc.randomized_fraction < 0.0 || sc.randomized_fraction > 1.0)
        bad("randomized_fraction in [0,1]");
    if (sc.mean_dwell_intervals < 2.0) bad("mean_dwell_intervals must be >= 2");
    if (sc.probing_rate_jitter < 0.0) bad("probing_rate_jitter must be non-negative");
    if (sc.collision_rate < 0.0 || sc.collision_rate > 0.001)
        bad("collision_rate must be in [0, 0.001]");
    for (const Coupling& c : sc.couplings) {
        if (c.strength < 0.0 || c.strength > 1.0) bad("coupling strength in [0,1]");
        if (c.lag_slots == 0) bad("coupling lag_slots must be positive");
    }
    for (const OutageWindow& o : sc.outages)
        if (o.length <= 0) bad("outage length must be positive");
}

}  // namespace detail

// Builds a probe-request stream with known ground truth. Fully
// deterministic for a given seed: every random draw comes from a substream
// keyed on (seed, purpose, sensor), and the event list is emitted in a
// canonical sort order.
inline SynthOutput generate_probe_stream(const SynthScenario& sc) {
    detail::validate_scenario(sc);
    const std::size_t n_slots = static_cast<std::size_t>(sc.duration / sc.step);
    const int n = sc.n_sensors;

    std::map<std::string, int> index_of;
    for (int i = 0; i < n; ++i) index_of[scenario_sensor_id(i)] = i;
    std::vector<std::optional<Coupling>> incoming(static_cast<std::size_t>(n));
    for (const Coupling& c : sc.couplings) {
        auto si = index_of.find(c.source);
        auto ti = index_of.find(c.target);
        if (si == index_of.end() || ti == index_of.end())
            throw InvalidScenario("scenario: coupling names unknown sensor");
        if (incoming[static_cast<std::size_t>(ti->second)])
            throw InvalidScenario("scenario: sensor is target of two couplings");
        incoming[static_cast<std::size_t>(ti->second)] = c;
    }

    // Base arrival processes, one stream per sensor.
    std::vector<std::vector<std::uint64_t>> base(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Rng rng(mix_seed(sc.seed, 0x10000u + static_cast<std::uint64_t>(i)));
        base[static_cast<std::size_t>(i)].resize(n_slots);
        for (std::size_t t = 0; t < n_slots; ++t)
            base[static_cast<std::size_t>(i)][t] = rng.poisson(sc.base_rate);
    }

    // Resolve couplings into final arrival counts (memoized; cycles are
    // rejected). Binomial thinning keeps the counts integral.
    std::vector<std::vector<std::uint64_t>> arrivals(static_cast<std::size_t>(n));
    std::vector<int> state(static_cast<std::size_t>(n), 0);  // 0 new, 1 visiting, 2 done
    auto resolve = [&](auto&& self, int i) -> const std::vector<std::uint64_t>& {
        auto ui = static_cast<std::size_t>(i);
        if (state[ui] == 2) return arrivals[ui];
        if (state[ui] == 1) throw InvalidScenario("scenario: coupling cycle");
        state[ui] = 1;
        if (!incoming[ui]) {
            arrivals[ui] = base[ui];
        } else {
            const Coupling& c = *incoming[ui];
            const auto& src = self(self, index_of.at(c.source));
            Rng rng(mix_seed(sc.seed, 0x20000u + static_cast<std::uint64_t>(i)));
            arrivals[ui].resize(n_slots);
            for (std::size_t t = 0; t < n_slots; ++t) {
                std::uint64_t own = 0, borrowed = 0;
                for (std::uint64_t k = 0; k < base[ui][t]; ++k)
                    own += !rng.bernoulli(c.strength);
                if (t >= c.lag_slots) {
                    for (std::uint64_t k = 0; k < src[t - c.lag_slots]; ++k)
                        borrowed += rng.bernoulli(c.strength);
                } else {
                    own = base[ui][t];  // nothing upstream yet
                }
                arrivals[ui][t] = own + borrowed;
            }
        }
        state[ui] = 2;
        return arrivals[ui];
    };
    for (int i = 0; i < n; ++i) resolve(resolve, i);

    SynthOutput out;
    out.truth.start = sc.start;
    out.truth.step = sc.step;

    std::vector<std::string> hash_registry;  // issued non-randomized hashes
    std::uint64_t hash_counter = 0;

    for (int i = 0; i < n; ++i) {
        const std::string sensor = scenario_sensor_id(i);
        const auto ui = static_cast<std::size_t>(i);
        Rng rng(mix_seed(sc.seed, 0x30000u + static_cast<std::uint64_t>(i)));

        std::vector<std::pair<TimePoint, TimePoint>> offline;
        for (const OutageWindow& o : sc.outages)
            if (o.sensor_id == sensor) offline.emplace_back(o.start, o.start + o.length);
        auto suppressed = [&](TimePoint ts) {
            for (auto [b, e] : offline)
                if (ts >= b && ts < e) return true;
            return false;
        };

        auto& counts = out.truth.true_counts[sensor];
        counts.assign(n_slots, 0.0);

        for (std::size_t t = 0; t < n_slots; ++t) {
            counts[t] = static_cast<double>(arrivals[ui][t]);
            for (std::uint64_t k = 0; k < arrivals[ui][t]; ++k) {
                DeviceRecord dev;
                dev.sensor_id = sensor;
                dev.first_slot = t;
                dev.randomized = rng.bernoulli(sc.randomized_fraction);
                if (rng.bernoulli(sc.dweller_fraction)) {
                    // dwell = 2 + geometric, mean = mean_dwell_intervals
                    double p = 1.0 / (sc.mean_dwell_intervals - 1.0);
                    std::size_t extra = 0;
                    if (p < 1.0)
                        extra = static_cast<std::size_t>(
                            std::floor(std::log(1.0 - rng.uniform()) / std::log(1.0 - p)));
                    dev.dwell_slots = std::min(2 + extra, n_slots - t);
                } else {
                    dev.dwell_slots = 1;
                }
                char buf[32];
                if (dev.randomized) {
                    std::snprintf(buf, sizeof(buf), "r%08llx",
                                  static_cast<unsigned long long>(hash_counter++));
                    dev.base_hash = buf;
                } else if (!hash_registry.empty() && rng.bernoulli(sc.collision_rate)) {
                    dev.base_hash = hash_registry[rng.below(hash_registry.size())];
                } else {
                    std::snprintf(buf, sizeof(buf), "h%08llx",
                                  static_cast<unsigned long long>(hash_counter++));
                    dev.base_hash = buf;
                    hash_registry.push_back(dev.base_hash);
                }

                double probe_rate =
                    2.0 * std::exp(sc.probing_rate_jitter * rng.normal() -
                                   0.5 * sc.probing_rate_jitter * sc.probing_rate_jitter);
                for (std::size_t u = t; u < t + dev.dwell_slots && u < n_slots; ++u) {
                    std::string hash = dev.base_hash;
                    if (dev.randomized) hash += "-" + std::to_string(u);
                    std::uint64_t n_probes = 1 + rng.poisson(probe_rate);
                    for (std::uint64_t pr = 0; pr < n_probes; ++pr) {
                        TimePoint ts = sc.start + static_cast<Duration>(u) * sc.step +
                                       static_cast<Duration>(rng.below(
                                           static_cast<std::uint64_t>(sc.step)));
                        if (suppressed(ts)) continue;
                        out.events.push_back({sensor, ts, hash, dev.randomized});
                    }
                }
                out.devices.push_back(std::move(dev));
            }
        }
    }

    for (const Coupling& c : sc.couplings) {
        int code = c.strength > 0.0 ? 1 : 0;
        for (TimePoint cursor = day_start(civil_date_at(sc.start, {}), {});
             cursor < sc.start + sc.duration; cursor += kSecondsPerDay)
            out.truth.planted.push_back({c.source, c.target, civil_date_at(cursor, {}), code});
    }

    std::sort(out.events.begin(), out.events.end(), [](const ProbeEvent& a, const ProbeEvent& b) {
        if (a.ts != b.ts) return a.ts < b.ts;
        if (a.sensor_id != b.sensor_id) return a.sensor_id < b.sensor_id;
        return a.mac_hash < b.mac_hash;
    });
    return out;
}

struct CoupledSeries {
    SymbolSeq source;
    SymbolSeq target;
    int planted_direction = 0;  // 1 = source->target
};

// Direct symbol-level coupling oracle: target copies the source lag slots
// back with probability `strength`, otherwise draws fresh noise. The
// analytic TE of the strength-1 binary case is exactly 1 bit.
inline CoupledSeries generate_coupled_series(std::size_t n, std::size_t lag, double strength,
                                             int alphabet, std::uint64_t seed) {
    if (alphabet < 2) throw InvalidParameter("generate_coupled_series: alphabet must be >= 2");
    if (lag == 0 || n <= lag) throw InvalidParameter("generate_coupled_series: need n > lag > 0");
    if (strength < 0.0 || strength > 1.0)
        throw InvalidParameter("generate_coupled_series: strength in [0,1]");
    CoupledSeries out;
    out.source.alphabet = alphabet;
    out.target.alphabet = alphabet;
    out.source.symbols.resize(n);
    out.target.symbols.resize(n);
    out.planted_direction = strength > 0.0 ? 1 : 0;
    Rng rng(mix_seed(seed, 0xC0FFEE));
    for (std::size_t t = 0; t < n; ++t)
        out.source.symbols[t] = static_cast<int>(rng.below(static_cast<std::uint64_t>(alphabet)));
    for (std::size_t t = 0; t < n; ++t) {
        if (t >= lag && rng.bernoulli(strength))
            out.target.symbols[t] = out.source.symbols[t - lag];
        else
            out.target.symbols[t] = static_cast<int>(
                rng.below(static_cast<std::uint64_t>(alphabet)));
    }
    return out;
}

inline std::string truth_counts_to_csv(const GroundTruth& truth) {
    std::string out = "sensor_id,interval_start,true_count\n";
    for (const auto& [sensor, counts] : truth.true_counts) {
        for (std::size_t t = 0; t < counts.size(); ++t) {
            out += sensor;
            out += ',';
            out += format_rfc3339(truth.start + static_cast<Duration>(t) * truth.step);
            out += ',';
            out += format_count(counts[t]);
            out += '\n';
        }
    }
    return out;
}

inline std::string planted_directions_to_csv(const GroundTruth& truth) {
    std::string out = "source,target,date,code\n";
    for (const auto& p : truth.planted) {
        out += p.source;
        out += ',';
        out += p.target;
        out += ',';
        out += to_string(p.date);
        out += ',';
        out += std::to_string(p.code);
        out += '\n';
    }
    return out;
}

inline std::string events_to_jsonl(std::span<const ProbeEvent> events) {
    std::string out;
    for (const ProbeEvent& ev : events) {
        nlohmann::json j{{"sensor_id", ev.sensor_id},
                         {"ts", format_rfc3339(ev.ts)},
                         {"mac_hash", ev.mac_hash},
                         {"randomized", ev.randomized}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

inline SynthScenario scenario_from_json(const nlohmann::json& j) {
    SynthScenario sc;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j[key].template get<std::decay_t<decltype(field)>>();
    };
    get("n_sensors", sc.n_sensors);
    if (j.contains("start")) sc.start = parse_rfc3339(j["start"].get<std::string>());
    get("duration_s", sc.duration);
    get("step_s", sc.step);
    get("base_rate", sc.base_rate);
    get("dweller_fraction", sc.dweller_fraction);
    get("mean_dwell_intervals", sc.mean_dwell_intervals);
    get("randomized_fraction", sc.randomized_fraction);
    get("probing_rate_jitter", sc.probing_rate_jitter);
    get("collision_rate", sc.collision_rate);
    get("seed", sc.seed);
    if (j.contains("outages"))
        for (const auto& jo : j["outages"])
            sc.outages.push_back({jo.at("sensor_id").get<std::string>(),
                                  parse_rfc3339(jo.at("start").get<std::string>()),
                                  jo.at("length_s").get<Duration>()});
    if (j.contains("couplings"))
        for (const auto& jc : j["couplings"])
            sc.couplings.push_back({jc.at("source").get<std::string>(),
                                    jc.at("target").get<std::string>(),
                                    jc.at("lag_slots").get<std::size_t>(),
                                    jc.at("strength").get<double>()});
    static const char* known[] = {"n_sensors",          "start",
                                  "duration_s",         "step_s",
                                  "base_rate",          "dweller_fraction",
                                  "mean_dwell_intervals", "randomized_fraction",
                                  "probing_rate_jitter", "collision_rate",
                                  "seed",               "outages",
                                  "couplings"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok |= (it.key() == k);
        if (!ok) throw InvalidScenario("scenario: unknown key '" + it.key() + "'");
    }
    return sc;
}

}  // namespace footfall
