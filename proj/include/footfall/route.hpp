#pragma once

#include <array>
#include <cctype>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "footfall/errors.hpp"

namespace footfall {

// One step of a walking route as a directions provider emits it.
struct RouteStep {
    std::string instruction;
    double distance_m = 0.0;
    std::optional<double> duration_s;
};

struct Route {
    double duration_s = 0.0;
    std::vector<RouteStep> steps;
};

// The fixed thirteen-word weight table (toward/towards spell one word).
// Weights grade how demanding an instruction is to follow, from "keep
// going" (1) up to negotiating a roundabout (6).
class WeightTable {
   public:
    static constexpr std::array<std::pair<std::string_view, int>, 14> entries = {{
        {"head", 1},
        {"toward", 1},
        {"towards", 1},
        {"continue", 1},
        {"follow", 1},
        {"straight", 1},
        {"walk", 1},
        {"slight", 2},
        {"sharp", 2},
        {"turn", 3},
        {"cross", 4},
        {"upper", 5},
        {"take", 5},
        {"roundabout", 6},
    }};

    static constexpr std::size_t word_count = 13;  // toward(s) counts once

    // 0 when the word is not in the table.
    static int weight_of(std::string_view word) {
        for (const auto& [w, v] : entries)
            if (w == word) return v;
        return 0;
    }
};

// Whether one step may contribute several table words ("Head ... toward
// ..." giving two terms) or only its first hit.
enum class WordMatchPolicy { all_occurrences, first_per_step };

// Case-insensitive whole-word extraction: the instruction is split into
// alphabetic tokens, so punctuation is ignored and "takeaway" never hits
// "take".
inline std::vector<std::pair<std::string, int>> extract_direction_words(
    const RouteStep& step, WordMatchPolicy policy = WordMatchPolicy::all_occurrences) {
    std::vector<std::pair<std::string, int>> out;
    std::string token;
    auto flush = [&] {
        if (!token.empty()) {
            if (int w = WeightTable::weight_of(token); w > 0) out.emplace_back(token, w);
            token.clear();
        }
    };
    for (char c : step.instruction) {
        if (std::isalpha(static_cast<unsigned char>(c)))
            token += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        else
            flush();
    }
    flush();
    if (policy == WordMatchPolicy::first_per_step && out.size() > 1) out.resize(1);
    return out;
}

struct RouteScore {
    struct Term {
        std::string word;
        int weight = 0;
        double distance_m = 0.0;
        double term = 0.0;
    };
    double value = 0.0;  // units: 1/meters
    std::vector<Term> contributions;
};

// Complexity score S = sum over matched words of weight / step-distance,
// distances in meters. S scales as 1/d, so the unit convention matters:
// feeding kilometers would inflate every term a thousandfold.
inline RouteScore route_score(std::span<const RouteStep> steps,
                              WordMatchPolicy policy = WordMatchPolicy::all_occurrences) {
    RouteScore score;
    for (const RouteStep& step : steps) {
        if (!(step.distance_m > 0.0))
            throw ZeroDistanceStep("route_score: step with non-positive distance");
        for (const auto& [word, weight] : extract_direction_words(step, policy)) {
            double term = static_cast<double>(weight) / step.distance_m;
            score.contributions.push_back({word, weight, step.distance_m, term});
            score.value += term;
        }
    }
    return score;
}

// Fastest route wins; ties go to the route with fewer steps, then to the
// earlier one in the input.
inline const Route& select_fastest_route(std::span<const Route> routes) {
    if (routes.empty()) throw EmptyInput("select_fastest_route: no routes");
    std::size_t best = 0;
    for (std::size_t i = 1; i < routes.size(); ++i) {
        if (routes[i].duration_s < routes[best].duration_s ||
            (routes[i].duration_s == routes[best].duration_s &&
             routes[i].steps.size() < routes[best].steps.size()))
            best = i;
    }
    return routes[best];
}

// Cached route file: {"pair_id": str, "routes": [{"duration_s": number,
// "steps": [{"text": str, "distance_m": number}]}]}
struct RouteFile {
    std::string pair_id;
    std::vector<Route> routes;
};

inline RouteFile parse_route_file(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("pair_id") || !j["pair_id"].is_string() ||
        !j.contains("routes") || !j["routes"].is_array())
        throw MalformedRecord(0, "route file needs pair_id and routes[]");
    RouteFile file;
    file.pair_id = j["pair_id"].get<std::string>();
    for (const auto& jr : j["routes"]) {
        if (!jr.contains("duration_s") || !jr["duration_s"].is_number() ||
            !jr.contains("steps") || !jr["steps"].is_array())
            throw MalformedRecord(0, "route needs duration_s and steps[]");
        Route route;
        route.duration_s = jr["duration_s"].get<double>();
        for (const auto& js : jr["steps"]) {
            if (!js.contains("text") || !js["text"].is_string() || !js.contains("distance_m") ||
                !js["distance_m"].is_number())
                throw MalformedRecord(0, "step needs text and distance_m");
            RouteStep step;
            step.instruction = js["text"].get<std::string>();
            step.distance_m = js["distance_m"].get<double>();
            if (js.contains("duration_s") && js["duration_s"].is_number())
                step.duration_s = js["duration_s"].get<double>();
            route.steps.push_back(std::move(step));
        }
        file.routes.push_back(std::move(route));
    }
    return file;
}

}  // namespace footfall
