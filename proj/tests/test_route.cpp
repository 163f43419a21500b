#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "footfall/route.hpp"
#include "footfall/rng.hpp"

using namespace footfall;

namespace {

RouteStep step_of(std::string text, double distance_m) {
    return {std::move(text), distance_m, std::nullopt};
}

}  // namespace

TEST_CASE("the weight table carries exactly the thirteen words with their values") {
    CHECK(WeightTable::word_count == 13);
    CHECK(WeightTable::entries.size() == 14);  // toward + towards spell one word
    for (const char* w : {"head", "toward", "towards", "continue", "follow", "straight", "walk"})
        CHECK(WeightTable::weight_of(w) == 1);
    CHECK(WeightTable::weight_of("slight") == 2);
    CHECK(WeightTable::weight_of("sharp") == 2);
    CHECK(WeightTable::weight_of("turn") == 3);
    CHECK(WeightTable::weight_of("cross") == 4);
    CHECK(WeightTable::weight_of("upper") == 5);
    CHECK(WeightTable::weight_of("take") == 5);
    CHECK(WeightTable::weight_of("roundabout") == 6);
    CHECK(WeightTable::weight_of("left") == 0);
    CHECK(WeightTable::weight_of("takeaway") == 0);
}

TEST_CASE("select_fastest_route picks the minimal duration") {
    std::vector<Route> one{{300.0, {step_of("Walk", 10)}}};
    CHECK(&select_fastest_route(one) == &one[0]);

    std::vector<Route> three{{300.0, {}}, {240.0, {}}, {400.0, {}}};
    CHECK(&select_fastest_route(three) == &three[1]);
}

TEST_CASE("select_fastest_route breaks ties by step count, then input order") {
    std::vector<Route> tied{
        {300.0, std::vector<RouteStep>(6, step_of("Walk", 10))},
        {300.0, std::vector<RouteStep>(4, step_of("Walk", 10))},
    };
    CHECK(&select_fastest_route(tied) == &tied[1]);

    std::vector<Route> same{
        {300.0, std::vector<RouteStep>(4, step_of("Walk", 10))},
        {300.0, std::vector<RouteStep>(4, step_of("Walk", 10))},
    };
    CHECK(&select_fastest_route(same) == &same[0]);

    std::vector<Route> none;
    CHECK_THROWS_AS(select_fastest_route(none), EmptyInput);
}

TEST_CASE("extraction finds table words case-insensitively on word boundaries") {
    auto turn = extract_direction_words(step_of("Turn left onto High St", 50));
    REQUIRE(turn.size() == 1);
    CHECK(turn[0].first == "turn");
    CHECK(turn[0].second == 3);

    auto two = extract_direction_words(step_of("Head north toward Market Sq", 100));
    REQUIRE(two.size() == 2);
    CHECK(two[0].first == "head");
    CHECK(two[0].second == 1);
    CHECK(two[1].first == "toward");
    CHECK(two[1].second == 1);

    CHECK(extract_direction_words(step_of("Proceed along the river", 80)).empty());
    CHECK(extract_direction_words(step_of("Visit the takeaway", 80)).empty());
}

TEST_CASE("extraction tolerates capitalization and punctuation") {
    Rng rng(301);
    const std::string base = "turn left cross at the roundabout";
    auto expected = extract_direction_words(step_of(base, 10));
    REQUIRE(expected.size() == 3);
    for (int trial = 0; trial < 50; ++trial) {
        std::string mangled;
        for (char c : base) {
            if (c == ' ') {
                const char* fills[] = {" ", ", ", "; ", " - ", "  ", "! "};
                mangled += fills[rng.below(6)];
            } else {
                mangled += rng.bernoulli(0.5)
                               ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                               : c;
            }
        }
        auto got = extract_direction_words(step_of(mangled, 10));
        CHECK(got == expected);
    }
}

TEST_CASE("first_per_step policy keeps only one term per step") {
    auto one = extract_direction_words(step_of("Head north toward Market Sq", 100),
                                       WordMatchPolicy::first_per_step);
    REQUIRE(one.size() == 1);
    CHECK(one[0].first == "head");
}

TEST_CASE("route score matches the derived fixtures") {
    RouteScore a = route_score(std::vector<RouteStep>{step_of("Turn left onto High St", 50.0)});
    CHECK(a.value == Catch::Approx(0.06).margin(1e-12));
    REQUIRE(a.contributions.size() == 1);
    CHECK(a.contributions[0].word == "turn");

    RouteScore b = route_score(std::vector<RouteStep>{
        step_of("Head north toward Market Sq", 100.0),
        step_of("Turn right onto Low Rd", 50.0),
    });
    CHECK(b.value == Catch::Approx(0.08).margin(1e-12));
    REQUIRE(b.contributions.size() == 3);
}

TEST_CASE("route score of no steps is zero") {
    CHECK(route_score(std::vector<RouteStep>{}).value == 0.0);
}

TEST_CASE("route score rejects non-positive distances") {
    CHECK_THROWS_AS(route_score(std::vector<RouteStep>{step_of("Turn left", 0.0)}),
                    ZeroDistanceStep);
}

TEST_CASE("route score is additive over step lists") {
    Rng rng(303);
    const char* texts[] = {"Turn left",       "Head toward the square", "Cross the road",
                           "Take the stairs", "Slight right",           "Nothing here"};
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<RouteStep> s1, s2;
        for (std::size_t i = 0; i < 3 + rng.below(4); ++i)
            s1.push_back(step_of(texts[rng.below(6)], 1.0 + 200.0 * rng.uniform()));
        for (std::size_t i = 0; i < 3 + rng.below(4); ++i)
            s2.push_back(step_of(texts[rng.below(6)], 1.0 + 200.0 * rng.uniform()));
        std::vector<RouteStep> joined = s1;
        joined.insert(joined.end(), s2.begin(), s2.end());
        CHECK(route_score(joined).value ==
              Catch::Approx(route_score(s1).value + route_score(s2).value).margin(1e-12));
    }
}

TEST_CASE("doubling every distance halves the score exactly") {
    Rng rng(305);
    std::vector<RouteStep> steps;
    const char* texts[] = {"Turn left", "Cross here", "Head toward town", "Take the underpass"};
    for (int i = 0; i < 12; ++i)
        steps.push_back(step_of(texts[rng.below(4)], 1.0 + 300.0 * rng.uniform()));
    std::vector<RouteStep> doubled = steps;
    for (auto& s : doubled) s.distance_m *= 2.0;
    CHECK(route_score(doubled).value == route_score(steps).value / 2.0);
}

TEST_CASE("route files parse from the cached JSON schema") {
    nlohmann::json j = nlohmann::json::parse(R"({
        "pair_id": "A|B",
        "routes": [
            {"duration_s": 300, "steps": [{"text": "Turn left onto High St", "distance_m": 50}]},
            {"duration_s": 240, "steps": [{"text": "Head north toward Market Sq", "distance_m": 100},
                                           {"text": "Turn right onto Low Rd", "distance_m": 50}]}
        ]
    })");
    RouteFile f = parse_route_file(j);
    CHECK(f.pair_id == "A|B");
    REQUIRE(f.routes.size() == 2);
    const Route& fastest = select_fastest_route(f.routes);
    CHECK(fastest.duration_s == 240.0);
    CHECK(route_score(fastest.steps).value == Catch::Approx(0.08).margin(1e-12));

    nlohmann::json bad = nlohmann::json::parse(R"({"routes": []})");
    CHECK_THROWS_AS(parse_route_file(bad), MalformedRecord);
}
