#include <cmath>
#include <fstream>
#include <limits>

#include "doctest.h"
#include "routeforge/error.hpp"
#include "routeforge/instance.hpp"
#include "test_support.hpp"

using namespace routeforge;
using namespace testsupport;

TEST_CASE("euclidean distance and matrix construction") {
    CHECK(euclidean_distance({0, 0}, {3, 4}) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(euclidean_distance({1, 1}, {1, 1}) == 0.0);

    const auto instance = apex5();
    const DistanceMatrix m = build_distance_matrix(instance);
    REQUIRE(m.size() == 5);
    CHECK_FALSE(m.empty());
    // Rectangle-plus-apex geometry: one diagonal pair is exactly sqrt(8).
    CHECK(m.at(2, 4) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-15));
    CHECK(m.at(0, 1) == 4.0);
    CHECK(m.at(0, 3) == 3.0);
    for (int i = 0; i < m.size(); ++i) {
        CHECK(m.at(i, i) == 0.0);
        for (int j = 0; j < m.size(); ++j) CHECK(m.at(i, j) == m.at(j, i));
    }
}

TEST_CASE("non-finite coordinates are rejected") {
    auto instance = unit_square();
    instance.cities[2].y = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(build_distance_matrix(instance), Error);
    try {
        build_distance_matrix(instance);
    } catch (const Error& e) {
        CHECK(e.code() == "NONFINITE_COORDINATE");
    }
    const auto result = validate_instance(instance);
    CHECK_FALSE(result.ok());
    CHECK(result.has("NONFINITE_COORDINATE"));
}

TEST_CASE("validation accepts the reference fixtures") {
    for (const auto& instance : {unit_square(), apex5(), line3_two_days()}) {
        const auto result = validate_instance(instance);
        CHECK(result.ok());
        CHECK(result.defects.empty());
    }
}

TEST_CASE("validation reports structural defects with stable codes") {
    SUBCASE("bad day count") {
        auto instance = line3_two_days();
        instance.days = 0;
        CHECK(validate_instance(instance).has("BAD_DAY_COUNT"));
    }
    SUBCASE("single-route instance with several days") {
        auto instance = unit_square();
        instance.days = 2;
        CHECK(validate_instance(instance).has("BAD_DAY_COUNT"));
    }
    SUBCASE("depot index out of range") {
        auto instance = unit_square();
        instance.depots = {9};
        CHECK(validate_instance(instance).has("DEPOT_INDEX_OUT_OF_RANGE"));
    }
    SUBCASE("depot count mismatch for single-depot types") {
        auto instance = unit_square();
        instance.depots = {0, 1};
        CHECK(validate_instance(instance).has("DEPOT_COUNT_MISMATCH"));
    }
    SUBCASE("depot-per-day count and duplicates") {
        std::mt19937 rng(7);
        auto instance = random_instance(rng, ProblemType::MultiDayDepotPerDay, 6, 2);
        instance.depots = {0};
        CHECK(validate_instance(instance).has("DEPOT_COUNT_MISMATCH"));
        instance.depots = {1, 1};
        const auto result = validate_instance(instance);
        CHECK(result.has("DUPLICATE_DEPOT"));
        CHECK_FALSE(result.ok());
    }
    SUBCASE("too few cities names the required minimum") {
        auto instance = line3_two_days();
        instance.cities = {{0, 0}, {1, 0}};
        const auto result = validate_instance(instance);
        REQUIRE(result.has("TOO_FEW_CITIES"));
        for (const auto& defect : result.defects) {
            if (defect.code == "TOO_FEW_CITIES") {
                CHECK(defect.message == "need at least days + 1 = 3 cities, got 2");
            }
        }
    }
    SUBCASE("several defects are reported together") {
        auto instance = unit_square();
        instance.days = 0;
        instance.depots = {42, 43};
        const auto result = validate_instance(instance);
        CHECK(result.has("BAD_DAY_COUNT"));
        CHECK(result.has("DEPOT_INDEX_OUT_OF_RANGE"));
        CHECK(result.has("DEPOT_COUNT_MISMATCH"));
    }
}

TEST_CASE("scale warning is non-fatal and kicks in past the threshold") {
    std::mt19937 rng(11);
    auto small = random_instance(rng, ProblemType::TspSingle, kScaleWarningThreshold, 1);
    CHECK_FALSE(validate_instance(small).has("SCALE_WARNING"));

    auto big = random_instance(rng, ProblemType::TspSingle, kScaleWarningThreshold + 1, 1);
    const auto result = validate_instance(big);
    CHECK(result.has("SCALE_WARNING"));
    CHECK(result.ok());
    for (const auto& defect : result.defects) {
        if (defect.code == "SCALE_WARNING") {
            CHECK_FALSE(defect.fatal);
            CHECK(defect.message.find("21 cities") != std::string::npos);
        }
    }
}

TEST_CASE("problem type tags round-trip and reject garbage") {
    for (auto type : {ProblemType::TspSingle, ProblemType::MultiDaySingleDepot,
                      ProblemType::MultiDayDepotPerDay, ProblemType::Novel}) {
        CHECK(problem_type_from_tag(to_tag(type)) == type);
    }
    CHECK(to_tag(ProblemType::TspSingle) == "TSP_SINGLE");
    CHECK(to_tag(ProblemType::MultiDaySingleDepot) == "MULTI_DAY_SINGLE_DEPOT");
    CHECK(to_tag(ProblemType::MultiDayDepotPerDay) == "MULTI_DAY_DEPOT_PER_DAY");
    CHECK(to_tag(ProblemType::Novel) == "NOVEL");
    CHECK_THROWS_AS(problem_type_from_tag("TSP"), Error);
}

TEST_CASE("depot helpers") {
    const auto instance = line3_two_days();
    CHECK(instance.is_depot(0));
    CHECK_FALSE(instance.is_depot(1));
    CHECK(instance.non_depot_cities() == std::vector<int>{1, 2});

    std::mt19937 rng(3);
    const auto per_day = random_instance(rng, ProblemType::MultiDayDepotPerDay, 5, 2);
    CHECK(per_day.is_depot(0));
    CHECK(per_day.is_depot(1));
    CHECK(per_day.non_depot_cities() == std::vector<int>{2, 3, 4});
}

TEST_CASE("strict JSON parse requires all five fields and nothing else") {
    const nlohmann::json good = {
        {"cities", {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}}},
        {"problem_type", "TSP_SINGLE"},
        {"depots", {0}},
        {"days", 1},
        {"request_text", "short hop"},
    };
    const ProblemInstance parsed = instance_from_json(good);
    CHECK(parsed.cities.size() == 3);
    CHECK(parsed.cities[1] == Point2D{1.0, 0.0});
    CHECK(parsed.problem_type == ProblemType::TspSingle);
    CHECK(parsed.depots == std::vector<int>{0});
    CHECK(parsed.days == 1);
    CHECK(parsed.request_text == "short hop");

    SUBCASE("missing field") {
        auto doc = good;
        doc.erase("days");
        try {
            instance_from_json(doc);
            FAIL("expected INSTANCE_FORMAT");
        } catch (const Error& e) {
            CHECK(e.code() == "INSTANCE_FORMAT");
            CHECK(std::string(e.what()).find("missing field 'days'") != std::string::npos);
        }
    }
    SUBCASE("unknown field") {
        auto doc = good;
        doc["distance_matrix"] = nlohmann::json::array();
        try {
            instance_from_json(doc);
            FAIL("expected INSTANCE_FORMAT");
        } catch (const Error& e) {
            CHECK(e.code() == "INSTANCE_FORMAT");
            CHECK(std::string(e.what()).find("unknown field 'distance_matrix'") !=
                  std::string::npos);
        }
    }
}

TEST_CASE("instance file round-trip") {
    const auto dir = fresh_dir("instance_io");
    const auto path = (dir / "apex.json").string();
    const auto original = apex5();
    save_instance(original, path);

    const ProblemInstance loaded = load_instance(path);
    CHECK(loaded.cities == original.cities);
    CHECK(loaded.problem_type == original.problem_type);
    CHECK(loaded.depots == original.depots);
    CHECK(loaded.days == original.days);
    CHECK(loaded.request_text == original.request_text);

    try {
        load_instance((dir / "missing.json").string());
        FAIL("expected IO_ERROR");
    } catch (const Error& e) {
        CHECK(e.code() == "IO_ERROR");
    }
}
