#include <cmath>
#include <functional>

#include "doctest.h"
#include "routeforge/error.hpp"
#include "routeforge/oracle.hpp"
#include "routeforge/verifier.hpp"
#include "test_support.hpp"

using namespace routeforge;
using namespace testsupport;

TEST_CASE("brute force finds the square perimeter and canonicalizes ties") {
    const auto bound = brute_force_optimal(unit_square());
    CHECK(bound.kind == BoundKind::Exact);
    CHECK(bound.cost == doctest::Approx(4.0).epsilon(1e-12));
    // [0,3,2,1,0] costs the same; the lexicographically smaller tour wins.
    CHECK(bound.solution.routes == std::vector<std::vector<int>>{{0, 1, 2, 3, 0}});
    CHECK(bound.solution.source == SolutionSource::Oracle);

    const auto again = brute_force_optimal(unit_square());
    CHECK(again.solution.routes == bound.solution.routes);
    CHECK(again.cost == bound.cost);
}

TEST_CASE("brute force solves the apex instance exactly") {
    const auto bound = brute_force_optimal(apex5());
    CHECK(bound.cost == doctest::Approx(kApex5OptimalCost).epsilon(1e-12));
    CHECK(bound.solution.routes == std::vector<std::vector<int>>{{0, 1, 2, 4, 3, 0}});
}

TEST_CASE("multi-day enumeration includes empty days and breaks ties lexicographically") {
    const auto instance = line3_two_days();
    const auto bound = brute_force_optimal(instance);
    CHECK(bound.cost == doctest::Approx(4.0).epsilon(1e-12));
    // Both cities on day two ties with one city per day; the all-on-one-day
    // plan [[0,0],[0,1,2,0]] sorts lexicographically first among the optima.
    CHECK(bound.solution.routes == std::vector<std::vector<int>>{{0, 0}, {0, 1, 2, 0}});

    const auto spf = spf_for(instance);
    CHECK(verify(bound.solution, spf, instance).feasible);
}

TEST_CASE("per-day depots are honored by the enumeration") {
    std::mt19937 rng(99);
    const auto instance = random_instance(rng, ProblemType::MultiDayDepotPerDay, 6, 2);
    const auto bound = brute_force_optimal(instance);
    REQUIRE(bound.solution.routes.size() == 2);
    CHECK(bound.solution.routes[0].front() == 0);
    CHECK(bound.solution.routes[0].back() == 0);
    CHECK(bound.solution.routes[1].front() == 1);
    CHECK(bound.solution.routes[1].back() == 1);
    CHECK(verify(bound.solution, spf_for(instance), instance).feasible);
}

TEST_CASE("oracle limits fail with sized messages") {
    std::mt19937 rng(7);
    auto check_error = [](const std::function<void()>& fn, const std::string& code,
                          const std::string& fragment) {
        try {
            fn();
            FAIL(("expected " + code));
        } catch (const Error& e) {
            CHECK(e.code() == code);
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
        }
    };

    const auto big_single = random_instance(rng, ProblemType::TspSingle, 12, 1);
    check_error([&] { brute_force_optimal(big_single); }, "INSTANCE_TOO_LARGE",
                "at most 11 cities for single-day instances, got 12");

    const auto big_multi = random_instance(rng, ProblemType::MultiDaySingleDepot, 11, 2);
    check_error([&] { brute_force_optimal(big_multi); }, "INSTANCE_TOO_LARGE",
                "at most 9 non-depot cities for multi-day instances, got 10");

    const auto many_days = random_instance(rng, ProblemType::MultiDaySingleDepot, 8, 4);
    check_error([&] { brute_force_optimal(many_days); }, "INSTANCE_TOO_LARGE",
                "at most 3 days, got 4");

    auto novel = unit_square();
    novel.problem_type = ProblemType::Novel;
    check_error([&] { brute_force_optimal(novel); }, "WRONG_TYPE",
                "free-form instances have no enumerable route structure");
    check_error([&] { nearest_neighbor_then_two_opt(novel); }, "WRONG_TYPE",
                "free-form instances have no defined route structure");

    const auto big_dp = random_instance(rng, ProblemType::TspSingle, 19, 1);
    check_error([&] { held_karp_optimal(big_dp); }, "INSTANCE_TOO_LARGE",
                "at most 18 cities, got 19");
    check_error([&] { held_karp_optimal(line3_two_days()); }, "WRONG_TYPE",
                "single-day instances only");
}

TEST_CASE("the subset dynamic program agrees with enumeration") {
    CHECK(held_karp_optimal(unit_square()).cost == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(held_karp_optimal(apex5()).cost ==
          doctest::Approx(kApex5OptimalCost).epsilon(1e-12));

    // Beyond the enumeration limit the dynamic program still works.
    std::mt19937 rng(55);
    const auto mid = random_instance(rng, ProblemType::TspSingle, 13, 1);
    const auto bound = held_karp_optimal(mid);
    CHECK(bound.kind == BoundKind::Exact);
    CHECK(verify(bound.solution, spf_for(mid), mid).feasible);
}

TEST_CASE("2-opt uncrosses a crossing tour and fixes the endpoints") {
    const DistanceMatrix m = build_distance_matrix(unit_square());
    const std::vector<int> crossed = {0, 2, 1, 3, 0};
    const auto improved = two_opt(crossed, m);
    CHECK(improved.front() == 0);
    CHECK(improved.back() == 0);
    CandidateSolution s;
    s.routes = {improved};
    CHECK(compute_cost(s, m) == doctest::Approx(4.0).epsilon(1e-12));

    // Tiny routes pass through untouched.
    CHECK(two_opt({0, 1, 0}, m) == std::vector<int>{0, 1, 0});
    CHECK(two_opt({0, 0}, m) == std::vector<int>{0, 0});
}

TEST_CASE("the heuristic is feasible and never beats the exact optimum") {
    std::mt19937 rng(1);
    for (int i = 0; i < 60; ++i) {
        const ProblemType type = i % 3 == 0   ? ProblemType::TspSingle
                                 : i % 3 == 1 ? ProblemType::MultiDaySingleDepot
                                              : ProblemType::MultiDayDepotPerDay;
        const int days = type == ProblemType::TspSingle ? 1 : 2 + (i % 2);
        const int n = days + 3 + (i % 4);
        const auto instance = random_instance(rng, type, n, days);
        const auto exact = brute_force_optimal(instance);
        const auto heuristic = nearest_neighbor_then_two_opt(instance);

        CHECK(heuristic.kind == BoundKind::Heuristic);
        CHECK(heuristic.solution.source == SolutionSource::Heuristic);
        CHECK(heuristic.cost >= exact.cost - 1e-9);

        const auto spf = spf_for(instance);
        CHECK(verify(exact.solution, spf, instance).feasible);
        CHECK(verify(heuristic.solution, spf, instance).feasible);

        if (type == ProblemType::TspSingle) {
            const auto dp = held_karp_optimal(instance);
            CHECK(dp.cost == doctest::Approx(exact.cost).epsilon(1e-9));
        }
    }
}

TEST_CASE("the heuristic reaches the optimum on the square") {
    const auto bound = nearest_neighbor_then_two_opt(unit_square());
    CHECK(bound.cost == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(verify(bound.solution, spf_for(unit_square()), unit_square()).feasible);
}

TEST_CASE("optimality gaps are labeled by the bound they compare against") {
    const auto exact = brute_force_optimal(apex5());
    const DistanceMatrix m = build_distance_matrix(apex5());
    CandidateSolution naive;
    naive.routes = {{0, 1, 2, 3, 4, 0}};
    const double naive_cost = compute_cost(naive, m);

    const auto gap = optimality_gap(naive_cost, exact);
    CHECK(gap.against == BoundKind::Exact);
    CHECK(gap.ratio == doctest::Approx(naive_cost / exact.cost).epsilon(1e-12));
    CHECK(gap.ratio > 1.2);
    CHECK(gap.ratio < 1.3);

    const auto self_gap = optimality_gap(exact.cost, exact);
    CHECK(self_gap.ratio == 1.0);

    const auto heuristic = nearest_neighbor_then_two_opt(apex5());
    CHECK(optimality_gap(naive_cost, heuristic).against == BoundKind::Heuristic);

    CostBound degenerate;
    degenerate.cost = 0.0;
    try {
        optimality_gap(1.0, degenerate);
        FAIL("expected ZERO_BOUND");
    } catch (const Error& e) {
        CHECK(e.code() == "ZERO_BOUND");
        CHECK(std::string(e.what()).find("cost bound is not positive") != std::string::npos);
    }
}

TEST_CASE("a degenerate coincident-city instance yields a zero bound") {
    ProblemInstance flat;
    flat.cities = {{2, 2}, {2, 2}, {2, 2}};
    flat.problem_type = ProblemType::TspSingle;
    flat.depots = {0};
    flat.days = 1;
    flat.request_text = "everything in one spot";
    const auto bound = brute_force_optimal(flat);
    CHECK(bound.cost == 0.0);
    CHECK_THROWS_AS(optimality_gap(0.0, bound), Error);
}

TEST_CASE("cost bounds serialize kind, cost, and routes") {
    const auto bound = brute_force_optimal(unit_square());
    const nlohmann::json doc = bound;
    CHECK(doc.at("kind") == "EXACT");
    CHECK(doc.at("cost") == doctest::Approx(4.0));
    CHECK(doc.at("routes") == nlohmann::json::array({{0, 1, 2, 3, 0}}));

    const nlohmann::json heuristic_doc = nearest_neighbor_then_two_opt(unit_square());
    CHECK(heuristic_doc.at("kind") == "HEURISTIC");
}
