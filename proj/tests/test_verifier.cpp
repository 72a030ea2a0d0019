#include <cmath>

#include "doctest.h"
#include "routeforge/verifier.hpp"
#include "test_support.hpp"

using namespace routeforge;
using namespace testsupport;

namespace {

CandidateSolution make_solution(std::vector<std::vector<int>> routes) {
    CandidateSolution s;
    s.routes = std::move(routes);
    return s;
}

std::vector<ViolationKind> kinds_of(const VerificationReport& report) {
    std::vector<ViolationKind> kinds;
    for (const auto& v : report.violations) kinds.push_back(v.kind);
    return kinds;
}

}  // namespace

TEST_CASE("compute_cost sums consecutive pairs over every route") {
    const auto spf = spf_for(apex5());
    CHECK(compute_cost(make_solution({{0, 1, 2, 4, 3, 0}}), spf.matrix) ==
          doctest::Approx(kApex5OptimalCost).epsilon(1e-12));

    const auto line = spf_for(line3_two_days());
    CHECK(compute_cost(make_solution({{0, 1, 0}, {0, 2, 0}}), line.matrix) == 4.0);
    CHECK(compute_cost(make_solution({{0, 0}, {0, 1, 2, 0}}), line.matrix) == 4.0);
    // Degenerate routes contribute nothing.
    CHECK(compute_cost(make_solution({{0}, {}}), line.matrix) == 0.0);
}

TEST_CASE("a feasible tour earns an empty report with a recomputed cost") {
    const auto spf = spf_for(unit_square());
    const auto report = verify(make_solution({{0, 1, 2, 3, 0}}), spf, spf.instance);
    CHECK(report.feasible);
    CHECK(report.violations.empty());
    CHECK(report.messages().empty());
    CHECK(report.unchecked_constraints.empty());
    REQUIRE(report.recomputed_cost.has_value());
    CHECK(*report.recomputed_cost == 4.0);
}

TEST_CASE("each violation kind carries its pinned message") {
    const auto spf = spf_for(unit_square());
    auto check_single = [&](std::vector<std::vector<int>> routes, ViolationKind kind, int subject,
                            const std::string& message) {
        const auto report = verify(make_solution(std::move(routes)), spf, spf.instance);
        CHECK_FALSE(report.feasible);
        CHECK_FALSE(report.recomputed_cost.has_value());
        REQUIRE(report.violations.size() == 1);
        CHECK(report.violations[0].kind == kind);
        CHECK(report.violations[0].subject == subject);
        CHECK(report.violations[0].message == message);
    };

    check_single({{0, 1, 2, 0}}, ViolationKind::CityNotVisited, 3,
                 "City 3 is never visited.");
    check_single({{0, 1, 2, 3, 1, 0}}, ViolationKind::CityVisitedMultiple, 1,
                 "City 1 is visited 2 times, but it must be visited exactly once.");
    check_single({{1, 2, 3, 0}}, ViolationKind::WrongStartDepot, 0,
                 "The route for day 1 must start at depot city 0, but it starts at city 1.");
    check_single({{0, 1, 2, 3}}, ViolationKind::WrongEndDepot, 0,
                 "The route for day 1 must end at depot city 0, but it ends at city 3.");
    check_single({{0, 1, 2, 0}, {0, 3, 0}}, ViolationKind::WrongRouteCount, 2,
                 "The solution has 2 route(s), but exactly 1 are required, one for each day.");
    check_single({{0, 1, 0, 2, 3, 0}}, ViolationKind::DepotInForeignRoute, 0,
                 "Depot city 0 appears inside the route for day 1, where it is not allowed.");
}

TEST_CASE("a depot repeated inside one route is flagged once per route") {
    const auto spf = spf_for(unit_square());
    const auto report = verify(make_solution({{0, 1, 0, 2, 0, 3, 0}}), spf, spf.instance);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].kind == ViolationKind::DepotInForeignRoute);
}

TEST_CASE("per-day depots catch foreign depots and wrong endpoints") {
    std::mt19937 rng(31);
    auto instance = random_instance(rng, ProblemType::MultiDayDepotPerDay, 5, 2);
    const auto spf = spf_for(instance);

    SUBCASE("the other day's depot may not appear mid-route") {
        const auto report =
            verify(make_solution({{0, 2, 1, 3, 0}, {1, 4, 1}}), spf, instance);
        CHECK_FALSE(report.feasible);
        REQUIRE(report.violations.size() == 1);
        CHECK(report.violations[0].kind == ViolationKind::DepotInForeignRoute);
        CHECK(report.violations[0].message ==
              "Depot city 1 appears inside the route for day 1, where it is not allowed.");
    }
    SUBCASE("each day checks its own depot") {
        const auto report =
            verify(make_solution({{1, 2, 3, 1}, {1, 4, 1}}), spf, instance);
        const auto kinds = kinds_of(report);
        REQUIRE(kinds.size() == 2);
        CHECK(kinds[0] == ViolationKind::WrongStartDepot);
        CHECK(report.violations[0].message ==
              "The route for day 1 must start at depot city 0, but it starts at city 1.");
        CHECK(kinds[1] == ViolationKind::WrongEndDepot);
        CHECK(report.violations[0].subject == 0);
    }
    SUBCASE("a fully correct plan passes") {
        const auto report =
            verify(make_solution({{0, 2, 3, 0}, {1, 4, 1}}), spf, instance);
        CHECK(report.feasible);
    }
}

TEST_CASE("violations are reported in fixed order, all at once") {
    const auto spf = spf_for(unit_square());
    const auto report = verify(make_solution({{1, 2, 1}, {0, 0}}), spf, spf.instance);
    CHECK(kinds_of(report) ==
          std::vector<ViolationKind>{ViolationKind::WrongRouteCount,
                                     ViolationKind::WrongStartDepot, ViolationKind::WrongEndDepot,
                                     ViolationKind::CityVisitedMultiple,
                                     ViolationKind::CityNotVisited});
    CHECK(report.messages().size() == 5);
}

TEST_CASE("generated formulations are checked only as far as they reach") {
    StructuredProblemFormulation raw;
    raw.case_id = kGeneratedCaseId;
    raw.description = "endpoints only";
    raw.constraints = {ConstraintSpec::route_starts_ends_at_depot(0),
                       ConstraintSpec::free_text("Take it easy.")};
    const auto spf = bind_generated_spf(raw, unit_square());

    // City 3 is missing, but no coverage constraint was classified.
    const auto report = verify(make_solution({{0, 1, 2, 0}}), spf, spf.instance);
    CHECK(report.feasible);
    CHECK(report.unchecked_constraints == std::vector<std::string>{"Take it easy."});

    // The instance's own depot list still anchors the interior-depot check.
    const auto interior = verify(make_solution({{0, 1, 0, 2, 0}}), spf, spf.instance);
    CHECK_FALSE(interior.feasible);
    REQUIRE(interior.violations.size() == 1);
    CHECK(interior.violations[0].kind == ViolationKind::DepotInForeignRoute);
}

TEST_CASE("verification falls back to a fresh matrix when none is attached") {
    StructuredProblemFormulation spf;
    spf.case_id = kGeneratedCaseId;
    spf.constraints = {ConstraintSpec::visit_all_exactly_once(),
                       ConstraintSpec::route_starts_ends_at_depot(0)};
    spf.instance = unit_square();
    spf.output_format.days = 1;
    REQUIRE(spf.matrix.empty());
    const auto report = verify(make_solution({{0, 1, 2, 3, 0}}), spf, spf.instance);
    CHECK(report.feasible);
    CHECK(report.recomputed_cost == 4.0);
}

TEST_CASE("cost comparison treats near-equal values as ties") {
    CHECK(compare_costs(100.0, 100.2) == Ordering::ABetter);
    CHECK(compare_costs(100.2, 100.0) == Ordering::BBetter);
    CHECK(compare_costs(100.0, 100.00005) == Ordering::Tie);  // within 1e-6 relative
    CHECK(compare_costs(0.5, 0.5000005) == Ordering::Tie);    // floor of 1 on the scale
    CHECK(compare_costs(1.0, 1.0 + 2e-6) == Ordering::ABetter);
    CHECK(compare_costs(0.0, 0.0) == Ordering::Tie);

    CandidateSolution a, b;
    a.routes = {{0, 1, 0}};
    b.routes = {{0, 2, 0}};
    CHECK(compare_solutions({a, 10.0}, {b, 12.0}) == Ordering::ABetter);
    CHECK(compare_solutions({a, 10.0}, {b, 10.0 + 1e-8}) == Ordering::Tie);
}

TEST_CASE("report serialization names violation kinds by tag") {
    const auto spf = spf_for(unit_square());
    const auto report = verify(make_solution({{0, 1, 2, 0}}), spf, spf.instance);
    const nlohmann::json doc = report;
    CHECK(doc.at("feasible") == false);
    CHECK_FALSE(doc.contains("recomputed_cost"));
    REQUIRE(doc.at("violations").size() == 1);
    CHECK(doc.at("violations")[0].at("kind") == "CITY_NOT_VISITED");
    CHECK(doc.at("violations")[0].at("subject") == 3);
    CHECK(doc.at("violations")[0].at("message") == "City 3 is never visited.");

    const auto clean = verify(make_solution({{0, 1, 2, 3, 0}}), spf, spf.instance);
    const nlohmann::json clean_doc = clean;
    CHECK(clean_doc.at("recomputed_cost") == 4.0);
}

TEST_CASE("single mutations are always detected with the right kind") {
    std::mt19937 rng(404);
    const ProblemType types[] = {ProblemType::TspSingle, ProblemType::MultiDaySingleDepot,
                                 ProblemType::MultiDayDepotPerDay};
    std::uniform_int_distribution<int> extra_cities(2, 6);
    std::uniform_int_distribution<int> day_count(2, 3);
    for (int i = 0; i < 300; ++i) {
        const ProblemType type = types[i % 3];
        const int days = type == ProblemType::TspSingle ? 1 : day_count(rng);
        const int n = days + 1 + extra_cities(rng);
        const auto instance = random_instance(rng, type, n, days);
        const auto spf = spf_for(instance);
        const auto solution = random_feasible_solution(rng, instance);

        const auto clean = verify(solution, spf, instance);
        REQUIRE(clean.feasible);
        REQUIRE(clean.violations.empty());

        const MutationKind mutation = kAllMutations[(i / 3) % 6];
        const auto broken = mutate(rng, instance, solution, mutation);
        const auto report = verify(broken, spf, instance);
        REQUIRE_FALSE(report.feasible);
        const auto kinds = kinds_of(report);
        REQUIRE(std::count(kinds.begin(), kinds.end(), expected_violation(mutation)) >= 1);
    }
}
