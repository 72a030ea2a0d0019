#include <fstream>

#include "doctest.h"
#include "routeforge/parsers.hpp"
#include "routeforge/prompts.hpp"
#include "routeforge/verifier.hpp"
#include "test_support.hpp"

using namespace routeforge;
using namespace testsupport;

TEST_CASE("match responses accept ids and NO_MATCH with surrounding prose") {
    const CaseLibrary library = CaseLibrary::builtin();

    auto parse = [&](const std::string& text) { return parse_match_response(text, library); };

    CHECK(parse("TSP_SINGLE").value->case_id == "TSP_SINGLE");
    CHECK(parse("tsp_single").value->case_id == "TSP_SINGLE");
    CHECK(parse("I believe MULTI_DAY_SINGLE_DEPOT fits best.").value->case_id ==
          "MULTI_DAY_SINGLE_DEPOT");
    CHECK(parse("Answer: multi_day_depot_per_day").value->case_id == "MULTI_DAY_DEPOT_PER_DAY");
    CHECK_FALSE(parse("NO_MATCH").value->matched);
    CHECK_FALSE(parse("Sadly, no_match here.").value->matched);

    SUBCASE("the earliest standalone token wins") {
        const auto outcome = parse("NO_MATCH, though TSP_SINGLE was close.");
        REQUIRE(outcome.ok());
        CHECK_FALSE(outcome.value->matched);
        const auto flipped = parse("TSP_SINGLE, definitely not NO_MATCH.");
        CHECK(flipped.value->case_id == "TSP_SINGLE");
    }
    SUBCASE("ids embedded in larger words do not count") {
        const auto glued = parse("XTSP_SINGLE TSP_SINGLE_EXTRA");
        CHECK_FALSE(glued.ok());
        CHECK(glued.error.code == "UNPARSEABLE_MATCH");
        CHECK(glued.error.message == "response names no library case and is not NO_MATCH");
    }
    SUBCASE("garbage is a parse failure, not a NO_MATCH") {
        const auto outcome = parse("I would just walk everywhere.");
        CHECK_FALSE(outcome.ok());
        CHECK(outcome.error.code == "UNPARSEABLE_MATCH");
    }
}

TEST_CASE("among ids starting at the same position the longer one wins") {
    // Underscore ids cannot tie on position (underscore is a word character),
    // so the rule is exercised with dash-separated ids from a custom library.
    const auto dir = fresh_dir("match_prefix_library");
    const auto path = (dir / "library.json").string();
    {
        std::ofstream out(path);
        out << R"([
  {"case_id": "CITY-LOOP", "description": "short", "constraint_templates": [],
   "objective": "MINIMIZE_TOTAL_COST", "output_format": "route-lines-v1"},
  {"case_id": "CITY-LOOP-NIGHTLY", "description": "long", "constraint_templates": [],
   "objective": "MINIMIZE_TOTAL_COST", "output_format": "route-lines-v1"}
])";
    }
    const CaseLibrary library = CaseLibrary::load(path);
    const auto outcome = parse_match_response("CITY-LOOP-NIGHTLY", library);
    REQUIRE(outcome.ok());
    CHECK(outcome.value->case_id == "CITY-LOOP-NIGHTLY");
}

TEST_CASE("solution parser extracts route lines from chatty responses") {
    const auto spf = spf_for(unit_square());

    SUBCASE("prose around the payload is ignored") {
        const auto result = parse_solution_response(
            "Sure, here is a strong plan:\n\nDay 1: 0 -> 1 -> 2 -> 3 -> 0\nTotal cost: 4.00\n"
            "Let me know if you need variants.",
            spf);
        REQUIRE(result.ok());
        CHECK(result.value->routes == std::vector<std::vector<int>>{{0, 1, 2, 3, 0}});
        CHECK(result.value->reported_cost == 4.0);
        CHECK(result.value->source == SolutionSource::Model);
    }
    SUBCASE("first Day line wins over later repeats") {
        const auto result = parse_solution_response(
            "Day 1: 0 -> 1 -> 2 -> 3 -> 0\nOn reflection:\nDay 1: 0 -> 3 -> 2 -> 1 -> 0\n", spf);
        REQUIRE(result.ok());
        CHECK(result.value->routes[0] == std::vector<int>{0, 1, 2, 3, 0});
    }
    SUBCASE("a sentence-final period is tolerated") {
        const auto result = parse_solution_response("Day 1: 0 -> 2 -> 1 -> 3 -> 0.", spf);
        REQUIRE(result.ok());
        CHECK(result.value->routes[0] == std::vector<int>{0, 2, 1, 3, 0});
    }
    SUBCASE("missing reported cost stays absent") {
        const auto result = parse_solution_response("Day 1: 0 -> 1 -> 2 -> 3 -> 0", spf);
        REQUIRE(result.ok());
        CHECK_FALSE(result.value->reported_cost.has_value());
    }
    SUBCASE("missing day line names the day") {
        const auto result = parse_solution_response("Route: 0, 1, 2, 3, 0", spf);
        REQUIRE_FALSE(result.ok());
        CHECK(result.error.code == "MISSING_DAY_LINE");
        CHECK(result.error.message ==
              "no line of the form 'Day 1: ...' was found in the response");
    }
    SUBCASE("malformed lines are quoted back") {
        for (const std::string bad :
             {"Day 1: 0 -> x -> 0", "Day 1: 0", "Day 1: 0 -> 1 ->", "Day 1:",
              "Day 1: 0 => 1 => 0", "Day 1: 0 -> 1000000000 -> 0"}) {
            const auto result = parse_solution_response(bad, spf);
            REQUIRE_FALSE(result.ok());
            CHECK(result.error.code == "MALFORMED_ROUTE_LINE");
            CHECK(result.error.message.find("' is not of the form 'Day 1: <i0> -> <i1> -> ... -> "
                                            "<i0>'") != std::string::npos);
        }
    }
    SUBCASE("out-of-range indices name the index and the valid range") {
        const auto result = parse_solution_response("Day 1: 0 -> 9 -> 0", spf);
        REQUIRE_FALSE(result.ok());
        CHECK(result.error.code == "INDEX_OUT_OF_RANGE");
        CHECK(result.error.message ==
              "city index 9 in line 'Day 1: 0 -> 9 -> 0' is outside 0..3");
    }
}

TEST_CASE("solution parser handles multi-day plans and windows-style newlines") {
    const auto spf = spf_for(line3_two_days());
    const auto result = parse_solution_response(
        "Day 1: 0 -> 1 -> 0\r\nDay 2: 0 -> 2 -> 0\r\nTotal cost: 4\r\n", spf);
    REQUIRE(result.ok());
    CHECK(result.value->routes ==
          std::vector<std::vector<int>>{{0, 1, 0}, {0, 2, 0}});
    CHECK(result.value->reported_cost == 4.0);

    const auto missing = parse_solution_response("Day 1: 0 -> 1 -> 2 -> 0\n", spf);
    REQUIRE_FALSE(missing.ok());
    CHECK(missing.error.code == "MISSING_DAY_LINE");
    CHECK(missing.error.message ==
          "no line of the form 'Day 2: ...' was found in the response");
}

TEST_CASE("rendered solutions parse back to the same routes, a thousand times over") {
    std::mt19937 rng(2024);
    const ProblemType types[] = {ProblemType::TspSingle, ProblemType::MultiDaySingleDepot,
                                 ProblemType::MultiDayDepotPerDay};
    std::uniform_int_distribution<int> extra_cities(3, 8);
    std::uniform_int_distribution<int> day_count(2, 3);
    for (int i = 0; i < 1000; ++i) {
        const ProblemType type = types[i % 3];
        const int days = type == ProblemType::TspSingle ? 1 : day_count(rng);
        const int n = days + extra_cities(rng);
        const auto instance = random_instance(rng, type, n, days);
        const auto spf = spf_for(instance);
        const auto solution = random_feasible_solution(rng, instance);
        const double cost = compute_cost(solution, spf.matrix);

        const std::string rendered = format_route_lines_with_cost(solution, cost);
        const auto parsed = parse_solution_response(rendered, spf);
        REQUIRE(parsed.ok());
        REQUIRE(parsed.value->routes == solution.routes);

        const auto wrapped = parse_solution_response(
            "Here is my plan.\n" + rendered + "Hope it helps!\n", spf);
        REQUIRE(wrapped.ok());
        REQUIRE(wrapped.value->routes == solution.routes);
    }
}

TEST_CASE("constraint sentences classify by rule precedence") {
    SUBCASE("per-day depot assignment") {
        const auto c = classify_constraint_sentence("Day 2 must start and end at city 5.");
        CHECK(c == ConstraintSpec::depot_assigned_per_day({{1, 5}}));
    }
    SUBCASE("day-specific wording beats the generic endpoint rule") {
        const auto c = classify_constraint_sentence("Day 1 must start and end at city 2.");
        CHECK(c.kind == ConstraintKind::DepotAssignedPerDay);
        CHECK(c.day_depots == std::map<int, int>{{0, 2}});
    }
    SUBCASE("shared depot endpoints") {
        const auto c =
            classify_constraint_sentence("Each route must start and end at city 0.");
        CHECK(c == ConstraintSpec::route_starts_ends_at_depot(0));
        CHECK(classify_constraint_sentence("The tour starts and ends at city 3.") ==
              ConstraintSpec::route_starts_ends_at_depot(3));
    }
    SUBCASE("route count") {
        CHECK(classify_constraint_sentence(
                  "The plan must contain exactly 3 routes, one per day.") ==
              ConstraintSpec::route_count_equals_days(3));
        CHECK(classify_constraint_sentence("Use exactly 1 route.") ==
              ConstraintSpec::route_count_equals_days(1));
    }
    SUBCASE("visit exactly once") {
        CHECK(classify_constraint_sentence(
                  "Every city must be visited exactly once across the trip.") ==
              ConstraintSpec::visit_all_exactly_once());
        CHECK(classify_constraint_sentence("Visit each museum only once.") ==
              ConstraintSpec::visit_all_exactly_once());
    }
    SUBCASE("anything else stays verbatim free text") {
        const auto c = classify_constraint_sentence("Prefer the coastal road after lunch.");
        CHECK(c.kind == ConstraintKind::FreeText);
        CHECK(c.text == "Prefer the coastal road after lunch.");
        CHECK_FALSE(c.machine_checkable);
    }
}

TEST_CASE("generated formulations parse from the canonical layout") {
    const std::string text =
        "Problem: Visit every gallery once, starting from the hotel.\n"
        "\n"
        "Constraints:\n"
        "1. Each route must start and end at city 0.\n"
        "2. Every gallery must be visited exactly once.\n"
        "3. The plan must contain exactly 1 route.\n"
        "4. Avoid the riverside at night.\n"
        "\n"
        "Objective: Minimize the total travel cost.\n"
        "\n"
        "Output format: Day 1: <depot> -> ... -> <depot>\n"
        "Total cost: <number>\n";
    const auto result = parse_generated_spf(text);
    REQUIRE(result.ok());
    const auto& spf = *result.value;
    CHECK(spf.case_id == kGeneratedCaseId);
    CHECK(spf.description == "Visit every gallery once, starting from the hotel.");
    REQUIRE(spf.constraints.size() == 4);
    CHECK(spf.constraints[0] == ConstraintSpec::route_starts_ends_at_depot(0));
    CHECK(spf.constraints[1] == ConstraintSpec::visit_all_exactly_once());
    CHECK(spf.constraints[2] == ConstraintSpec::route_count_equals_days(1));
    CHECK(spf.constraints[3].kind == ConstraintKind::FreeText);
    CHECK(spf.constraints[3].text == "Avoid the riverside at night.");
    CHECK(spf.output_format.days == 0);  // unbound until bind_generated_spf

    const auto instance = unit_square();
    const auto bound = bind_generated_spf(spf, instance);
    CHECK(bound.output_format.days == 1);
    CHECK(bound.matrix.size() == 4);
}

TEST_CASE("generated formulations accept bullets and merge per-day depot sentences") {
    const std::string text =
        "Problem: Two-day trip with a different hub per day.\n"
        "Constraints:\n"
        "- Day 1 must start and end at city 0.\n"
        "* Every stop is visited exactly once.\n"
        "2) Day 2 must start and end at city 1.\n"
        "Objective: Minimize cost.\n"
        "Output format: Day 1: <depot> -> ... -> <depot>\n";
    const auto result = parse_generated_spf(text);
    REQUIRE(result.ok());
    const auto& spf = *result.value;
    REQUIRE(spf.constraints.size() == 2);
    CHECK(spf.constraints[0] ==
          ConstraintSpec::depot_assigned_per_day({{0, 0}, {1, 1}}));
    CHECK(spf.constraints[1] == ConstraintSpec::visit_all_exactly_once());
}

TEST_CASE("generated formulations fail loudly when sections are missing") {
    const auto no_constraints = parse_generated_spf(
        "Problem: something\nObjective: cost\nOutput format: Day 1: ...\n");
    REQUIRE_FALSE(no_constraints.ok());
    CHECK(no_constraints.error.code == "NO_CONSTRAINTS_FOUND");
    CHECK(no_constraints.error.message ==
          "no numbered constraint list follows a 'Constraints:' heading");

    const auto no_output = parse_generated_spf(
        "Problem: something\nConstraints:\n1. Visit each city exactly once.\nObjective: cost\n");
    REQUIRE_FALSE(no_output.ok());
    CHECK(no_output.error.code == "NO_OUTPUT_FORMAT");
    CHECK(no_output.error.message == "no 'Output format:' section was found");

    SUBCASE("items after the Objective line are not constraints") {
        const auto result = parse_generated_spf(
            "Problem: p\nConstraints:\n1. Visit each city exactly once.\nObjective: cost\n"
            "1. This is part of a different list.\nOutput format: Day 1: ...\n");
        REQUIRE(result.ok());
        CHECK(result.value->constraints.size() == 1);
    }
}

TEST_CASE("self-verification verdicts are parsed conservatively") {
    CHECK(parse_self_verification_response("FEASIBLE").feasible);
    CHECK(parse_self_verification_response("The plan is feasible.").feasible);

    const auto violation =
        parse_self_verification_response("VIOLATION: city 3 is visited twice");
    CHECK_FALSE(violation.feasible);
    CHECK(violation.violation == "city 3 is visited twice");

    const auto bare = parse_self_verification_response("VIOLATION");
    CHECK_FALSE(bare.feasible);
    CHECK(bare.violation == "unspecified constraint violation");

    const auto multiline =
        parse_self_verification_response("violation: wrong depot\nbut otherwise fine");
    CHECK_FALSE(multiline.feasible);
    CHECK(multiline.violation == "wrong depot");

    // VIOLATION anywhere beats a FEASIBLE elsewhere in the same response.
    CHECK_FALSE(parse_self_verification_response("FEASIBLE unless that VIOLATION: depot issue "
                                                 "counts")
                    .feasible);
    // INFEASIBLE does not contain a standalone FEASIBLE token.
    const auto infeasible = parse_self_verification_response("INFEASIBLE");
    CHECK_FALSE(infeasible.feasible);
    CHECK(infeasible.violation == "unparseable verdict");

    const auto shrug = parse_self_verification_response("Looks plausible to me!");
    CHECK_FALSE(shrug.feasible);
    CHECK(shrug.violation == "unparseable verdict");
}
