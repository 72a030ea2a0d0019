#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace routeforge {

enum class SolutionSource { Model, Oracle, Heuristic };

std::string to_tag(SolutionSource source);

// A candidate set of routes, one per day. Route k lists the city indices in
// visit order, including both depot endpoints.
struct CandidateSolution {
    std::vector<std::vector<int>> routes;
    SolutionSource source = SolutionSource::Model;
    // Total cost claimed by the producer. Parsed for bookkeeping, never
    // trusted; all decisions use recomputed cost.
    std::optional<double> reported_cost;

    bool operator==(const CandidateSolution& other) const { return routes == other.routes; }
};

// Renders routes in the route-lines-v1 grammar:
//   Day <k>: <i0> -> <i1> -> ... -> <i0>
std::string format_route_lines(const CandidateSolution& solution);

// Same, terminated by "Total cost: <cost>" with the cost at two decimals.
std::string format_route_lines_with_cost(const CandidateSolution& solution, double cost);

// Two-decimal fixed-point rendering used everywhere a cost is displayed.
std::string format_cost(double cost);

void to_json(nlohmann::json& j, const CandidateSolution& s);
void from_json(const nlohmann::json& j, CandidateSolution& s);

}  // namespace routeforge
