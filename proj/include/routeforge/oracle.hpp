#pragma once

#include <string>
#include <vector>

#include "routeforge/instance.hpp"
#include "routeforge/solution.hpp"

namespace routeforge {

enum class BoundKind { Exact, Heuristic };

std::string to_tag(BoundKind kind);

struct CostBound {
    BoundKind kind = BoundKind::Exact;
    double cost = 0.0;
    CandidateSolution solution;
};

// Exhaustive enumeration limits: (n-1)! permutations for one day, ordered
// day assignments times per-day permutations otherwise.
inline constexpr int kBruteForceMaxCitiesSingle = 11;
inline constexpr int kBruteForceMaxNonDepotMulti = 9;
inline constexpr int kBruteForceMaxDays = 3;
inline constexpr int kHeldKarpMaxCities = 18;

// Exact optimum by enumeration. Deterministic: among cost ties the
// lexicographically smallest route sequence is returned. Throws
// Error(INSTANCE_TOO_LARGE) past the limits and Error(WRONG_TYPE) for
// free-form instances.
CostBound brute_force_optimal(const ProblemInstance& instance);

// Exact optimum via dynamic programming over city subsets; single-day
// instances only. Throws Error(WRONG_TYPE) and Error(INSTANCE_TOO_LARGE).
CostBound held_karp_optimal(const ProblemInstance& instance);

// Feasible upper bound: multi-day instances assign each city to the day of
// its nearest depot (ties to the earliest day), then every day's route is
// built nearest-neighbor and improved by 2-opt.
CostBound nearest_neighbor_then_two_opt(const ProblemInstance& instance);

// In-place 2-opt until no improving segment reversal remains. Endpoints are
// fixed. Exposed for direct testing.
std::vector<int> two_opt(std::vector<int> route, const DistanceMatrix& matrix);

struct OptimalityGap {
    double ratio = 0.0;
    BoundKind against = BoundKind::Exact;  // EXACT-gap vs HEURISTIC-gap label
};

// solution_cost / bound.cost. Throws Error(ZERO_BOUND) when the bound is not
// positive (degenerate coincident-city instances).
OptimalityGap optimality_gap(double solution_cost, const CostBound& bound);

void to_json(nlohmann::json& j, const CostBound& b);

}  // namespace routeforge
