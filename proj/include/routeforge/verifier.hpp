#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "routeforge/instance.hpp"
#include "routeforge/solution.hpp"
#include "routeforge/spf.hpp"

namespace routeforge {

enum class ViolationKind {
    CityNotVisited,
    CityVisitedMultiple,
    WrongStartDepot,
    WrongEndDepot,
    WrongRouteCount,
    DepotInForeignRoute,
};

std::string to_tag(ViolationKind kind);

// One broken constraint. subject is a city index for coverage and depot
// placement kinds, a 0-based day index for endpoint kinds, and the actual
// route count for WrongRouteCount. The message is a fixed English sentence
// fed verbatim into fix prompts.
struct Violation {
    ViolationKind kind;
    int subject = 0;
    std::string message;
};

struct VerificationReport {
    bool feasible = false;
    std::vector<Violation> violations;
    // Present exactly when feasible.
    std::optional<double> recomputed_cost;
    // FreeText constraints the checker cannot decide, flagged for the caller.
    std::vector<std::string> unchecked_constraints;

    std::vector<std::string> messages() const;
};

// Sum of consecutive-pair distances over every route. Pure arithmetic; does
// not judge feasibility.
double compute_cost(const CandidateSolution& solution, const DistanceMatrix& matrix);

// Checks the solution against the formulation's machine-checkable
// constraints, in fixed order: route count, route endpoints, exactly-once
// coverage, depot placement. Reports every violation found.
VerificationReport verify(const CandidateSolution& solution,
                          const StructuredProblemFormulation& spf,
                          const ProblemInstance& instance);

enum class Ordering { ABetter, BBetter, Tie };

// Ties absorb floating-point noise: |cost_a - cost_b| <= 1e-6 * max(1, cost_a).
inline constexpr double kTieRelativeTolerance = 1e-6;

Ordering compare_costs(double cost_a, double cost_b);
Ordering compare_solutions(const std::pair<CandidateSolution, double>& a,
                           const std::pair<CandidateSolution, double>& b);

void to_json(nlohmann::json& j, const Violation& v);
void to_json(nlohmann::json& j, const VerificationReport& r);

}  // namespace routeforge
