#include "routeforge/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace routeforge {

namespace {

// Fixed English message catalog. Fix prompts embed these verbatim, so the
// wording is part of the contract and pinned by tests.
std::string message_city_not_visited(int city) {
    return "City " + std::to_string(city) + " is never visited.";
}

std::string message_city_visited_multiple(int city, int count) {
    return "City " + std::to_string(city) + " is visited " + std::to_string(count) +
           " times, but it must be visited exactly once.";
}

std::string message_wrong_start(int day, int expected, int actual) {
    return "The route for day " + std::to_string(day + 1) + " must start at depot city " +
           std::to_string(expected) + ", but it starts at city " + std::to_string(actual) + ".";
}

std::string message_wrong_end(int day, int expected, int actual) {
    return "The route for day " + std::to_string(day + 1) + " must end at depot city " +
           std::to_string(expected) + ", but it ends at city " + std::to_string(actual) + ".";
}

std::string message_wrong_route_count(int actual, int expected) {
    return "The solution has " + std::to_string(actual) + " route(s), but exactly " +
           std::to_string(expected) + " are required, one for each day.";
}

std::string message_depot_in_route(int depot, int day) {
    return "Depot city " + std::to_string(depot) + " appears inside the route for day " +
           std::to_string(day + 1) + ", where it is not allowed.";
}

}  // namespace

std::string to_tag(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::CityNotVisited: return "CITY_NOT_VISITED";
        case ViolationKind::CityVisitedMultiple: return "CITY_VISITED_MULTIPLE";
        case ViolationKind::WrongStartDepot: return "WRONG_START_DEPOT";
        case ViolationKind::WrongEndDepot: return "WRONG_END_DEPOT";
        case ViolationKind::WrongRouteCount: return "WRONG_ROUTE_COUNT";
        case ViolationKind::DepotInForeignRoute: return "DEPOT_IN_FOREIGN_ROUTE";
    }
    return "CITY_NOT_VISITED";
}

std::vector<std::string> VerificationReport::messages() const {
    std::vector<std::string> out;
    out.reserve(violations.size());
    for (const auto& v : violations) out.push_back(v.message);
    return out;
}

double compute_cost(const CandidateSolution& solution, const DistanceMatrix& matrix) {
    double total = 0.0;
    for (const auto& route : solution.routes) {
        for (std::size_t i = 0; i + 1 < route.size(); ++i) {
            total += matrix.at(route[i], route[i + 1]);
        }
    }
    return total;
}

VerificationReport verify(const CandidateSolution& solution,
                          const StructuredProblemFormulation& spf,
                          const ProblemInstance& instance) {
    VerificationReport report;

    // Expectations are read off the formulation; checks only run for
    // constraints it actually contains, so generated formulations are
    // checked exactly as far as their classified constraints reach.
    bool check_coverage = false;
    bool check_route_count = false;
    int expected_route_count = instance.days;
    std::map<int, int> expected_depot_by_day;
    for (const auto& c : spf.constraints) {
        switch (c.kind) {
            case ConstraintKind::VisitAllExactlyOnce:
                check_coverage = true;
                break;
            case ConstraintKind::RouteCountEqualsDays:
                check_route_count = true;
                expected_route_count = c.route_count;
                break;
            case ConstraintKind::RouteStartsEndsAtDepot:
                for (int day = 0; day < instance.days; ++day) {
                    expected_depot_by_day.emplace(day, c.depot);
                }
                break;
            case ConstraintKind::DepotAssignedPerDay:
                for (const auto& [day, depot_city] : c.day_depots) {
                    expected_depot_by_day[day] = depot_city;
                }
                break;
            case ConstraintKind::FreeText:
                report.unchecked_constraints.push_back(c.text);
                break;
        }
    }

    std::set<int> depot_set(instance.depots.begin(), instance.depots.end());
    for (const auto& [day, depot_city] : expected_depot_by_day) depot_set.insert(depot_city);

    const int route_count = static_cast<int>(solution.routes.size());

    // (1) route count
    if (check_route_count && route_count != expected_route_count) {
        report.violations.push_back({ViolationKind::WrongRouteCount, route_count,
                                     message_wrong_route_count(route_count, expected_route_count)});
    }

    // (2) endpoints per day
    for (const auto& [day, expected] : expected_depot_by_day) {
        if (day < 0 || day >= route_count) continue;
        const auto& route = solution.routes[day];
        if (route.empty()) continue;
        if (route.front() != expected) {
            report.violations.push_back({ViolationKind::WrongStartDepot, day,
                                         message_wrong_start(day, expected, route.front())});
        }
        if (route.back() != expected) {
            report.violations.push_back(
                {ViolationKind::WrongEndDepot, day, message_wrong_end(day, expected, route.back())});
        }
    }

    // (3) exactly-once coverage of non-depot cities
    if (check_coverage) {
        std::map<int, int> visits;
        for (const auto& route : solution.routes) {
            for (int city : route) {
                if (!depot_set.count(city)) ++visits[city];
            }
        }
        for (int city = 0; city < static_cast<int>(instance.cities.size()); ++city) {
            if (depot_set.count(city)) continue;
            const auto it = visits.find(city);
            const int count = it == visits.end() ? 0 : it->second;
            if (count == 0) {
                report.violations.push_back(
                    {ViolationKind::CityNotVisited, city, message_city_not_visited(city)});
            } else if (count > 1) {
                report.violations.push_back({ViolationKind::CityVisitedMultiple, city,
                                             message_city_visited_multiple(city, count)});
            }
        }
    }

    // (4) no depot inside any route
    if (!depot_set.empty()) {
        for (int day = 0; day < route_count; ++day) {
            const auto& route = solution.routes[day];
            std::set<int> flagged;
            for (std::size_t i = 1; i + 1 < route.size(); ++i) {
                const int city = route[i];
                if (depot_set.count(city) && !flagged.count(city)) {
                    flagged.insert(city);
                    report.violations.push_back({ViolationKind::DepotInForeignRoute, city,
                                                 message_depot_in_route(city, day)});
                }
            }
        }
    }

    report.feasible = report.violations.empty();
    if (report.feasible) {
        const DistanceMatrix& matrix = spf.matrix;
        if (!matrix.empty()) {
            report.recomputed_cost = compute_cost(solution, matrix);
        } else {
            report.recomputed_cost = compute_cost(solution, build_distance_matrix(instance));
        }
    }
    return report;
}

Ordering compare_costs(double cost_a, double cost_b) {
    const double tolerance = kTieRelativeTolerance * std::max(1.0, cost_a);
    if (std::abs(cost_a - cost_b) <= tolerance) return Ordering::Tie;
    return cost_a < cost_b ? Ordering::ABetter : Ordering::BBetter;
}

Ordering compare_solutions(const std::pair<CandidateSolution, double>& a,
                           const std::pair<CandidateSolution, double>& b) {
    return compare_costs(a.second, b.second);
}

void to_json(nlohmann::json& j, const Violation& v) {
    j = nlohmann::json{{"kind", to_tag(v.kind)}, {"subject", v.subject}, {"message", v.message}};
}

void to_json(nlohmann::json& j, const VerificationReport& r) {
    j = nlohmann::json{{"feasible", r.feasible},
                       {"violations", r.violations},
                       {"unchecked_constraints", r.unchecked_constraints}};
    if (r.recomputed_cost) j["recomputed_cost"] = *r.recomputed_cost;
}

}  // namespace routeforge
