#include "routeforge/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "routeforge/error.hpp"
#include "routeforge/verifier.hpp"

namespace routeforge {

namespace {

constexpr double kCostEps = 1e-12;

// Strictly-better test that ignores sub-epsilon floating-point noise, so
// cost ties fall through to the lexicographic rule.
bool strictly_better(double candidate, double best) {
    if (!std::isfinite(best)) return candidate < best;
    return candidate < best - kCostEps * std::max(1.0, best);
}

bool cost_tied(double candidate, double best) {
    if (!std::isfinite(best)) return false;
    return std::abs(candidate - best) <= kCostEps * std::max(1.0, best);
}

double route_cost(const std::vector<int>& route, const DistanceMatrix& m) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < route.size(); ++i) total += m.at(route[i], route[i + 1]);
    return total;
}

// Optimal closed tour from depot over exactly the cities in each subset of
// `cities`, by permutation enumeration. Index of the result vector is the
// subset bitmask over `cities`.
std::vector<std::pair<double, std::vector<int>>> best_tour_per_subset(
    int depot, const std::vector<int>& cities, const DistanceMatrix& m) {
    const int count = static_cast<int>(cities.size());
    std::vector<std::pair<double, std::vector<int>>> best(
        1u << count, {std::numeric_limits<double>::infinity(), {}});
    best[0] = {0.0, {depot, depot}};

    for (unsigned mask = 1; mask < best.size(); ++mask) {
        std::vector<int> subset;
        for (int i = 0; i < count; ++i) {
            if (mask & (1u << i)) subset.push_back(cities[i]);
        }
        std::sort(subset.begin(), subset.end());
        double best_cost = std::numeric_limits<double>::infinity();
        std::vector<int> best_perm;
        do {
            double cost = m.at(depot, subset.front());
            for (std::size_t i = 0; i + 1 < subset.size(); ++i) {
                cost += m.at(subset[i], subset[i + 1]);
            }
            cost += m.at(subset.back(), depot);
            // Enumeration is lexicographic, so keeping only strict
            // improvements leaves the lexicographically smallest tie.
            if (strictly_better(cost, best_cost)) {
                best_cost = cost;
                best_perm = subset;
            }
        } while (std::next_permutation(subset.begin(), subset.end()));

        std::vector<int> route;
        route.push_back(depot);
        route.insert(route.end(), best_perm.begin(), best_perm.end());
        route.push_back(depot);
        best[mask] = {best_cost, std::move(route)};
    }
    return best;
}

CostBound brute_force_single_day(const ProblemInstance& instance, const DistanceMatrix& m) {
    const int depot = instance.depots.at(0);
    std::vector<int> others = instance.non_depot_cities();
    std::sort(others.begin(), others.end());

    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<int> best_perm;
    do {
        double cost = m.at(depot, others.front());
        for (std::size_t i = 0; i + 1 < others.size(); ++i) cost += m.at(others[i], others[i + 1]);
        cost += m.at(others.back(), depot);
        if (strictly_better(cost, best_cost)) {
            best_cost = cost;
            best_perm = others;
        }
    } while (std::next_permutation(others.begin(), others.end()));

    CandidateSolution solution;
    solution.source = SolutionSource::Oracle;
    std::vector<int> route;
    route.push_back(depot);
    route.insert(route.end(), best_perm.begin(), best_perm.end());
    route.push_back(depot);
    solution.routes.push_back(std::move(route));
    return {BoundKind::Exact, best_cost, std::move(solution)};
}

CostBound brute_force_multi_day(const ProblemInstance& instance, const DistanceMatrix& m) {
    const int days = instance.days;
    const bool shared_depot = instance.problem_type == ProblemType::MultiDaySingleDepot;
    std::vector<int> day_depot(days);
    for (int day = 0; day < days; ++day) {
        day_depot[day] = shared_depot ? instance.depots.at(0) : instance.depots.at(day);
    }

    std::vector<int> cities = instance.non_depot_cities();
    std::sort(cities.begin(), cities.end());
    const int count = static_cast<int>(cities.size());

    std::map<int, std::vector<std::pair<double, std::vector<int>>>> tours_by_depot;
    for (int depot : day_depot) {
        if (!tours_by_depot.count(depot)) {
            tours_by_depot[depot] = best_tour_per_subset(depot, cities, m);
        }
    }

    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<std::vector<int>> best_routes;

    std::vector<int> day_of(count, 0);
    for (;;) {
        // With a shared depot the days are interchangeable, so only
        // canonical assignments (restricted growth) are enumerated.
        bool canonical = true;
        if (shared_depot) {
            int max_used = -1;
            for (int value : day_of) {
                if (value > max_used + 1) {
                    canonical = false;
                    break;
                }
                max_used = std::max(max_used, value);
            }
        }

        if (canonical) {
            std::vector<unsigned> mask(days, 0);
            for (int i = 0; i < count; ++i) mask[day_of[i]] |= 1u << i;
            double cost = 0.0;
            for (int day = 0; day < days; ++day) {
                cost += tours_by_depot[day_depot[day]][mask[day]].first;
            }
            if (strictly_better(cost, best_cost) || cost_tied(cost, best_cost)) {
                std::vector<std::vector<int>> routes;
                routes.reserve(days);
                for (int day = 0; day < days; ++day) {
                    routes.push_back(tours_by_depot[day_depot[day]][mask[day]].second);
                }
                if (shared_depot) std::sort(routes.begin(), routes.end());
                if (strictly_better(cost, best_cost) ||
                    (cost_tied(cost, best_cost) && routes < best_routes)) {
                    best_cost = std::min(cost, best_cost);
                    best_routes = std::move(routes);
                }
            }
        }

        // Odometer over day assignments.
        int i = count - 1;
        while (i >= 0 && day_of[i] == days - 1) day_of[i--] = 0;
        if (i < 0) break;
        ++day_of[i];
    }

    CandidateSolution solution;
    solution.source = SolutionSource::Oracle;
    solution.routes = std::move(best_routes);
    return {BoundKind::Exact, best_cost, std::move(solution)};
}

}  // namespace

std::string to_tag(BoundKind kind) {
    return kind == BoundKind::Exact ? "EXACT" : "HEURISTIC";
}

CostBound brute_force_optimal(const ProblemInstance& instance) {
    const DistanceMatrix m = build_distance_matrix(instance);
    switch (instance.problem_type) {
        case ProblemType::TspSingle: {
            const int n = static_cast<int>(instance.cities.size());
            if (n > kBruteForceMaxCitiesSingle) {
                throw Error("INSTANCE_TOO_LARGE",
                            "brute force handles at most " +
                                std::to_string(kBruteForceMaxCitiesSingle) +
                                " cities for single-day instances, got " + std::to_string(n));
            }
            return brute_force_single_day(instance, m);
        }
        case ProblemType::MultiDaySingleDepot:
        case ProblemType::MultiDayDepotPerDay: {
            const int non_depot = static_cast<int>(instance.non_depot_cities().size());
            if (non_depot > kBruteForceMaxNonDepotMulti) {
                throw Error("INSTANCE_TOO_LARGE",
                            "brute force handles at most " +
                                std::to_string(kBruteForceMaxNonDepotMulti) +
                                " non-depot cities for multi-day instances, got " +
                                std::to_string(non_depot));
            }
            if (instance.days > kBruteForceMaxDays) {
                throw Error("INSTANCE_TOO_LARGE",
                            "brute force handles at most " + std::to_string(kBruteForceMaxDays) +
                                " days, got " + std::to_string(instance.days));
            }
            return brute_force_multi_day(instance, m);
        }
        case ProblemType::Novel:
            throw Error("WRONG_TYPE", "free-form instances have no enumerable route structure");
    }
    throw Error("WRONG_TYPE", "unsupported problem type");
}

CostBound held_karp_optimal(const ProblemInstance& instance) {
    if (instance.problem_type != ProblemType::TspSingle) {
        throw Error("WRONG_TYPE", "the subset dynamic program handles single-day instances only");
    }
    const int n = static_cast<int>(instance.cities.size());
    if (n > kHeldKarpMaxCities) {
        throw Error("INSTANCE_TOO_LARGE", "the subset dynamic program handles at most " +
                                              std::to_string(kHeldKarpMaxCities) +
                                              " cities, got " + std::to_string(n));
    }
    const DistanceMatrix m = build_distance_matrix(instance);
    const int depot = instance.depots.at(0);
    std::vector<int> cities = instance.non_depot_cities();
    std::sort(cities.begin(), cities.end());
    const int count = static_cast<int>(cities.size());

    const std::size_t masks = 1u << count;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dp(masks * count, inf);
    std::vector<int16_t> parent(masks * count, -1);

    for (int j = 0; j < count; ++j) {
        dp[(1u << j) * count + j] = m.at(depot, cities[j]);
    }
    for (std::size_t mask = 1; mask < masks; ++mask) {
        for (int last = 0; last < count; ++last) {
            if (!(mask & (1u << last))) continue;
            const double cost = dp[mask * count + last];
            if (cost == inf) continue;
            for (int next = 0; next < count; ++next) {
                if (mask & (1u << next)) continue;
                const std::size_t next_mask = mask | (1u << next);
                const double next_cost = cost + m.at(cities[last], cities[next]);
                double& slot = dp[next_mask * count + next];
                if (next_cost < slot) {
                    slot = next_cost;
                    parent[next_mask * count + next] = static_cast<int16_t>(last);
                }
            }
        }
    }

    const std::size_t full = masks - 1;
    double best_cost = inf;
    int best_last = -1;
    for (int j = 0; j < count; ++j) {
        const double cost = dp[full * count + j] + m.at(cities[j], depot);
        if (cost < best_cost) {
            best_cost = cost;
            best_last = j;
        }
    }

    std::vector<int> order;
    std::size_t mask = full;
    int last = best_last;
    while (last >= 0) {
        order.push_back(cities[last]);
        const int prev = parent[mask * count + last];
        mask &= ~(1u << last);
        last = prev;
    }
    std::reverse(order.begin(), order.end());

    CandidateSolution solution;
    solution.source = SolutionSource::Oracle;
    std::vector<int> route;
    route.push_back(depot);
    route.insert(route.end(), order.begin(), order.end());
    route.push_back(depot);
    solution.routes.push_back(std::move(route));
    return {BoundKind::Exact, best_cost, std::move(solution)};
}

std::vector<int> two_opt(std::vector<int> route, const DistanceMatrix& matrix) {
    if (route.size() < 4) return route;
    const int last = static_cast<int>(route.size()) - 1;
    bool improved = true;
    while (improved) {
        improved = false;
        for (int i = 1; i < last - 1; ++i) {
            for (int j = i + 1; j < last; ++j) {
                const double delta = matrix.at(route[i - 1], route[j]) +
                                     matrix.at(route[i], route[j + 1]) -
                                     matrix.at(route[i - 1], route[i]) -
                                     matrix.at(route[j], route[j + 1]);
                if (delta < -kCostEps) {
                    std::reverse(route.begin() + i, route.begin() + j + 1);
                    improved = true;
                }
            }
        }
    }
    return route;
}

CostBound nearest_neighbor_then_two_opt(const ProblemInstance& instance) {
    if (instance.problem_type == ProblemType::Novel) {
        throw Error("WRONG_TYPE", "free-form instances have no defined route structure");
    }
    const DistanceMatrix m = build_distance_matrix(instance);
    const int days = instance.days;
    const bool per_day_depot = instance.problem_type == ProblemType::MultiDayDepotPerDay;
    std::vector<int> day_depot(days);
    for (int day = 0; day < days; ++day) {
        day_depot[day] = per_day_depot ? instance.depots.at(day) : instance.depots.at(0);
    }

    // Assign every city to the day whose depot is nearest, earliest day on
    // ties. With a shared depot everything lands on day 1, which the
    // triangle inequality can only reward.
    std::vector<std::vector<int>> assigned(days);
    for (int city : instance.non_depot_cities()) {
        int best_day = 0;
        double best_dist = m.at(city, day_depot[0]);
        for (int day = 1; day < days; ++day) {
            const double dist = m.at(city, day_depot[day]);
            if (dist < best_dist - kCostEps) {
                best_dist = dist;
                best_day = day;
            }
        }
        assigned[best_day].push_back(city);
    }

    CandidateSolution solution;
    solution.source = SolutionSource::Heuristic;
    double total = 0.0;
    for (int day = 0; day < days; ++day) {
        const int depot = day_depot[day];
        std::vector<int> route{depot};
        std::vector<int> remaining = assigned[day];
        std::sort(remaining.begin(), remaining.end());
        int current = depot;
        while (!remaining.empty()) {
            std::size_t pick = 0;
            for (std::size_t i = 1; i < remaining.size(); ++i) {
                if (m.at(current, remaining[i]) < m.at(current, remaining[pick]) - kCostEps) {
                    pick = i;
                }
            }
            current = remaining[pick];
            route.push_back(current);
            remaining.erase(remaining.begin() + pick);
        }
        route.push_back(depot);
        route = two_opt(std::move(route), m);
        total += route_cost(route, m);
        solution.routes.push_back(std::move(route));
    }
    return {BoundKind::Heuristic, total, std::move(solution)};
}

OptimalityGap optimality_gap(double solution_cost, const CostBound& bound) {
    if (!(bound.cost > 0.0)) {
        throw Error("ZERO_BOUND", "cost bound is not positive; the instance is degenerate");
    }
    return {solution_cost / bound.cost, bound.kind};
}

void to_json(nlohmann::json& j, const CostBound& b) {
    j = nlohmann::json{{"kind", to_tag(b.kind)}, {"cost", b.cost}, {"routes", b.solution.routes}};
}

}  // namespace routeforge
