#include "routeforge/solution.hpp"

#include <cstdio>

namespace routeforge {

std::string to_tag(SolutionSource source) {
    switch (source) {
        case SolutionSource::Model: return "MODEL";
        case SolutionSource::Oracle: return "ORACLE";
        case SolutionSource::Heuristic: return "HEURISTIC";
    }
    return "MODEL";
}

std::string format_cost(double cost) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", cost);
    return buf;
}

std::string format_route_lines(const CandidateSolution& solution) {
    std::string out;
    for (std::size_t day = 0; day < solution.routes.size(); ++day) {
        out += "Day " + std::to_string(day + 1) + ": ";
        const auto& route = solution.routes[day];
        for (std::size_t i = 0; i < route.size(); ++i) {
            if (i > 0) out += " -> ";
            out += std::to_string(route[i]);
        }
        out += "\n";
    }
    return out;
}

std::string format_route_lines_with_cost(const CandidateSolution& solution, double cost) {
    return format_route_lines(solution) + "Total cost: " + format_cost(cost) + "\n";
}

void to_json(nlohmann::json& j, const CandidateSolution& s) {
    j = nlohmann::json{{"routes", s.routes}, {"source", to_tag(s.source)}};
    if (s.reported_cost) j["reported_cost"] = *s.reported_cost;
}

void from_json(const nlohmann::json& j, CandidateSolution& s) {
    s.routes = j.at("routes").get<std::vector<std::vector<int>>>();
    const std::string source = j.value("source", "MODEL");
    s.source = source == "ORACLE"      ? SolutionSource::Oracle
               : source == "HEURISTIC" ? SolutionSource::Heuristic
                                       : SolutionSource::Model;
    if (j.contains("reported_cost")) s.reported_cost = j.at("reported_cost").get<double>();
}

}  // namespace routeforge
