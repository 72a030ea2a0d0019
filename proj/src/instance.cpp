#include "routeforge/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "routeforge/error.hpp"

namespace routeforge {

std::string to_tag(ProblemType type) {
    switch (type) {
        case ProblemType::TspSingle: return "TSP_SINGLE";
        case ProblemType::MultiDaySingleDepot: return "MULTI_DAY_SINGLE_DEPOT";
        case ProblemType::MultiDayDepotPerDay: return "MULTI_DAY_DEPOT_PER_DAY";
        case ProblemType::Novel: return "NOVEL";
    }
    return "NOVEL";
}

ProblemType problem_type_from_tag(const std::string& tag) {
    if (tag == "TSP_SINGLE") return ProblemType::TspSingle;
    if (tag == "MULTI_DAY_SINGLE_DEPOT") return ProblemType::MultiDaySingleDepot;
    if (tag == "MULTI_DAY_DEPOT_PER_DAY") return ProblemType::MultiDayDepotPerDay;
    if (tag == "NOVEL") return ProblemType::Novel;
    throw Error("INSTANCE_FORMAT", "unknown problem_type tag '" + tag + "'");
}

bool ProblemInstance::is_depot(int city) const {
    return std::find(depots.begin(), depots.end(), city) != depots.end();
}

std::vector<int> ProblemInstance::non_depot_cities() const {
    std::vector<int> out;
    for (int c = 0; c < static_cast<int>(cities.size()); ++c) {
        if (!is_depot(c)) out.push_back(c);
    }
    return out;
}

DistanceMatrix::DistanceMatrix(int n, std::vector<double> values) : n_(n), d_(std::move(values)) {
    if (static_cast<std::size_t>(n_) * n_ != d_.size()) {
        throw Error("INTERNAL", "distance matrix storage does not match its dimension");
    }
}

bool ValidationResult::ok() const {
    return std::none_of(defects.begin(), defects.end(), [](const Defect& d) { return d.fatal; });
}

bool ValidationResult::has(const std::string& code) const {
    return std::any_of(defects.begin(), defects.end(),
                       [&](const Defect& d) { return d.code == code; });
}

double euclidean_distance(const Point2D& a, const Point2D& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

DistanceMatrix build_distance_matrix(const ProblemInstance& instance) {
    const int n = static_cast<int>(instance.cities.size());
    for (int i = 0; i < n; ++i) {
        const Point2D& p = instance.cities[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw Error("NONFINITE_COORDINATE",
                        "city " + std::to_string(i) + " has a non-finite coordinate");
        }
    }
    std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double dist = euclidean_distance(instance.cities[i], instance.cities[j]);
            d[static_cast<std::size_t>(i) * n + j] = dist;
            d[static_cast<std::size_t>(j) * n + i] = dist;
        }
    }
    return DistanceMatrix(n, std::move(d));
}

ValidationResult validate_instance(const ProblemInstance& instance) {
    ValidationResult result;
    auto fatal = [&](std::string code, std::string message) {
        result.defects.push_back({std::move(code), std::move(message), true});
    };
    const int n = static_cast<int>(instance.cities.size());

    for (int i = 0; i < n; ++i) {
        const Point2D& p = instance.cities[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            fatal("NONFINITE_COORDINATE",
                  "city " + std::to_string(i) + " has a non-finite coordinate");
        }
    }

    if (instance.days < 1) {
        fatal("BAD_DAY_COUNT", "days must be at least 1, got " + std::to_string(instance.days));
    }
    if (instance.problem_type == ProblemType::TspSingle && instance.days != 1) {
        fatal("BAD_DAY_COUNT",
              "a single-route instance must have days = 1, got " + std::to_string(instance.days));
    }

    for (int depot : instance.depots) {
        if (depot < 0 || depot >= n) {
            fatal("DEPOT_INDEX_OUT_OF_RANGE",
                  "depot index " + std::to_string(depot) + " is outside 0.." + std::to_string(n - 1));
        }
    }

    const std::size_t depot_count = instance.depots.size();
    switch (instance.problem_type) {
        case ProblemType::TspSingle:
        case ProblemType::MultiDaySingleDepot:
            if (depot_count != 1) {
                fatal("DEPOT_COUNT_MISMATCH",
                      "expected exactly 1 depot, got " + std::to_string(depot_count));
            }
            break;
        case ProblemType::MultiDayDepotPerDay: {
            if (instance.days >= 1 && depot_count != static_cast<std::size_t>(instance.days)) {
                fatal("DEPOT_COUNT_MISMATCH",
                      "expected one depot per day (" + std::to_string(instance.days) + "), got " +
                          std::to_string(depot_count));
            }
            std::set<int> seen(instance.depots.begin(), instance.depots.end());
            if (seen.size() != depot_count) {
                fatal("DUPLICATE_DEPOT", "per-day depot indices must be pairwise distinct");
            }
            break;
        }
        case ProblemType::Novel:
            break;  // free-form depot list
    }

    if (instance.days >= 1 && n < instance.days + 1) {
        fatal("TOO_FEW_CITIES", "need at least days + 1 = " + std::to_string(instance.days + 1) +
                                    " cities, got " + std::to_string(n));
    }

    if (n > kScaleWarningThreshold) {
        result.defects.push_back(
            {"SCALE_WARNING",
             "instance has " + std::to_string(n) +
                 " cities; chat-model solution quality degrades noticeably beyond " +
                 std::to_string(kScaleWarningThreshold) + ", expect infeasible candidates",
             false});
    }

    return result;
}

void to_json(nlohmann::json& j, const Point2D& p) { j = nlohmann::json::array({p.x, p.y}); }

void from_json(const nlohmann::json& j, Point2D& p) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw Error("INSTANCE_FORMAT", "each city must be a [x, y] pair of numbers");
    }
    p.x = j[0].get<double>();
    p.y = j[1].get<double>();
}

void to_json(nlohmann::json& j, const ProblemInstance& instance) {
    j = nlohmann::json{{"cities", instance.cities},
                       {"problem_type", to_tag(instance.problem_type)},
                       {"depots", instance.depots},
                       {"days", instance.days},
                       {"request_text", instance.request_text}};
}

void to_json(nlohmann::json& j, const DistanceMatrix& m) {
    j = nlohmann::json::array();
    for (int i = 0; i < m.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < m.size(); ++k) row.push_back(m.at(i, k));
        j.push_back(std::move(row));
    }
}

ProblemInstance instance_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error("INSTANCE_FORMAT", "instance must be a JSON object");
    static const std::set<std::string> known = {"cities", "problem_type", "depots", "days",
                                                "request_text"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key())) {
            throw Error("INSTANCE_FORMAT", "unknown field '" + it.key() + "'");
        }
    }
    for (const auto& field : known) {
        if (!j.contains(field)) {
            throw Error("INSTANCE_FORMAT", "missing field '" + field + "'");
        }
    }
    ProblemInstance instance;
    if (!j.at("cities").is_array()) throw Error("INSTANCE_FORMAT", "'cities' must be an array");
    instance.cities = j.at("cities").get<std::vector<Point2D>>();
    if (!j.at("problem_type").is_string()) {
        throw Error("INSTANCE_FORMAT", "'problem_type' must be a string tag");
    }
    instance.problem_type = problem_type_from_tag(j.at("problem_type").get<std::string>());
    if (!j.at("depots").is_array()) throw Error("INSTANCE_FORMAT", "'depots' must be an array");
    for (const auto& d : j.at("depots")) {
        if (!d.is_number_integer()) {
            throw Error("INSTANCE_FORMAT", "'depots' must hold integer city indices");
        }
    }
    instance.depots = j.at("depots").get<std::vector<int>>();
    if (!j.at("days").is_number_integer()) {
        throw Error("INSTANCE_FORMAT", "'days' must be an integer");
    }
    instance.days = j.at("days").get<int>();
    if (!j.at("request_text").is_string()) {
        throw Error("INSTANCE_FORMAT", "'request_text' must be a string");
    }
    instance.request_text = j.at("request_text").get<std::string>();
    return instance;
}

void from_json(const nlohmann::json& j, ProblemInstance& instance) {
    instance = instance_from_json(j);
}

ProblemInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("IO_ERROR", "cannot open instance file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("INSTANCE_FORMAT", "invalid JSON in '" + path + "': " + e.what());
    }
    return instance_from_json(j);
}

void save_instance(const ProblemInstance& instance, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("IO_ERROR", "cannot write instance file '" + path + "'");
    nlohmann::json j = instance;
    out << j.dump(2) << "\n";
}

}  // namespace routeforge
