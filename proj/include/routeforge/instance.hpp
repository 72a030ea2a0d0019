#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace routeforge {

// A planar city location, in abstract distance units.
struct Point2D {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point2D&) const = default;
};

enum class ProblemType {
    TspSingle,            // one route, one depot, one day
    MultiDaySingleDepot,  // one route per day, shared depot
    MultiDayDepotPerDay,  // one route per day, distinct depot per day
    Novel,                // free-form request, no library case applies
};

std::string to_tag(ProblemType type);
// Throws Error(INSTANCE_FORMAT) on an unknown tag.
ProblemType problem_type_from_tag(const std::string& tag);

// Ground truth for one routing problem. Everything downstream (prompts,
// verification, oracles) derives from this; model output never feeds back
// into it.
struct ProblemInstance {
    std::vector<Point2D> cities;
    ProblemType problem_type = ProblemType::TspSingle;
    std::vector<int> depots = {0};  // length 1 for single-depot types, one per day otherwise
    int days = 1;
    std::string request_text;

    bool is_depot(int city) const;
    std::vector<int> non_depot_cities() const;
};

// Symmetric Euclidean distance matrix. Always computed from coordinates,
// never accepted from external input.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    DistanceMatrix(int n, std::vector<double> values);

    int size() const { return n_; }
    bool empty() const { return n_ == 0; }
    double at(int i, int j) const { return d_[static_cast<std::size_t>(i) * n_ + j]; }
    const std::vector<double>& values() const { return d_; }

private:
    int n_ = 0;
    std::vector<double> d_;
};

struct Defect {
    std::string code;
    std::string message;
    bool fatal = true;
};

struct ValidationResult {
    std::vector<Defect> defects;

    // True when no fatal defect was found; warnings may still be present.
    bool ok() const;
    bool has(const std::string& code) const;
};

// Chat-model solution quality falls off beyond this many cities, so
// validation attaches a non-fatal SCALE_WARNING above it.
inline constexpr int kScaleWarningThreshold = 20;

double euclidean_distance(const Point2D& a, const Point2D& b);

// Throws Error(NONFINITE_COORDINATE) when any coordinate is NaN or infinite.
DistanceMatrix build_distance_matrix(const ProblemInstance& instance);

// Checks every structural invariant and reports all defects at once.
ValidationResult validate_instance(const ProblemInstance& instance);

void to_json(nlohmann::json& j, const Point2D& p);
void from_json(const nlohmann::json& j, Point2D& p);
void to_json(nlohmann::json& j, const ProblemInstance& instance);
void to_json(nlohmann::json& j, const DistanceMatrix& m);

// Strict parse: all five fields required, unknown fields rejected.
// Throws Error(INSTANCE_FORMAT) with the offending field named.
ProblemInstance instance_from_json(const nlohmann::json& j);
void from_json(const nlohmann::json& j, ProblemInstance& instance);

// File I/O; throws Error(IO_ERROR) naming the path.
ProblemInstance load_instance(const std::string& path);
void save_instance(const ProblemInstance& instance, const std::string& path);

}  // namespace routeforge
