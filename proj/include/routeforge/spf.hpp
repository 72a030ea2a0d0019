#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "routeforge/instance.hpp"

namespace routeforge {

enum class ConstraintKind {
    VisitAllExactlyOnce,
    RouteStartsEndsAtDepot,
    RouteCountEqualsDays,
    DepotAssignedPerDay,
    FreeText,  // kept verbatim, not machine checkable
};

std::string to_tag(ConstraintKind kind);
ConstraintKind constraint_kind_from_tag(const std::string& tag);

// One constraint of a formulation. Parameter fields are meaningful per kind;
// machine_checkable is false only for FreeText.
struct ConstraintSpec {
    ConstraintKind kind = ConstraintKind::FreeText;
    int depot = -1;                 // RouteStartsEndsAtDepot
    int route_count = 0;            // RouteCountEqualsDays
    std::map<int, int> day_depots;  // DepotAssignedPerDay: 0-based day -> depot city
    std::string text;               // FreeText sentence
    bool machine_checkable = false;

    static ConstraintSpec visit_all_exactly_once();
    static ConstraintSpec route_starts_ends_at_depot(int depot);
    static ConstraintSpec route_count_equals_days(int count);
    static ConstraintSpec depot_assigned_per_day(std::map<int, int> day_depots);
    static ConstraintSpec free_text(std::string sentence);

    // Prompt sentences for this constraint; DepotAssignedPerDay renders one
    // line per day, everything else exactly one.
    std::vector<std::string> render_lines() const;

    bool operator==(const ConstraintSpec&) const = default;
};

enum class Objective { MinimizeTotalCost };

struct OutputFormatSpec {
    std::string grammar_id = "route-lines-v1";
    int days = 1;
    bool operator==(const OutputFormatSpec&) const = default;
};

inline constexpr const char* kGeneratedCaseId = "GENERATED";

// A structured problem formulation: everything a solve prompt needs and
// everything the verifier checks against.
struct StructuredProblemFormulation {
    std::string case_id;  // library case id, or GENERATED for self-formulated
    std::string description;
    std::vector<ConstraintSpec> constraints;
    Objective objective = Objective::MinimizeTotalCost;
    OutputFormatSpec output_format;
    ProblemInstance instance;
    DistanceMatrix matrix;
};

// A reusable library case: parameterized constraint sentences plus the
// natural-language statement used for matching and worked examples.
// Templates use {depot}, {days} and {day} placeholders.
struct CaseEntry {
    std::string case_id;
    std::string description;
    std::vector<std::pair<ConstraintKind, std::string>> constraint_templates;
    std::string objective = "MINIMIZE_TOTAL_COST";
    std::string output_format = "route-lines-v1";
};

class CaseLibrary {
public:
    // The three built-in cases, in fixed order: TSP_SINGLE,
    // MULTI_DAY_SINGLE_DEPOT, MULTI_DAY_DEPOT_PER_DAY.
    static CaseLibrary builtin();

    static CaseLibrary load(const std::string& path);
    void save(const std::string& path) const;

    const std::vector<CaseEntry>& entries() const { return entries_; }
    const CaseEntry* find(const std::string& case_id) const;

private:
    std::vector<CaseEntry> entries_;
};

// Fills the case's templates with parameters taken from the instance.
// Throws Error(UNKNOWN_CASE) and Error(TYPE_MISMATCH).
StructuredProblemFormulation instantiate_spf(const std::string& case_id,
                                             const ProblemInstance& instance,
                                             const CaseLibrary& library);

// Attaches instance, distance matrix and day count to a parsed generated
// formulation.
StructuredProblemFormulation bind_generated_spf(StructuredProblemFormulation spf,
                                                const ProblemInstance& instance);

void to_json(nlohmann::json& j, const ConstraintSpec& c);
void from_json(const nlohmann::json& j, ConstraintSpec& c);
void to_json(nlohmann::json& j, const StructuredProblemFormulation& spf);

}  // namespace routeforge
