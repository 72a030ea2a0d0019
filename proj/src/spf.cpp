#include "routeforge/spf.hpp"

#include <fstream>

#include "routeforge/error.hpp"

namespace routeforge {

namespace {

ProblemType entry_problem_type(const CaseEntry& entry) {
    // Built-in case ids double as problem type tags; anything else is
    // treated as free-form.
    try {
        return problem_type_from_tag(entry.case_id);
    } catch (const Error&) {
        return ProblemType::Novel;
    }
}

}  // namespace

std::string to_tag(ConstraintKind kind) {
    switch (kind) {
        case ConstraintKind::VisitAllExactlyOnce: return "VISIT_ALL_EXACTLY_ONCE";
        case ConstraintKind::RouteStartsEndsAtDepot: return "ROUTE_STARTS_ENDS_AT_DEPOT";
        case ConstraintKind::RouteCountEqualsDays: return "ROUTE_COUNT_EQUALS_DAYS";
        case ConstraintKind::DepotAssignedPerDay: return "DEPOT_ASSIGNED_PER_DAY";
        case ConstraintKind::FreeText: return "FREE_TEXT";
    }
    return "FREE_TEXT";
}

ConstraintKind constraint_kind_from_tag(const std::string& tag) {
    if (tag == "VISIT_ALL_EXACTLY_ONCE") return ConstraintKind::VisitAllExactlyOnce;
    if (tag == "ROUTE_STARTS_ENDS_AT_DEPOT") return ConstraintKind::RouteStartsEndsAtDepot;
    if (tag == "ROUTE_COUNT_EQUALS_DAYS") return ConstraintKind::RouteCountEqualsDays;
    if (tag == "DEPOT_ASSIGNED_PER_DAY") return ConstraintKind::DepotAssignedPerDay;
    if (tag == "FREE_TEXT") return ConstraintKind::FreeText;
    throw Error("LIBRARY_FORMAT", "unknown constraint kind tag '" + tag + "'");
}

ConstraintSpec ConstraintSpec::visit_all_exactly_once() {
    ConstraintSpec c;
    c.kind = ConstraintKind::VisitAllExactlyOnce;
    c.machine_checkable = true;
    return c;
}

ConstraintSpec ConstraintSpec::route_starts_ends_at_depot(int depot) {
    ConstraintSpec c;
    c.kind = ConstraintKind::RouteStartsEndsAtDepot;
    c.depot = depot;
    c.machine_checkable = true;
    return c;
}

ConstraintSpec ConstraintSpec::route_count_equals_days(int count) {
    ConstraintSpec c;
    c.kind = ConstraintKind::RouteCountEqualsDays;
    c.route_count = count;
    c.machine_checkable = true;
    return c;
}

ConstraintSpec ConstraintSpec::depot_assigned_per_day(std::map<int, int> day_depots) {
    ConstraintSpec c;
    c.kind = ConstraintKind::DepotAssignedPerDay;
    c.day_depots = std::move(day_depots);
    c.machine_checkable = true;
    return c;
}

ConstraintSpec ConstraintSpec::free_text(std::string sentence) {
    ConstraintSpec c;
    c.kind = ConstraintKind::FreeText;
    c.text = std::move(sentence);
    c.machine_checkable = false;
    return c;
}

std::vector<std::string> ConstraintSpec::render_lines() const {
    switch (kind) {
        case ConstraintKind::VisitAllExactlyOnce:
            return {"Each non-depot city must be visited exactly once across all routes."};
        case ConstraintKind::RouteStartsEndsAtDepot:
            return {"Each route must start and end at city " + std::to_string(depot) + "."};
        case ConstraintKind::RouteCountEqualsDays:
            return {"The plan must contain exactly " + std::to_string(route_count) +
                    " route(s), one for each travel day."};
        case ConstraintKind::DepotAssignedPerDay: {
            std::vector<std::string> lines;
            for (const auto& [day, depot_city] : day_depots) {
                lines.push_back("Day " + std::to_string(day + 1) + " must start and end at city " +
                                std::to_string(depot_city) + ".");
            }
            return lines;
        }
        case ConstraintKind::FreeText:
            return {text};
    }
    return {};
}

CaseLibrary CaseLibrary::builtin() {
    CaseLibrary lib;

    CaseEntry tsp;
    tsp.case_id = "TSP_SINGLE";
    tsp.description =
        "Plan one route for a single travel day that starts and ends at the depot city, visits "
        "every other city exactly once, and minimizes the total travel cost.";
    tsp.constraint_templates = {
        {ConstraintKind::VisitAllExactlyOnce,
         "Each non-depot city must be visited exactly once across all routes."},
        {ConstraintKind::RouteStartsEndsAtDepot, "Each route must start and end at city {depot}."},
        {ConstraintKind::RouteCountEqualsDays,
         "The plan must contain exactly {days} route(s), one for each travel day."},
    };

    CaseEntry multi = tsp;
    multi.case_id = "MULTI_DAY_SINGLE_DEPOT";
    multi.description =
        "Plan one route per travel day over several days with a single shared depot city; every "
        "route starts and ends at that depot, every non-depot city is visited exactly once over "
        "the whole trip, and the total travel cost is minimized.";

    CaseEntry per_day;
    per_day.case_id = "MULTI_DAY_DEPOT_PER_DAY";
    per_day.description =
        "Plan one route per travel day where each day has its own depot city; each day's route "
        "starts and ends at that day's depot, every non-depot city is visited exactly once over "
        "the whole trip, and the total travel cost is minimized.";
    per_day.constraint_templates = {
        {ConstraintKind::VisitAllExactlyOnce,
         "Each non-depot city must be visited exactly once across all routes."},
        {ConstraintKind::DepotAssignedPerDay, "Day {day} must start and end at city {depot}."},
        {ConstraintKind::RouteCountEqualsDays,
         "The plan must contain exactly {days} route(s), one for each travel day."},
    };

    lib.entries_ = {tsp, multi, per_day};
    return lib;
}

CaseLibrary CaseLibrary::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("IO_ERROR", "cannot open case library '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("LIBRARY_FORMAT", "invalid JSON in '" + path + "': " + e.what());
    }
    if (!j.is_array()) throw Error("LIBRARY_FORMAT", "case library must be a JSON array");
    CaseLibrary lib;
    for (const auto& je : j) {
        CaseEntry entry;
        try {
            entry.case_id = je.at("case_id").get<std::string>();
            entry.description = je.at("description").get<std::string>();
            for (const auto& jt : je.at("constraint_templates")) {
                entry.constraint_templates.emplace_back(
                    constraint_kind_from_tag(jt.at("kind").get<std::string>()),
                    jt.at("template").get<std::string>());
            }
            entry.objective = je.at("objective").get<std::string>();
            entry.output_format = je.at("output_format").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw Error("LIBRARY_FORMAT", std::string("malformed case entry: ") + e.what());
        }
        lib.entries_.push_back(std::move(entry));
    }
    return lib;
}

void CaseLibrary::save(const std::string& path) const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& entry : entries_) {
        nlohmann::json templates = nlohmann::json::array();
        for (const auto& [kind, tmpl] : entry.constraint_templates) {
            templates.push_back({{"kind", to_tag(kind)}, {"template", tmpl}});
        }
        j.push_back({{"case_id", entry.case_id},
                     {"description", entry.description},
                     {"constraint_templates", std::move(templates)},
                     {"objective", entry.objective},
                     {"output_format", entry.output_format}});
    }
    std::ofstream out(path);
    if (!out) throw Error("IO_ERROR", "cannot write case library '" + path + "'");
    out << j.dump(2) << "\n";
}

const CaseEntry* CaseLibrary::find(const std::string& case_id) const {
    for (const auto& entry : entries_) {
        if (entry.case_id == case_id) return &entry;
    }
    return nullptr;
}

StructuredProblemFormulation instantiate_spf(const std::string& case_id,
                                             const ProblemInstance& instance,
                                             const CaseLibrary& library) {
    const CaseEntry* entry = library.find(case_id);
    if (!entry) throw Error("UNKNOWN_CASE", "no case '" + case_id + "' in the library");

    const ProblemType expected = entry_problem_type(*entry);
    if (expected != ProblemType::Novel && expected != instance.problem_type) {
        throw Error("TYPE_MISMATCH", "case '" + case_id + "' expects a " + to_tag(expected) +
                                         " instance, got " + to_tag(instance.problem_type));
    }

    StructuredProblemFormulation spf;
    spf.case_id = entry->case_id;
    spf.description = entry->description;
    spf.output_format.days = instance.days;
    spf.instance = instance;
    spf.matrix = build_distance_matrix(instance);

    for (const auto& [kind, tmpl] : entry->constraint_templates) {
        switch (kind) {
            case ConstraintKind::VisitAllExactlyOnce:
                spf.constraints.push_back(ConstraintSpec::visit_all_exactly_once());
                break;
            case ConstraintKind::RouteStartsEndsAtDepot:
                if (instance.depots.empty()) {
                    throw Error("TYPE_MISMATCH",
                                "case '" + case_id + "' needs a depot but the instance has none");
                }
                spf.constraints.push_back(
                    ConstraintSpec::route_starts_ends_at_depot(instance.depots[0]));
                break;
            case ConstraintKind::RouteCountEqualsDays:
                spf.constraints.push_back(ConstraintSpec::route_count_equals_days(instance.days));
                break;
            case ConstraintKind::DepotAssignedPerDay: {
                if (instance.depots.size() != static_cast<std::size_t>(instance.days)) {
                    throw Error("TYPE_MISMATCH", "case '" + case_id +
                                                     "' needs one depot per day, instance has " +
                                                     std::to_string(instance.depots.size()));
                }
                std::map<int, int> day_depots;
                for (int day = 0; day < instance.days; ++day) {
                    day_depots[day] = instance.depots[day];
                }
                spf.constraints.push_back(ConstraintSpec::depot_assigned_per_day(day_depots));
                break;
            }
            case ConstraintKind::FreeText:
                spf.constraints.push_back(ConstraintSpec::free_text(tmpl));
                break;
        }
    }
    return spf;
}

StructuredProblemFormulation bind_generated_spf(StructuredProblemFormulation spf,
                                                const ProblemInstance& instance) {
    spf.case_id = kGeneratedCaseId;
    spf.output_format.days = instance.days;
    spf.instance = instance;
    spf.matrix = build_distance_matrix(instance);
    if (spf.description.empty()) spf.description = instance.request_text;
    return spf;
}

void to_json(nlohmann::json& j, const ConstraintSpec& c) {
    j = nlohmann::json{{"kind", to_tag(c.kind)}, {"machine_checkable", c.machine_checkable}};
    switch (c.kind) {
        case ConstraintKind::RouteStartsEndsAtDepot: j["depot"] = c.depot; break;
        case ConstraintKind::RouteCountEqualsDays: j["route_count"] = c.route_count; break;
        case ConstraintKind::DepotAssignedPerDay: {
            nlohmann::json pairs = nlohmann::json::array();
            for (const auto& [day, depot_city] : c.day_depots) {
                pairs.push_back(nlohmann::json::array({day, depot_city}));
            }
            j["day_depots"] = std::move(pairs);
            break;
        }
        case ConstraintKind::FreeText: j["text"] = c.text; break;
        case ConstraintKind::VisitAllExactlyOnce: break;
    }
}

void from_json(const nlohmann::json& j, ConstraintSpec& c) {
    const ConstraintKind kind = constraint_kind_from_tag(j.at("kind").get<std::string>());
    switch (kind) {
        case ConstraintKind::VisitAllExactlyOnce:
            c = ConstraintSpec::visit_all_exactly_once();
            break;
        case ConstraintKind::RouteStartsEndsAtDepot:
            c = ConstraintSpec::route_starts_ends_at_depot(j.at("depot").get<int>());
            break;
        case ConstraintKind::RouteCountEqualsDays:
            c = ConstraintSpec::route_count_equals_days(j.at("route_count").get<int>());
            break;
        case ConstraintKind::DepotAssignedPerDay: {
            std::map<int, int> day_depots;
            for (const auto& pair : j.at("day_depots")) {
                day_depots[pair.at(0).get<int>()] = pair.at(1).get<int>();
            }
            c = ConstraintSpec::depot_assigned_per_day(std::move(day_depots));
            break;
        }
        case ConstraintKind::FreeText:
            c = ConstraintSpec::free_text(j.at("text").get<std::string>());
            break;
    }
}

void to_json(nlohmann::json& j, const StructuredProblemFormulation& spf) {
    j = nlohmann::json{{"case_id", spf.case_id},
                       {"description", spf.description},
                       {"constraints", spf.constraints},
                       {"objective", "MINIMIZE_TOTAL_COST"},
                       {"output_format",
                        {{"grammar_id", spf.output_format.grammar_id},
                         {"days", spf.output_format.days}}},
                       {"instance", spf.instance}};
}

}  // namespace routeforge
