#include "routeforge/prompts.hpp"

#include <algorithm>

#include "routeforge/error.hpp"

namespace routeforge {

namespace {

std::string fill(std::string text, const std::string& name, const std::string& value) {
    const std::string needle = "{" + name + "}";
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.replace(pos, needle.size(), value);
        pos += value.size();
    }
    return text;
}

std::string render_constraint_block(const StructuredProblemFormulation& spf) {
    std::string out = "Constraints:\n";
    int line_no = 1;
    for (const auto& c : spf.constraints) {
        for (const auto& line : c.render_lines()) {
            out += std::to_string(line_no++) + ". " + line + "\n";
        }
    }
    return out;
}

std::string render_matrix_block(const StructuredProblemFormulation& spf) {
    const DistanceMatrix& m = spf.matrix;
    std::string out =
        "Distance matrix (entry in row i, column j is the distance between city i and city j):\n";
    for (int i = 0; i < m.size(); ++i) {
        out += "City " + std::to_string(i) + ":";
        for (int j = 0; j < m.size(); ++j) {
            out += " " + format_cost(m.at(i, j));
        }
        out += "\n";
    }
    return out;
}

std::string render_output_format_block(int days) {
    std::string out;
    for (int day = 1; day <= days; ++day) {
        out += day == 1 ? "Output format: " : "";
        out += "Day " + std::to_string(day) + ": <depot> -> ... -> <depot>\n";
    }
    out += "Total cost: <number>\n";
    out += "Write one Day line for each of the " + std::to_string(days) +
           " travel day(s), visiting cities by their decimal index, then the Total cost line.\n";
    return out;
}

std::string render_objective_line() {
    return "Objective: Minimize the total travel cost, the sum of the distances between "
           "consecutive cities along every route.\n";
}

// Shared problem statement so that fix and refine prompts are self-contained;
// every completion is a fresh single-turn exchange.
std::string render_problem_block(const StructuredProblemFormulation& spf) {
    std::string out;
    out += "Problem: " + spf.description + "\n\n";
    out += "There are " + std::to_string(spf.instance.cities.size()) + " cities, numbered 0 to " +
           std::to_string(spf.instance.cities.size() - 1) + ".\n\n";
    out += render_constraint_block(spf);
    out += "\n" + render_objective_line();
    out += "\n" + render_matrix_block(spf);
    return out;
}

// Canonical parameter fill for a worked example: depot 0, and two days with
// depots 0 and 1 when the entry assigns a depot per day.
std::string render_entry_example(const CaseEntry& entry) {
    const bool per_day = std::any_of(
        entry.constraint_templates.begin(), entry.constraint_templates.end(),
        [](const auto& t) { return t.first == ConstraintKind::DepotAssignedPerDay; });
    const int days = per_day ? 2 : 1;

    std::string out = "Problem: " + entry.description + "\n";
    out += "Constraints:\n";
    int line_no = 1;
    for (const auto& [kind, tmpl] : entry.constraint_templates) {
        if (kind == ConstraintKind::DepotAssignedPerDay) {
            for (int day = 1; day <= days; ++day) {
                std::string line = fill(tmpl, "day", std::to_string(day));
                line = fill(line, "depot", std::to_string(day - 1));
                out += std::to_string(line_no++) + ". " + line + "\n";
            }
        } else {
            std::string line = fill(tmpl, "depot", "0");
            line = fill(line, "days", std::to_string(days));
            out += std::to_string(line_no++) + ". " + line + "\n";
        }
    }
    out += "Objective: Minimize the total travel cost.\n";
    out += render_output_format_block(days);
    return out;
}

}  // namespace

std::string render_solve_prompt(const StructuredProblemFormulation& spf) {
    std::string out = "Solve the following constrained path planning problem.\n\n";
    out += render_problem_block(spf);
    out += "\n" + render_output_format_block(spf.output_format.days);
    return out;
}

std::string render_match_prompt(const std::string& request, const CaseLibrary& library) {
    std::string out = "A user submitted the following path planning request.\n\n";
    out += "Request: " + request + "\n\n";
    out += "The case library defines these problem types:\n";
    for (const auto& entry : library.entries()) {
        out += "- " + entry.case_id + ": " + entry.description + "\n";
    }
    out += "\nIf the request fits exactly one library case, reply with that case id and nothing "
           "else.\nIf no case fits, reply with NO_MATCH.\n";
    return out;
}

std::string render_fix_prompt_text(const StructuredProblemFormulation& spf,
                                   const std::string& failed_text,
                                   const std::vector<std::string>& problems) {
    std::string out = "Your previous answer to the following problem is not acceptable.\n\n";
    out += render_problem_block(spf);
    out += "\nPrevious answer:\n" + failed_text;
    if (failed_text.empty() || failed_text.back() != '\n') out += "\n";
    out += "\nProblems found:\n";
    for (const auto& problem : problems) {
        out += "- " + problem + "\n";
    }
    out += "\nRevise the answer so that every constraint is satisfied.\n";
    out += render_output_format_block(spf.output_format.days);
    return out;
}

std::string render_fix_prompt(const StructuredProblemFormulation& spf,
                              const CandidateSolution& failed,
                              const VerificationReport& report) {
    if (report.violations.empty()) {
        throw Error("EMPTY_REPORT", "a fix prompt needs at least one violation");
    }
    return render_fix_prompt_text(spf, format_route_lines(failed), report.messages());
}

std::string render_refine_prompt(
    const StructuredProblemFormulation& spf,
    const std::vector<std::pair<CandidateSolution, double>>& history) {
    if (history.empty()) {
        throw Error("EMPTY_HISTORY", "a refine prompt needs at least one prior solution");
    }
    auto sorted = history;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.second < b.second; });

    std::string out = "Improve on the best known solution to this path planning problem.\n\n";
    out += render_problem_block(spf);
    out += "\nThe following feasible solutions have been found so far, listed best first:\n";
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        out += "\nSolution " + std::to_string(i + 1) + ", total cost " +
               format_cost(sorted[i].second) + ":\n";
        out += format_route_lines(sorted[i].first);
    }
    out += "\nGenerate a new solution with a strictly lower total cost than the current best (" +
           format_cost(sorted.front().second) +
           "). Keep every constraint satisfied.\n";
    out += render_output_format_block(spf.output_format.days);
    return out;
}

std::string render_spf_generation_prompt(const std::string& request,
                                         const CaseEntry& example_entry) {
    std::string out =
        "You convert plain-text routing requests into a structured problem formulation.\n\n";
    out += "Example request:\n" + example_entry.description + "\n\n";
    out += "Example formulation:\n" + render_entry_example(example_entry);
    out += "\nNow write the formulation for the following request, using exactly the same "
           "layout: a Problem line, a numbered Constraints list covering every requirement "
           "stated in the request, an Objective line, and the Output format block.\n\n";
    out += "Request: " + request + "\n";
    return out;
}

std::string render_self_verification_prompt(const StructuredProblemFormulation& spf,
                                            const CandidateSolution& candidate) {
    std::string out =
        "Check whether the candidate solution below satisfies every constraint of this problem "
        "formulation.\n\n";
    out += "Problem: " + spf.description + "\n\n";
    out += render_constraint_block(spf);
    out += "\nCandidate solution:\n" + format_route_lines(candidate);
    out += "\nIf every constraint is satisfied, reply with exactly FEASIBLE.\nIf any constraint "
           "is violated, reply with VIOLATION: followed by a short description of the violated "
           "constraint.\n";
    return out;
}

}  // namespace routeforge
