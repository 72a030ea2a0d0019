#pragma once

#include <string>
#include <utility>
#include <vector>

#include "routeforge/solution.hpp"
#include "routeforge/spf.hpp"
#include "routeforge/verifier.hpp"

namespace routeforge {

// All prompt rendering in one place. Renderers are pure: same inputs, same
// bytes. None of them may leave an unfilled {placeholder} behind.

// Initial solve prompt: description, constraints, objective, distance matrix
// at two decimals, output format.
std::string render_solve_prompt(const StructuredProblemFormulation& spf);

// Case matching prompt: the request plus every library entry, asking for one
// case id or NO_MATCH.
std::string render_match_prompt(const std::string& request, const CaseLibrary& library);

// Repair prompt built from a failed solution and its verification report.
// Throws Error(EMPTY_REPORT) when the report has no violations.
std::string render_fix_prompt(const StructuredProblemFormulation& spf,
                              const CandidateSolution& failed,
                              const VerificationReport& report);

// Same shape, but takes raw failed text plus ready-made problem lines; used
// for parse failures where no structured solution exists.
std::string render_fix_prompt_text(const StructuredProblemFormulation& spf,
                                   const std::string& failed_text,
                                   const std::vector<std::string>& problems);

// Improvement prompt listing prior feasible solutions best-first and asking
// for a strictly lower cost than the current best.
std::string render_refine_prompt(
    const StructuredProblemFormulation& spf,
    const std::vector<std::pair<CandidateSolution, double>>& history);

// Formulation prompt for requests outside the library: one worked example
// from the given entry, then the new request.
std::string render_spf_generation_prompt(const std::string& request,
                                         const CaseEntry& example_entry);

// Asks the model to check its own candidate, answering FEASIBLE or
// VIOLATION: <description>.
std::string render_self_verification_prompt(const StructuredProblemFormulation& spf,
                                            const CandidateSolution& candidate);

}  // namespace routeforge
