#pragma once

#include <optional>
#include <string>

#include "routeforge/solution.hpp"
#include "routeforge/spf.hpp"

namespace routeforge {

// Parse failures are data: they flow back into the next prompt instead of
// unwinding the stack.
struct ParseFailure {
    std::string code;
    std::string message;
};

template <typename T>
struct ParseResult {
    std::optional<T> value;
    ParseFailure error;

    bool ok() const { return value.has_value(); }

    static ParseResult success(T v) {
        ParseResult r;
        r.value = std::move(v);
        return r;
    }
    static ParseResult failure(std::string code, std::string message) {
        ParseResult r;
        r.error = {std::move(code), std::move(message)};
        return r;
    }
};

struct MatchOutcome {
    bool matched = false;
    std::string case_id;  // set iff matched

    static MatchOutcome match(std::string id) { return {true, std::move(id)}; }
    static MatchOutcome no_match() { return {}; }
};

struct SelfVerdict {
    bool feasible = false;
    std::string violation;  // non-empty iff !feasible
};

// Scans the response for a case id or NO_MATCH; the earliest standalone
// token wins, case-insensitively. Fails with UNPARSEABLE_MATCH.
ParseResult<MatchOutcome> parse_match_response(const std::string& text,
                                               const CaseLibrary& library);

// Extracts route-lines-v1 output: one "Day <k>:" line per expected day plus
// an optional trailing "Total cost:" line. Tolerates surrounding prose and
// takes the first line found for each day. Failure codes: MISSING_DAY_LINE,
// MALFORMED_ROUTE_LINE, INDEX_OUT_OF_RANGE; each names the offending line.
ParseResult<CandidateSolution> parse_solution_response(const std::string& text,
                                                       const StructuredProblemFormulation& spf);

// Parses a model-written formulation in the canonical layout and classifies
// each constraint sentence. Unclassified sentences become FreeText. Failure
// codes: NO_CONSTRAINTS_FOUND, NO_OUTPUT_FORMAT. The result is unbound: call
// bind_generated_spf before use.
ParseResult<StructuredProblemFormulation> parse_generated_spf(const std::string& text);

// FEASIBLE / VIOLATION: <description>. Anything ambiguous is conservatively
// treated as a violation ("unparseable verdict").
SelfVerdict parse_self_verification_response(const std::string& text);

// Sentence classification rule table used by parse_generated_spf; exposed
// for direct testing.
ConstraintSpec classify_constraint_sentence(const std::string& sentence);

}  // namespace routeforge
