#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "routeforge/gateway.hpp"
#include "routeforge/parsers.hpp"
#include "routeforge/verifier.hpp"

namespace routeforge {

enum class VerificationMode { External, Self, None };
enum class PathwayOverride { None, ForceA, ForceB };
enum class Pathway { A, B };  // A: library match; B: self-formulation
enum class PipelineStatus { Solved, InfeasibleAfterBudget, FormulationFailed };
enum class PromptKind { Match, Solve, Fix, Refine, SpfGeneration, SelfVerification };

std::string to_tag(VerificationMode mode);
VerificationMode verification_mode_from_tag(const std::string& tag);
std::string to_tag(PipelineStatus status);
std::string to_tag(PromptKind kind);
std::string to_tag(Pathway pathway);

struct PipelineConfig {
    int max_feasibility_iters = 5;
    int max_refine_rounds = 5;
    PathwayOverride pathway_override = PathwayOverride::None;
    BackendConfig backend;
    VerificationMode verification_mode = VerificationMode::External;
    // Iteration ablation switch: when false the refinement stage is skipped
    // and the first feasible solution is final.
    bool refinement_enabled = true;
    // Refinement prompts show at most this many prior solutions, best first.
    int refine_history_cap = 3;
    // A model-reported cost further than this relative distance from the
    // recomputed cost is logged as a warning, never a violation.
    double cost_mismatch_warn_ratio = 0.005;
};

// One model exchange as the pipeline saw it. Full prompt/response bytes live
// in the transcript; records keep the response plus interpretation.
struct IterationRecord {
    PromptKind kind = PromptKind::Solve;
    std::string response;
    bool parsed = false;
    std::string parse_error;
    std::optional<VerificationReport> report;
    std::optional<SelfVerdict> self_verdict;
    std::optional<double> cost;  // recomputed, present when accepted
    std::string note;            // e.g. reported-cost mismatch warning
};

struct PipelineTrace {
    Pathway pathway = Pathway::A;
    std::optional<MatchOutcome> match_outcome;
    std::optional<StructuredProblemFormulation> spf_used;
    std::vector<IterationRecord> iterations;
    std::optional<double> first_feasible_cost;
    std::optional<double> best_cost;
    bool refinement_success = false;
    bool ablation = false;  // verification was disabled
    std::string failure_reason;
    Transcript transcript;
    nlohmann::json effective_config;
};

struct PipelineResult {
    PipelineStatus status = PipelineStatus::FormulationFailed;
    std::optional<CandidateSolution> solution;
    std::optional<double> cost;
    PipelineTrace trace;
};

// Hard ceiling on completions per run: match incl. one re-ask, two per
// feasibility iteration (candidate + self-check), two per refinement round,
// formulation incl. one re-ask.
int budget_limit(const PipelineConfig& config);

// Classifies the request against the library at temperature 0. One re-ask on
// an unparseable response; a second failure is NO_MATCH.
MatchOutcome match_case(const std::string& request, const CaseLibrary& library,
                        Gateway& gateway, PipelineTrace& trace);

struct StageOutcome {
    std::optional<CandidateSolution> solution;
    double cost = 0.0;
};

// Generate -> verify -> fix loop with external verification (or none under
// the ablation mode). Parse failures consume an iteration and feed their
// message into the next fix prompt.
StageOutcome feasibility_loop(const StructuredProblemFormulation& spf,
                              const ProblemInstance& instance, Gateway& gateway,
                              const PipelineConfig& config, PipelineTrace& trace);

// Same loop shape, but the verdict comes from a self-verification prompt.
// Constraints the formulation parser classified are additionally checked
// externally, and an external violation overrides a FEASIBLE self-verdict.
StageOutcome self_verification_loop(const StructuredProblemFormulation& spf,
                                    const ProblemInstance& instance, Gateway& gateway,
                                    const PipelineConfig& config, PipelineTrace& trace);

// Single-shot formulation generation with one re-ask on parse failure.
// Returns an unbound-then-bound formulation, or nullopt.
std::optional<StructuredProblemFormulation> self_formulate(const std::string& request,
                                                           const ProblemInstance& instance,
                                                           const CaseLibrary& library,
                                                           Gateway& gateway,
                                                           const PipelineConfig& config,
                                                           PipelineTrace& trace);

struct RefinementOutcome {
    CandidateSolution best;
    double cost = 0.0;
};

// Repeated improvement rounds seeded with a feasible solution. The running
// best never worsens; ties keep the earlier solution. Candidates are checked
// under the given verification mode before being admitted.
RefinementOutcome refinement_loop(const StructuredProblemFormulation& spf,
                                  const ProblemInstance& instance,
                                  const CandidateSolution& seed, double seed_cost,
                                  Gateway& gateway, const PipelineConfig& config,
                                  VerificationMode mode, PipelineTrace& trace);

// Full orchestration: pathway choice, formulation, feasibility, refinement.
// Throws Error(INVALID_INSTANCE) when the instance fails validation;
// transport-level errors propagate.
PipelineResult solve_request(const std::string& request, const ProblemInstance& instance,
                             const CaseLibrary& library, const PipelineConfig& config);

void to_json(nlohmann::json& j, const PipelineConfig& c);
void to_json(nlohmann::json& j, const IterationRecord& r);
void to_json(nlohmann::json& j, const PipelineTrace& t);
void to_json(nlohmann::json& j, const PipelineResult& r);

}  // namespace routeforge
