#include "routeforge/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "routeforge/error.hpp"
#include "routeforge/prompts.hpp"

namespace routeforge {

namespace {

// Classification-style prompts (match, formulation, self-checks) run cold;
// only solve/fix/refine use the configured sampling temperature.
constexpr double kClassifierTemperature = 0.0;

IterationRecord& push_record(PipelineTrace& trace, PromptKind kind, std::string response) {
    IterationRecord record;
    record.kind = kind;
    record.response = std::move(response);
    trace.iterations.push_back(std::move(record));
    return trace.iterations.back();
}

void note_cost_mismatch(IterationRecord& record, const CandidateSolution& solution,
                        double recomputed, const PipelineConfig& config) {
    if (!solution.reported_cost) return;
    const double diff = std::abs(*solution.reported_cost - recomputed);
    if (diff > config.cost_mismatch_warn_ratio * std::max(1.0, recomputed)) {
        record.note = "reported total cost " + format_cost(*solution.reported_cost) +
                      " differs from recomputed cost " + format_cost(recomputed);
    }
}

std::string describe(const ParseFailure& failure) {
    return failure.code + ": " + failure.message;
}

}  // namespace

std::string to_tag(VerificationMode mode) {
    switch (mode) {
        case VerificationMode::External: return "EXTERNAL";
        case VerificationMode::Self: return "SELF";
        case VerificationMode::None: return "NONE";
    }
    return "EXTERNAL";
}

VerificationMode verification_mode_from_tag(const std::string& tag) {
    if (tag == "EXTERNAL") return VerificationMode::External;
    if (tag == "SELF") return VerificationMode::Self;
    if (tag == "NONE") return VerificationMode::None;
    throw Error("CONFIG_ERROR", "unknown verification mode '" + tag + "'");
}

std::string to_tag(PipelineStatus status) {
    switch (status) {
        case PipelineStatus::Solved: return "SOLVED";
        case PipelineStatus::InfeasibleAfterBudget: return "INFEASIBLE_AFTER_BUDGET";
        case PipelineStatus::FormulationFailed: return "FORMULATION_FAILED";
    }
    return "FORMULATION_FAILED";
}

std::string to_tag(PromptKind kind) {
    switch (kind) {
        case PromptKind::Match: return "MATCH";
        case PromptKind::Solve: return "SOLVE";
        case PromptKind::Fix: return "FIX";
        case PromptKind::Refine: return "REFINE";
        case PromptKind::SpfGeneration: return "SPF_GENERATION";
        case PromptKind::SelfVerification: return "SELF_VERIFICATION";
    }
    return "SOLVE";
}

std::string to_tag(Pathway pathway) {
    return pathway == Pathway::A ? "A" : "B";
}

int budget_limit(const PipelineConfig& config) {
    return 2 + 2 * config.max_feasibility_iters + 2 * config.max_refine_rounds + 2;
}

MatchOutcome match_case(const std::string& request, const CaseLibrary& library,
                        Gateway& gateway, PipelineTrace& trace) {
    const std::string prompt = render_match_prompt(request, library);
    for (int attempt = 0; attempt < 2; ++attempt) {
        const std::string response =
            gateway.complete(prompt, trace.transcript, kClassifierTemperature);
        IterationRecord& record = push_record(trace, PromptKind::Match, response);
        auto parsed = parse_match_response(response, library);
        if (parsed.ok()) {
            record.parsed = true;
            record.note =
                parsed.value->matched ? "matched " + parsed.value->case_id : "no library match";
            return *parsed.value;
        }
        record.parse_error = describe(parsed.error);
    }
    return MatchOutcome::no_match();
}

StageOutcome feasibility_loop(const StructuredProblemFormulation& spf,
                              const ProblemInstance& instance, Gateway& gateway,
                              const PipelineConfig& config, PipelineTrace& trace) {
    const bool check = config.verification_mode != VerificationMode::None;
    std::string failed_text;
    std::vector<std::string> problems;

    for (int iter = 0; iter < config.max_feasibility_iters; ++iter) {
        const bool fixing = !problems.empty();
        const std::string prompt =
            fixing ? render_fix_prompt_text(spf, failed_text, problems) : render_solve_prompt(spf);
        const std::string response = gateway.complete(prompt, trace.transcript);
        IterationRecord& record =
            push_record(trace, fixing ? PromptKind::Fix : PromptKind::Solve, response);

        auto parsed = parse_solution_response(response, spf);
        if (!parsed.ok()) {
            record.parse_error = describe(parsed.error);
            failed_text = response;
            problems = {parsed.error.message};
            continue;
        }
        record.parsed = true;
        CandidateSolution solution = std::move(*parsed.value);

        if (!check) {
            const double cost = compute_cost(solution, spf.matrix);
            record.cost = cost;
            return {std::move(solution), cost};
        }

        VerificationReport report = verify(solution, spf, instance);
        record.report = report;
        if (report.feasible) {
            const double cost = *report.recomputed_cost;
            record.cost = cost;
            note_cost_mismatch(record, solution, cost, config);
            return {std::move(solution), cost};
        }
        failed_text = format_route_lines(solution);
        problems = report.messages();
    }
    return {};
}

StageOutcome self_verification_loop(const StructuredProblemFormulation& spf,
                                    const ProblemInstance& instance, Gateway& gateway,
                                    const PipelineConfig& config, PipelineTrace& trace) {
    // Generated formulations carry classifier-derived constraints; those are
    // double-checked externally and can override a FEASIBLE self-verdict.
    // Library formulations under this mode rely on the self-verdict alone.
    const bool external_override = spf.case_id == kGeneratedCaseId;
    std::string failed_text;
    std::vector<std::string> problems;

    for (int iter = 0; iter < config.max_feasibility_iters; ++iter) {
        const bool fixing = !problems.empty();
        const std::string prompt =
            fixing ? render_fix_prompt_text(spf, failed_text, problems) : render_solve_prompt(spf);
        const std::string response = gateway.complete(prompt, trace.transcript);
        IterationRecord& record =
            push_record(trace, fixing ? PromptKind::Fix : PromptKind::Solve, response);

        auto parsed = parse_solution_response(response, spf);
        if (!parsed.ok()) {
            record.parse_error = describe(parsed.error);
            failed_text = response;
            problems = {parsed.error.message};
            continue;
        }
        record.parsed = true;
        CandidateSolution solution = std::move(*parsed.value);

        const std::string check_prompt = render_self_verification_prompt(spf, solution);
        const std::string verdict_text =
            gateway.complete(check_prompt, trace.transcript, kClassifierTemperature);
        IterationRecord& check = push_record(trace, PromptKind::SelfVerification, verdict_text);
        check.parsed = true;
        const SelfVerdict verdict = parse_self_verification_response(verdict_text);
        check.self_verdict = verdict;

        if (!verdict.feasible) {
            failed_text = format_route_lines(solution);
            problems = {verdict.violation};
            continue;
        }
        if (external_override) {
            VerificationReport report = verify(solution, spf, instance);
            check.report = report;
            if (!report.feasible) {
                check.note = "FEASIBLE self-verdict overridden by constraint check";
                failed_text = format_route_lines(solution);
                problems = report.messages();
                continue;
            }
        }
        const double cost = compute_cost(solution, spf.matrix);
        record.cost = cost;
        note_cost_mismatch(record, solution, cost, config);
        return {std::move(solution), cost};
    }
    return {};
}

std::optional<StructuredProblemFormulation> self_formulate(const std::string& request,
                                                           const ProblemInstance& instance,
                                                           const CaseLibrary& library,
                                                           Gateway& gateway,
                                                           const PipelineConfig& config,
                                                           PipelineTrace& trace) {
    (void)config;
    const CaseEntry* example = library.find("TSP_SINGLE");
    if (!example) {
        if (library.entries().empty()) {
            throw Error("LIBRARY_EMPTY", "the case library has no entries to use as an example");
        }
        example = &library.entries().front();
    }
    const std::string prompt = render_spf_generation_prompt(request, *example);
    for (int attempt = 0; attempt < 2; ++attempt) {
        const std::string response =
            gateway.complete(prompt, trace.transcript, kClassifierTemperature);
        IterationRecord& record = push_record(trace, PromptKind::SpfGeneration, response);
        auto parsed = parse_generated_spf(response);
        if (parsed.ok()) {
            record.parsed = true;
            return bind_generated_spf(std::move(*parsed.value), instance);
        }
        record.parse_error = describe(parsed.error);
    }
    return std::nullopt;
}

RefinementOutcome refinement_loop(const StructuredProblemFormulation& spf,
                                  const ProblemInstance& instance,
                                  const CandidateSolution& seed, double seed_cost,
                                  Gateway& gateway, const PipelineConfig& config,
                                  VerificationMode mode, PipelineTrace& trace) {
    const bool external_override = spf.case_id == kGeneratedCaseId;
    std::vector<std::pair<CandidateSolution, double>> history{{seed, seed_cost}};
    RefinementOutcome outcome{seed, seed_cost};

    for (int round = 0; round < config.max_refine_rounds; ++round) {
        // The prompt shows at most refine_history_cap solutions, best first;
        // stable sort keeps the earlier one ahead on cost ties.
        auto view = history;
        std::stable_sort(view.begin(), view.end(),
                         [](const auto& a, const auto& b) { return a.second < b.second; });
        if (static_cast<int>(view.size()) > config.refine_history_cap) {
            view.resize(config.refine_history_cap);
        }
        const std::string prompt = render_refine_prompt(spf, view);
        const std::string response = gateway.complete(prompt, trace.transcript);
        IterationRecord& record = push_record(trace, PromptKind::Refine, response);

        auto parsed = parse_solution_response(response, spf);
        if (!parsed.ok()) {
            record.parse_error = describe(parsed.error);
            continue;
        }
        record.parsed = true;
        CandidateSolution candidate = std::move(*parsed.value);

        double cost = 0.0;
        if (mode == VerificationMode::External) {
            VerificationReport report = verify(candidate, spf, instance);
            record.report = report;
            if (!report.feasible) continue;
            cost = *report.recomputed_cost;
        } else if (mode == VerificationMode::Self) {
            const std::string check_prompt = render_self_verification_prompt(spf, candidate);
            const std::string verdict_text =
                gateway.complete(check_prompt, trace.transcript, kClassifierTemperature);
            IterationRecord& check = push_record(trace, PromptKind::SelfVerification, verdict_text);
            check.parsed = true;
            const SelfVerdict verdict = parse_self_verification_response(verdict_text);
            check.self_verdict = verdict;
            if (!verdict.feasible) continue;
            if (external_override) {
                VerificationReport report = verify(candidate, spf, instance);
                check.report = report;
                if (!report.feasible) {
                    check.note = "FEASIBLE self-verdict overridden by constraint check";
                    continue;
                }
            }
            cost = compute_cost(candidate, spf.matrix);
        } else {
            cost = compute_cost(candidate, spf.matrix);
        }

        record.cost = cost;
        note_cost_mismatch(record, candidate, cost, config);
        history.emplace_back(candidate, cost);
        if (compare_costs(cost, outcome.cost) == Ordering::ABetter) {
            outcome.best = std::move(candidate);
            outcome.cost = cost;
        }
    }
    return outcome;
}

PipelineResult solve_request(const std::string& request, const ProblemInstance& instance,
                             const CaseLibrary& library, const PipelineConfig& config) {
    ValidationResult validation = validate_instance(instance);
    if (!validation.ok()) {
        std::string joined;
        for (const Defect& defect : validation.defects) {
            if (!defect.fatal) continue;
            if (!joined.empty()) joined += "; ";
            joined += defect.message;
        }
        throw Error("INVALID_INSTANCE", joined);
    }

    PipelineResult result;
    PipelineTrace& trace = result.trace;
    to_json(trace.effective_config, config);
    trace.ablation = config.verification_mode == VerificationMode::None;

    Gateway gateway(config.backend);

    const auto finalize = [&]() {
        const int limit = budget_limit(config);
        if (static_cast<int>(trace.transcript.entries.size()) > limit) {
            throw Error("BUDGET_EXCEEDED",
                        "run used " + std::to_string(trace.transcript.entries.size()) +
                            " completions, limit " + std::to_string(limit));
        }
    };

    std::optional<StructuredProblemFormulation> spf;
    Pathway pathway = Pathway::A;

    if (config.pathway_override == PathwayOverride::ForceA) {
        const std::string tag = to_tag(instance.problem_type);
        if (instance.problem_type == ProblemType::Novel || !library.find(tag)) {
            result.status = PipelineStatus::FormulationFailed;
            trace.failure_reason = "pathway A was forced, but no library case covers the instance";
            finalize();
            return result;
        }
        trace.match_outcome = MatchOutcome::match(tag);
        spf = instantiate_spf(tag, instance, library);
    } else if (config.pathway_override == PathwayOverride::ForceB) {
        pathway = Pathway::B;
    } else {
        MatchOutcome outcome = match_case(request, library, gateway, trace);
        trace.match_outcome = outcome;
        if (outcome.matched) {
            try {
                spf = instantiate_spf(outcome.case_id, instance, library);
            } catch (const Error& error) {
                // A matched case that cannot bind to this instance is treated
                // like no match: the run falls through to self-formulation.
                trace.iterations.back().note =
                    std::string("matched case rejected: ") + error.what();
                pathway = Pathway::B;
            }
        } else {
            pathway = Pathway::B;
        }
    }

    if (!spf && pathway == Pathway::B) {
        spf = self_formulate(request, instance, library, gateway, config, trace);
        if (!spf) {
            result.status = PipelineStatus::FormulationFailed;
            trace.pathway = pathway;
            trace.failure_reason = "formulation response stayed unparseable after one re-ask";
            finalize();
            return result;
        }
    }

    trace.pathway = pathway;
    trace.spf_used = spf;

    // Pathway B always judges candidates by self-verification (unless the
    // verification ablation disables checking entirely); pathway A uses the
    // configured mode.
    const VerificationMode stage_mode =
        (pathway == Pathway::B && config.verification_mode != VerificationMode::None)
            ? VerificationMode::Self
            : config.verification_mode;

    StageOutcome stage = stage_mode == VerificationMode::Self
                             ? self_verification_loop(*spf, instance, gateway, config, trace)
                             : feasibility_loop(*spf, instance, gateway, config, trace);

    if (!stage.solution) {
        result.status = PipelineStatus::InfeasibleAfterBudget;
        trace.failure_reason = "no feasible solution within the iteration budget";
        finalize();
        return result;
    }

    trace.first_feasible_cost = stage.cost;
    CandidateSolution best = std::move(*stage.solution);
    double best_cost = stage.cost;

    if (config.refinement_enabled) {
        RefinementOutcome refined = refinement_loop(*spf, instance, best, best_cost, gateway,
                                                    config, stage_mode, trace);
        best = std::move(refined.best);
        best_cost = refined.cost;
    }

    trace.best_cost = best_cost;
    trace.refinement_success =
        compare_costs(best_cost, *trace.first_feasible_cost) == Ordering::ABetter;

    if (stage_mode == VerificationMode::External) {
        VerificationReport fresh = verify(best, *spf, instance);
        if (!fresh.feasible) {
            throw Error("VERIFIER_DISAGREEMENT", "final solution failed re-verification");
        }
    }

    result.status = PipelineStatus::Solved;
    result.solution = std::move(best);
    result.cost = best_cost;
    finalize();
    return result;
}

void to_json(nlohmann::json& j, const PipelineConfig& c) {
    const char* override_tag = "NONE";
    if (c.pathway_override == PathwayOverride::ForceA) override_tag = "FORCE_A";
    if (c.pathway_override == PathwayOverride::ForceB) override_tag = "FORCE_B";
    nlohmann::json backend;
    to_json(backend, c.backend);
    j = nlohmann::json{{"max_feasibility_iters", c.max_feasibility_iters},
                       {"max_refine_rounds", c.max_refine_rounds},
                       {"pathway_override", override_tag},
                       {"backend", std::move(backend)},
                       {"verification_mode", to_tag(c.verification_mode)},
                       {"refinement_enabled", c.refinement_enabled},
                       {"refine_history_cap", c.refine_history_cap},
                       {"cost_mismatch_warn_ratio", c.cost_mismatch_warn_ratio}};
}

void to_json(nlohmann::json& j, const IterationRecord& r) {
    j = nlohmann::json{{"kind", to_tag(r.kind)},
                       {"response", r.response},
                       {"parsed", r.parsed},
                       {"parse_error", r.parse_error},
                       {"note", r.note}};
    if (r.report) {
        nlohmann::json report;
        to_json(report, *r.report);
        j["report"] = std::move(report);
    } else {
        j["report"] = nullptr;
    }
    j["self_verdict"] = r.self_verdict
                            ? nlohmann::json{{"feasible", r.self_verdict->feasible},
                                             {"violation", r.self_verdict->violation}}
                            : nlohmann::json(nullptr);
    j["cost"] = r.cost ? nlohmann::json(*r.cost) : nlohmann::json(nullptr);
}

void to_json(nlohmann::json& j, const PipelineTrace& t) {
    j = nlohmann::json{{"pathway", to_tag(t.pathway)},
                       {"iterations", t.iterations},
                       {"refinement_success", t.refinement_success},
                       {"ablation", t.ablation},
                       {"failure_reason", t.failure_reason},
                       {"transcript", t.transcript},
                       {"effective_config", t.effective_config}};
    j["match_outcome"] = t.match_outcome
                             ? nlohmann::json{{"matched", t.match_outcome->matched},
                                              {"case_id", t.match_outcome->case_id}}
                             : nlohmann::json(nullptr);
    if (t.spf_used) {
        nlohmann::json spf;
        to_json(spf, *t.spf_used);
        j["spf_used"] = std::move(spf);
    } else {
        j["spf_used"] = nullptr;
    }
    j["first_feasible_cost"] =
        t.first_feasible_cost ? nlohmann::json(*t.first_feasible_cost) : nlohmann::json(nullptr);
    j["best_cost"] = t.best_cost ? nlohmann::json(*t.best_cost) : nlohmann::json(nullptr);
}

void to_json(nlohmann::json& j, const PipelineResult& r) {
    j = nlohmann::json{{"status", to_tag(r.status)}, {"trace", r.trace}};
    if (r.solution) {
        nlohmann::json solution;
        to_json(solution, *r.solution);
        j["solution"] = std::move(solution);
    } else {
        j["solution"] = nullptr;
    }
    j["cost"] = r.cost ? nlohmann::json(*r.cost) : nlohmann::json(nullptr);
}

}  // namespace routeforge
