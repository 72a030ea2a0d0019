#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "routeforge/pipeline.hpp"

namespace routeforge {

// One suite entry: an instance plus its request, optionally pinned to a
// recorded cassette.
struct SuiteTrial {
    std::string id;
    std::string instance_path;
    std::string request_text;
    std::string problem_type;
    std::string cassette;  // empty: use the base backend
};

// Suite file: JSON array of {instance_path, request_text|request_path,
// problem_type, cassette?}; relative paths resolve against the suite file.
std::vector<SuiteTrial> load_suite(const std::string& path);

struct AblationCell {
    VerificationMode mode = VerificationMode::External;
    bool iteration = true;
};

struct TrialRecord {
    std::string trial_id;
    std::string instance_id;
    std::string problem_type;
    VerificationMode verification_mode = VerificationMode::External;
    bool iteration_enabled = true;
    int repeat = 0;
    std::string status;       // pipeline status tag, or ERROR:<code>
    bool feasible = false;    // externally re-checked regardless of mode
    bool refinement_success = false;
    std::optional<double> first_feasible_cost;
    std::optional<double> best_cost;
    std::optional<double> gap;  // vs exact bound when one is computable
};

// Stable identity of a record for crash resume.
std::string record_key(const TrialRecord& r);

struct RunOptions {
    int trials_per_cell = 1;
    int parallelism = 1;
    // Called under a lock as each record lands; wire this to incremental
    // persistence.
    std::function<void(const TrialRecord&)> on_record;
    // Records whose key is listed here are skipped (already persisted).
    std::set<std::string> skip_keys;
};

// Runs every trial under every requested ablation cell. A failing trial
// yields an ERROR record; the suite continues.
std::vector<TrialRecord> run_suite(const std::vector<SuiteTrial>& trials,
                                   const PipelineConfig& base_config,
                                   const std::vector<AblationCell>& cells,
                                   const CaseLibrary& library,
                                   const RunOptions& options = {});

struct TypeMetrics {
    int trials = 0;
    int feasible_trials = 0;
    std::optional<double> avg_cost_without_iteration;  // mean first cost, iteration off
    std::optional<double> avg_cost_with_iteration;     // mean best cost, iteration on
    std::optional<double> avg_cost_reduction;          // percent
    std::optional<double> refinement_success_rate;     // percent, iteration-on cells

    bool operator==(const TypeMetrics&) const = default;
};

struct MetricsTable {
    std::map<std::string, TypeMetrics> per_type;
    int total_trials = 0;
    int feasible_count = 0;
    double feasibility_rate = 0.0;  // percent over all trials, parse failures included
    // Both pooled styles, labeled: plain mean of per-type rates, and
    // success-weighted over all trials.
    std::optional<double> pooled_success_unweighted;
    std::optional<double> pooled_success_weighted;

    bool operator==(const MetricsTable&) const = default;
};

// Aggregates records. Deterministic under record reordering: inputs are
// canonically sorted before any floating-point sum. Cells with no feasible
// trials leave their averages absent. Throws Error(EMPTY_RECORDS).
MetricsTable compute_metrics(const std::vector<TrialRecord>& records);

// Text table, one row per problem type plus pooled lines. Costs use two
// decimals; percentages use up to two (trailing zeros trimmed); absent cells
// render as an em dash.
std::string render_report(const MetricsTable& table);

void to_json(nlohmann::json& j, const TrialRecord& r);
void from_json(const nlohmann::json& j, TrialRecord& r);
void to_json(nlohmann::json& j, const TypeMetrics& m);
void from_json(const nlohmann::json& j, TypeMetrics& m);
void to_json(nlohmann::json& j, const MetricsTable& t);
void from_json(const nlohmann::json& j, MetricsTable& t);

}  // namespace routeforge
