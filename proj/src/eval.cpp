#include "routeforge/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "routeforge/error.hpp"
#include "routeforge/oracle.hpp"

namespace routeforge {

namespace {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("IO_ERROR", "cannot read '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string resolve_against(const std::filesystem::path& base, const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_absolute()) return p.string();
    return (base / p).lexically_normal().string();
}

// Ground-truth bound for gap reporting; absent when no exact oracle fits.
std::optional<CostBound> exact_bound(const ProblemInstance& instance) {
    try {
        const int n = static_cast<int>(instance.cities.size());
        if (instance.problem_type == ProblemType::TspSingle) {
            if (n <= kBruteForceMaxCitiesSingle) return brute_force_optimal(instance);
            if (n <= kHeldKarpMaxCities) return held_karp_optimal(instance);
            return std::nullopt;
        }
        if (instance.problem_type == ProblemType::MultiDaySingleDepot ||
            instance.problem_type == ProblemType::MultiDayDepotPerDay) {
            const int non_depot = static_cast<int>(instance.non_depot_cities().size());
            if (non_depot <= kBruteForceMaxNonDepotMulti && instance.days <= kBruteForceMaxDays) {
                return brute_force_optimal(instance);
            }
        }
    } catch (const Error&) {
    }
    return std::nullopt;
}

TrialRecord run_one(const SuiteTrial& trial, const PipelineConfig& base_config,
                    const AblationCell& cell, int repeat, const CaseLibrary& library) {
    TrialRecord record;
    record.trial_id = trial.id;
    record.instance_id = std::filesystem::path(trial.instance_path).stem().string();
    record.problem_type = trial.problem_type;
    record.verification_mode = cell.mode;
    record.iteration_enabled = cell.iteration;
    record.repeat = repeat;

    try {
        const ProblemInstance instance = load_instance(trial.instance_path);

        PipelineConfig config = base_config;
        config.verification_mode = cell.mode;
        config.refinement_enabled = cell.iteration;
        if (!trial.cassette.empty()) {
            config.backend.kind = BackendKind::Replay;
            config.backend.cassette_path = trial.cassette;
            config.backend.script.clear();
        }

        PipelineResult result = solve_request(trial.request_text, instance, library, config);
        record.status = to_tag(result.status);
        record.refinement_success = result.trace.refinement_success;
        record.first_feasible_cost = result.trace.first_feasible_cost;
        record.best_cost = result.trace.best_cost;

        // Feasibility is always judged externally, whatever mode the run
        // used: for library types against the canonical formulation, for
        // novel requests against whatever machine-checkable constraints the
        // run's own formulation carried.
        if (result.solution) {
            std::optional<StructuredProblemFormulation> truth;
            if (instance.problem_type != ProblemType::Novel) {
                truth = instantiate_spf(to_tag(instance.problem_type), instance, library);
            } else if (result.trace.spf_used) {
                truth = result.trace.spf_used;
            }
            if (truth) {
                record.feasible = verify(*result.solution, *truth, instance).feasible;
            }
        }

        if (record.feasible && record.best_cost) {
            if (auto bound = exact_bound(instance)) {
                record.gap = optimality_gap(*record.best_cost, *bound).ratio;
            }
        }
    } catch (const Error& error) {
        record.status = std::string("ERROR:") + error.code();
    } catch (const std::exception&) {
        record.status = "ERROR:EXCEPTION";
    }
    return record;
}

std::string trim_percent(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.2f", value);
    std::string text(buffer);
    while (!text.empty() && text.back() == '0') text.pop_back();
    if (!text.empty() && text.back() == '.') text.pop_back();
    return text + "%";
}

std::string cell_text(const std::optional<double>& value, bool percent) {
    if (!value) return "—";
    return percent ? trim_percent(*value) : format_cost(*value);
}

// Report rows use the conventional numbering of the built-in types; novel
// requests come last.
std::string type_display(const std::string& tag) {
    if (tag == "TSP_SINGLE") return "1";
    if (tag == "MULTI_DAY_SINGLE_DEPOT") return "2";
    if (tag == "MULTI_DAY_DEPOT_PER_DAY") return "3";
    if (tag == "NOVEL") return "4";
    return tag;
}

int type_rank(const std::string& tag) {
    if (tag == "TSP_SINGLE") return 1;
    if (tag == "MULTI_DAY_SINGLE_DEPOT") return 2;
    if (tag == "MULTI_DAY_DEPOT_PER_DAY") return 3;
    if (tag == "NOVEL") return 4;
    return 5;
}

nlohmann::json optional_json(const std::optional<double>& value) {
    return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

std::optional<double> optional_from(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

}  // namespace

std::vector<SuiteTrial> load_suite(const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error("SUITE_FORMAT", std::string("suite file is not valid JSON: ") + e.what());
    }
    if (!doc.is_array() || doc.empty()) {
        throw Error("SUITE_FORMAT", "suite file must be a non-empty JSON array");
    }

    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    std::vector<SuiteTrial> trials;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const nlohmann::json& entry = doc[i];
        if (!entry.is_object()) {
            throw Error("SUITE_FORMAT", "suite entry " + std::to_string(i) + " is not an object");
        }
        SuiteTrial trial;
        if (!entry.contains("instance_path") || !entry["instance_path"].is_string()) {
            throw Error("SUITE_FORMAT",
                        "suite entry " + std::to_string(i) + " is missing instance_path");
        }
        trial.instance_path = resolve_against(base, entry["instance_path"].get<std::string>());
        if (entry.contains("request_text")) {
            trial.request_text = entry["request_text"].get<std::string>();
        } else if (entry.contains("request_path")) {
            trial.request_text =
                read_text_file(resolve_against(base, entry["request_path"].get<std::string>()));
        } else {
            throw Error("SUITE_FORMAT", "suite entry " + std::to_string(i) +
                                            " needs request_text or request_path");
        }
        if (!entry.contains("problem_type") || !entry["problem_type"].is_string()) {
            throw Error("SUITE_FORMAT",
                        "suite entry " + std::to_string(i) + " is missing problem_type");
        }
        trial.problem_type = entry["problem_type"].get<std::string>();
        if (entry.contains("cassette")) {
            trial.cassette = resolve_against(base, entry["cassette"].get<std::string>());
        }
        if (entry.contains("id")) {
            trial.id = entry["id"].get<std::string>();
        } else {
            trial.id = std::filesystem::path(trial.instance_path).stem().string() + "#" +
                       std::to_string(i);
        }
        trials.push_back(std::move(trial));
    }
    return trials;
}

std::string record_key(const TrialRecord& r) {
    return r.trial_id + "|" + to_tag(r.verification_mode) + "|" +
           (r.iteration_enabled ? "iter" : "noiter") + "|" + std::to_string(r.repeat);
}

std::vector<TrialRecord> run_suite(const std::vector<SuiteTrial>& trials,
                                   const PipelineConfig& base_config,
                                   const std::vector<AblationCell>& cells,
                                   const CaseLibrary& library, const RunOptions& options) {
    if (trials.empty()) throw Error("EMPTY_SUITE", "suite has no trials");
    if (cells.empty()) throw Error("EMPTY_SUITE", "no ablation cells requested");

    struct WorkItem {
        const SuiteTrial* trial;
        AblationCell cell;
        int repeat;
    };
    std::vector<WorkItem> items;
    for (const SuiteTrial& trial : trials) {
        for (const AblationCell& cell : cells) {
            for (int repeat = 0; repeat < std::max(1, options.trials_per_cell); ++repeat) {
                items.push_back({&trial, cell, repeat});
            }
        }
    }

    std::vector<std::optional<TrialRecord>> slots(items.size());
    std::atomic<std::size_t> next{0};
    std::mutex sink_mu;

    const auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= items.size()) return;
            const WorkItem& item = items[i];

            TrialRecord probe;
            probe.trial_id = item.trial->id;
            probe.verification_mode = item.cell.mode;
            probe.iteration_enabled = item.cell.iteration;
            probe.repeat = item.repeat;
            if (options.skip_keys.count(record_key(probe))) continue;

            TrialRecord record =
                run_one(*item.trial, base_config, item.cell, item.repeat, library);
            std::lock_guard<std::mutex> lock(sink_mu);
            if (options.on_record) options.on_record(record);
            slots[i] = std::move(record);
        }
    };

    const int parallelism = std::max(1, options.parallelism);
    if (parallelism == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(parallelism);
        for (int t = 0; t < parallelism; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    std::vector<TrialRecord> records;
    records.reserve(items.size());
    for (std::optional<TrialRecord>& slot : slots) {
        if (slot) records.push_back(std::move(*slot));
    }
    return records;
}

MetricsTable compute_metrics(const std::vector<TrialRecord>& records) {
    if (records.empty()) throw Error("EMPTY_RECORDS", "no trial records to aggregate");

    // Canonical order makes every floating-point sum independent of arrival
    // order.
    std::vector<const TrialRecord*> sorted;
    sorted.reserve(records.size());
    for (const TrialRecord& r : records) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](const TrialRecord* a, const TrialRecord* b) {
        const std::string ka = a->problem_type + "|" + record_key(*a);
        const std::string kb = b->problem_type + "|" + record_key(*b);
        return ka < kb;
    });

    struct Accumulator {
        int trials = 0;
        int feasible = 0;
        double sum_without = 0.0;
        int count_without = 0;
        double sum_with = 0.0;
        int count_with = 0;
        int refine_pool = 0;  // feasible, iteration on
        int refine_hits = 0;
    };
    std::map<std::string, Accumulator> by_type;

    MetricsTable table;
    table.total_trials = static_cast<int>(records.size());
    for (const TrialRecord* r : sorted) {
        Accumulator& acc = by_type[r->problem_type];
        acc.trials += 1;
        if (r->feasible) acc.feasible += 1;
        if (r->feasible && !r->iteration_enabled && r->first_feasible_cost) {
            acc.sum_without += *r->first_feasible_cost;
            acc.count_without += 1;
        }
        if (r->feasible && r->iteration_enabled && r->best_cost) {
            acc.sum_with += *r->best_cost;
            acc.count_with += 1;
        }
        if (r->feasible && r->iteration_enabled) {
            acc.refine_pool += 1;
            if (r->refinement_success) acc.refine_hits += 1;
        }
        if (r->feasible) table.feasible_count += 1;
    }
    table.feasibility_rate = 100.0 * table.feasible_count / table.total_trials;

    double rate_sum = 0.0;
    int rate_count = 0;
    int pooled_hits = 0;
    int pooled_pool = 0;
    for (const auto& [type, acc] : by_type) {
        TypeMetrics metrics;
        metrics.trials = acc.trials;
        metrics.feasible_trials = acc.feasible;
        if (acc.count_without > 0) {
            metrics.avg_cost_without_iteration = acc.sum_without / acc.count_without;
        }
        if (acc.count_with > 0) {
            metrics.avg_cost_with_iteration = acc.sum_with / acc.count_with;
        }
        if (metrics.avg_cost_without_iteration && metrics.avg_cost_with_iteration &&
            *metrics.avg_cost_without_iteration > 0.0) {
            metrics.avg_cost_reduction =
                100.0 * (*metrics.avg_cost_without_iteration - *metrics.avg_cost_with_iteration) /
                *metrics.avg_cost_without_iteration;
        }
        if (acc.refine_pool > 0) {
            metrics.refinement_success_rate = 100.0 * acc.refine_hits / acc.refine_pool;
            rate_sum += *metrics.refinement_success_rate;
            rate_count += 1;
            pooled_hits += acc.refine_hits;
            pooled_pool += acc.refine_pool;
        }
        table.per_type[type] = metrics;
    }
    if (rate_count > 0) table.pooled_success_unweighted = rate_sum / rate_count;
    if (pooled_pool > 0) table.pooled_success_weighted = 100.0 * pooled_hits / pooled_pool;
    return table;
}

std::string render_report(const MetricsTable& table) {
    std::ostringstream out;
    out << "Problem Type | Avg Cost Without Iteration | Avg Cost With Iteration"
        << " | Avg Cost Reduction | Refinement Success Rate\n";

    std::vector<std::pair<std::string, TypeMetrics>> rows(table.per_type.begin(),
                                                          table.per_type.end());
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        const int ra = type_rank(a.first);
        const int rb = type_rank(b.first);
        return ra != rb ? ra < rb : a.first < b.first;
    });
    for (const auto& [type, metrics] : rows) {
        out << type_display(type) << " | " << cell_text(metrics.avg_cost_without_iteration, false)
            << " | " << cell_text(metrics.avg_cost_with_iteration, false) << " | "
            << cell_text(metrics.avg_cost_reduction, true) << " | "
            << cell_text(metrics.refinement_success_rate, true) << "\n";
    }

    out << "\n";
    out << "Trials: " << table.total_trials << ", feasible: " << table.feasible_count << "/"
        << table.total_trials << " (" << trim_percent(table.feasibility_rate) << ")\n";
    out << "Refinement success rate, unweighted mean over types: "
        << cell_text(table.pooled_success_unweighted, true) << "\n";
    out << "Refinement success rate, weighted over trials: "
        << cell_text(table.pooled_success_weighted, true) << "\n";
    return out.str();
}

void to_json(nlohmann::json& j, const TrialRecord& r) {
    j = nlohmann::json{{"trial_id", r.trial_id},
                       {"instance_id", r.instance_id},
                       {"problem_type", r.problem_type},
                       {"verification_mode", to_tag(r.verification_mode)},
                       {"iteration_enabled", r.iteration_enabled},
                       {"repeat", r.repeat},
                       {"status", r.status},
                       {"feasible", r.feasible},
                       {"refinement_success", r.refinement_success},
                       {"first_feasible_cost", optional_json(r.first_feasible_cost)},
                       {"best_cost", optional_json(r.best_cost)},
                       {"gap", optional_json(r.gap)}};
}

void from_json(const nlohmann::json& j, TrialRecord& r) {
    r.trial_id = j.at("trial_id").get<std::string>();
    r.instance_id = j.at("instance_id").get<std::string>();
    r.problem_type = j.at("problem_type").get<std::string>();
    r.verification_mode = verification_mode_from_tag(j.at("verification_mode").get<std::string>());
    r.iteration_enabled = j.at("iteration_enabled").get<bool>();
    r.repeat = j.at("repeat").get<int>();
    r.status = j.at("status").get<std::string>();
    r.feasible = j.at("feasible").get<bool>();
    r.refinement_success = j.at("refinement_success").get<bool>();
    r.first_feasible_cost = optional_from(j, "first_feasible_cost");
    r.best_cost = optional_from(j, "best_cost");
    r.gap = optional_from(j, "gap");
}

void to_json(nlohmann::json& j, const TypeMetrics& m) {
    j = nlohmann::json{{"trials", m.trials},
                       {"feasible_trials", m.feasible_trials},
                       {"avg_cost_without_iteration", optional_json(m.avg_cost_without_iteration)},
                       {"avg_cost_with_iteration", optional_json(m.avg_cost_with_iteration)},
                       {"avg_cost_reduction", optional_json(m.avg_cost_reduction)},
                       {"refinement_success_rate", optional_json(m.refinement_success_rate)}};
}

void from_json(const nlohmann::json& j, TypeMetrics& m) {
    m.trials = j.at("trials").get<int>();
    m.feasible_trials = j.at("feasible_trials").get<int>();
    m.avg_cost_without_iteration = optional_from(j, "avg_cost_without_iteration");
    m.avg_cost_with_iteration = optional_from(j, "avg_cost_with_iteration");
    m.avg_cost_reduction = optional_from(j, "avg_cost_reduction");
    m.refinement_success_rate = optional_from(j, "refinement_success_rate");
}

void to_json(nlohmann::json& j, const MetricsTable& t) {
    nlohmann::json per_type = nlohmann::json::object();
    for (const auto& [type, metrics] : t.per_type) {
        nlohmann::json m;
        to_json(m, metrics);
        per_type[type] = std::move(m);
    }
    j = nlohmann::json{{"per_type", std::move(per_type)},
                       {"total_trials", t.total_trials},
                       {"feasible_count", t.feasible_count},
                       {"feasibility_rate", t.feasibility_rate},
                       {"pooled_success_unweighted", optional_json(t.pooled_success_unweighted)},
                       {"pooled_success_weighted", optional_json(t.pooled_success_weighted)}};
}

void from_json(const nlohmann::json& j, MetricsTable& t) {
    t.per_type.clear();
    for (const auto& [type, value] : j.at("per_type").items()) {
        TypeMetrics metrics;
        from_json(value, metrics);
        t.per_type[type] = metrics;
    }
    t.total_trials = j.at("total_trials").get<int>();
    t.feasible_count = j.at("feasible_count").get<int>();
    t.feasibility_rate = j.at("feasibility_rate").get<double>();
    t.pooled_success_unweighted = optional_from(j, "pooled_success_unweighted");
    t.pooled_success_weighted = optional_from(j, "pooled_success_weighted");
}

}  // namespace routeforge
