#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "routeforge/config.hpp"
#include "routeforge/error.hpp"
#include "routeforge/eval.hpp"
#include "routeforge/oracle.hpp"
#include "routeforge/pipeline.hpp"
#include "routeforge/svg.hpp"

namespace {

using namespace routeforge;

constexpr int kExitSolved = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitFormulation = 3;

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("IO_ERROR", "cannot write '" + path.string() + "'");
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("IO_ERROR", "cannot read '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// A request argument may be a file path or the literal text itself.
std::string resolve_request(const std::string& request) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(request, ec)) return read_file(request);
    return request;
}

struct SharedFlags {
    std::string config_path;
    std::string backend_kind;
    std::string cassette;
    std::string endpoint;
    std::string model_name;
    std::string api_key_env;
    double temperature = 0.0;
    int timeout_ms = 0;
    int max_retries = 0;
    int iters = 0;
    int refine_rounds = 0;
    std::string verify_mode;
    bool force_a = false;
    bool force_b = false;
    std::string library_path;
    std::string out_dir = ".";
};

void register_shared(CLI::App& app, SharedFlags& flags) {
    app.add_option("--config", flags.config_path,
                   "Config file path (default: $ROUTEFORGE_CONFIG when set)");
    app.add_option("--backend", flags.backend_kind, "Backend kind: HTTP_CHAT, SCRIPTED, REPLAY");
    app.add_option("--cassette", flags.cassette, "Cassette file for the REPLAY backend");
    app.add_option("--endpoint", flags.endpoint, "Chat endpoint URL for HTTP_CHAT");
    app.add_option("--model", flags.model_name, "Model name sent to the endpoint");
    app.add_option("--api-key-env", flags.api_key_env,
                   "Name of the environment variable holding the API key");
    app.add_option("--temperature", flags.temperature, "Sampling temperature for solve prompts");
    app.add_option("--timeout-ms", flags.timeout_ms, "HTTP timeout in milliseconds");
    app.add_option("--max-retries", flags.max_retries, "Transport retry budget");
    app.add_option("--iters", flags.iters, "Feasibility iteration budget");
    app.add_option("--refine-rounds", flags.refine_rounds, "Refinement round budget");
    app.add_option("--verify-mode", flags.verify_mode, "EXTERNAL, SELF, or NONE");
    app.add_flag("--force-a", flags.force_a, "Force the library pathway");
    app.add_flag("--force-b", flags.force_b, "Force the self-formulation pathway");
    app.add_option("--library", flags.library_path, "Case library file (default: built-in)");
    app.add_option("--out", flags.out_dir, "Output directory for artifacts");
}

// Precedence: flags > environment > config file > defaults.
PipelineConfig effective_config(const CLI::App& app, const SharedFlags& flags) {
    PipelineConfig config;

    std::string config_path = flags.config_path;
    if (config_path.empty()) config_path = config_path_from_env();
    if (!config_path.empty()) apply_config_entries(parse_config_file(config_path), config);

    if (app.count("--backend")) config.backend.kind = backend_kind_from_tag(flags.backend_kind);
    if (app.count("--cassette")) config.backend.cassette_path = flags.cassette;
    if (app.count("--endpoint")) config.backend.endpoint = flags.endpoint;
    if (app.count("--model")) config.backend.model_name = flags.model_name;
    if (app.count("--api-key-env")) config.backend.api_key_env = flags.api_key_env;
    if (app.count("--temperature")) config.backend.temperature = flags.temperature;
    if (app.count("--timeout-ms")) config.backend.timeout_ms = flags.timeout_ms;
    if (app.count("--max-retries")) config.backend.max_retries = flags.max_retries;
    if (app.count("--iters")) config.max_feasibility_iters = flags.iters;
    if (app.count("--refine-rounds")) config.max_refine_rounds = flags.refine_rounds;
    if (app.count("--verify-mode")) {
        config.verification_mode = verification_mode_from_tag(flags.verify_mode);
    }
    if (flags.force_a && flags.force_b) {
        throw Error("CONFIG_ERROR", "--force-a and --force-b are mutually exclusive");
    }
    if (flags.force_a) config.pathway_override = PathwayOverride::ForceA;
    if (flags.force_b) config.pathway_override = PathwayOverride::ForceB;
    return config;
}

CaseLibrary load_library(const SharedFlags& flags) {
    if (!flags.library_path.empty()) return CaseLibrary::load(flags.library_path);
    return CaseLibrary::builtin();
}

int run_solve(const CLI::App& app, const SharedFlags& flags, const std::string& instance_path,
              const std::string& request_arg, bool svg) {
    const PipelineConfig config = effective_config(app, flags);
    const ProblemInstance instance = load_instance(instance_path);
    const std::string request = resolve_request(request_arg);
    const CaseLibrary library = load_library(flags);

    const PipelineResult result = solve_request(request, instance, library, config);

    const std::filesystem::path out_dir(flags.out_dir);
    std::filesystem::create_directories(out_dir);

    nlohmann::json solution_doc{{"status", to_tag(result.status)}};
    if (result.solution) {
        nlohmann::json s;
        to_json(s, *result.solution);
        solution_doc["solution"] = std::move(s);
    } else {
        solution_doc["solution"] = nullptr;
    }
    solution_doc["cost"] = result.cost ? nlohmann::json(*result.cost) : nlohmann::json(nullptr);
    write_file(out_dir / "solution.json", solution_doc.dump(2) + "\n");

    nlohmann::json trace_doc;
    to_json(trace_doc, result.trace);
    write_file(out_dir / "trace.json", trace_doc.dump(2) + "\n");

    if (result.solution) {
        std::cout << format_route_lines_with_cost(*result.solution, *result.cost) << "\n";
        if (svg) write_file(out_dir / "route.svg", render_svg(*result.solution, instance));
    } else {
        std::cout << to_tag(result.status) << ": " << result.trace.failure_reason << "\n";
    }

    switch (result.status) {
        case PipelineStatus::Solved: return kExitSolved;
        case PipelineStatus::InfeasibleAfterBudget: return kExitInfeasible;
        case PipelineStatus::FormulationFailed: return kExitFormulation;
    }
    return kExitUsage;
}

int run_evaluate(const CLI::App& app, const SharedFlags& flags, const std::string& suite_path,
                 bool no_verify, bool no_iterate, int trials_per_cell, int parallelism) {
    PipelineConfig config = effective_config(app, flags);
    const CaseLibrary library = load_library(flags);
    const std::vector<SuiteTrial> trials = load_suite(suite_path);

    VerificationMode mode = config.verification_mode;
    if (no_verify) mode = VerificationMode::None;
    std::vector<AblationCell> cells;
    if (!no_iterate) cells.push_back({mode, true});
    cells.push_back({mode, false});

    const std::filesystem::path out_dir(flags.out_dir);
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path records_path = out_dir / "records.jsonl";

    // Records persist as they land; an interrupted run resumes by skipping
    // the keys already on disk.
    std::vector<TrialRecord> records;
    RunOptions options;
    options.trials_per_cell = trials_per_cell;
    options.parallelism = parallelism;
    if (std::filesystem::exists(records_path)) {
        std::ifstream in(records_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            TrialRecord record;
            from_json(nlohmann::json::parse(line), record);
            options.skip_keys.insert(record_key(record));
            records.push_back(std::move(record));
        }
    }
    std::ofstream sink(records_path, std::ios::app);
    if (!sink) throw Error("IO_ERROR", "cannot write '" + records_path.string() + "'");
    options.on_record = [&sink](const TrialRecord& record) {
        nlohmann::json j;
        to_json(j, record);
        sink << j.dump() << "\n";
        sink.flush();
    };

    std::vector<TrialRecord> fresh = run_suite(trials, config, cells, library, options);
    records.insert(records.end(), std::make_move_iterator(fresh.begin()),
                   std::make_move_iterator(fresh.end()));

    const MetricsTable table = compute_metrics(records);
    nlohmann::json metrics_doc;
    to_json(metrics_doc, table);
    write_file(out_dir / "metrics.json", metrics_doc.dump(2) + "\n");
    const std::string report = render_report(table);
    write_file(out_dir / "report.txt", report);
    std::cout << report;
    return kExitSolved;
}

int run_oracle(const CLI::App& app, const SharedFlags& flags, const std::string& instance_path,
               const std::string& method) {
    (void)app;
    const ProblemInstance instance = load_instance(instance_path);

    CostBound bound;
    if (method == "brute") {
        bound = brute_force_optimal(instance);
    } else if (method == "heldkarp") {
        bound = held_karp_optimal(instance);
    } else if (method == "heuristic") {
        bound = nearest_neighbor_then_two_opt(instance);
    } else {
        throw Error("CONFIG_ERROR", "unknown oracle method '" + method + "'");
    }

    const std::filesystem::path out_dir(flags.out_dir);
    std::filesystem::create_directories(out_dir);
    nlohmann::json doc;
    to_json(doc, bound);
    write_file(out_dir / "oracle.json", doc.dump(2) + "\n");

    std::cout << format_route_lines_with_cost(bound.solution, bound.cost) << "\n";
    return kExitSolved;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Natural-language route planning: solve requests, run suites, query oracles"};
    app.require_subcommand(1);
    app.fallthrough(true);

    SharedFlags flags;
    register_shared(app, flags);

    std::string instance_path;
    std::string request_arg;
    bool svg = false;
    CLI::App* solve = app.add_subcommand("solve", "Solve one natural-language request");
    solve->add_option("--instance", instance_path, "Instance JSON file")->required();
    solve->add_option("--request", request_arg, "Request text or a file containing it")
        ->required();
    solve->add_flag("--svg", svg, "Also write route.svg");

    std::string suite_path;
    bool no_verify = false;
    bool no_iterate = false;
    int trials_per_cell = 1;
    int parallelism = 1;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Run a trial suite and report metrics");
    evaluate->add_option("--suite", suite_path, "Suite JSON file")->required();
    evaluate->add_flag("--no-verify", no_verify, "Disable all verification (ablation)");
    evaluate->add_flag("--no-iterate", no_iterate, "Skip the iteration-on ablation cell");
    evaluate->add_option("--trials", trials_per_cell, "Repeats per trial and cell");
    evaluate->add_option("--parallel", parallelism, "Concurrent trials");

    std::string oracle_instance;
    std::string method = "brute";
    CLI::App* oracle = app.add_subcommand("oracle", "Compute a reference cost bound");
    oracle->add_option("--instance", oracle_instance, "Instance JSON file")->required();
    oracle->add_option("--method", method, "brute, heldkarp, or heuristic");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (solve->parsed()) return run_solve(app, flags, instance_path, request_arg, svg);
        if (evaluate->parsed()) {
            return run_evaluate(app, flags, suite_path, no_verify, no_iterate, trials_per_cell,
                                parallelism);
        }
        if (oracle->parsed()) return run_oracle(app, flags, oracle_instance, method);
    } catch (const routeforge::Error& error) {
        std::cerr << error.what() << "\n";
        if (std::string(error.code()) == "INSTANCE_TOO_LARGE") return kExitInfeasible;
        return kExitUsage;
    } catch (const std::exception& error) {
        std::cerr << error.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
