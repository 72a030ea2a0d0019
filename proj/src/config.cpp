#include "routeforge/config.hpp"

#include <cstdlib>
#include <fstream>

#include "routeforge/error.hpp"

namespace routeforge {

namespace {

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

std::string unquote(const std::string& value) {
    if (value.size() >= 2 && ((value.front() == '"' && value.back() == '"') ||
                              (value.front() == '\'' && value.back() == '\''))) {
        return value.substr(1, value.size() - 2);
    }
    return value;
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const int parsed = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw Error("CONFIG_ERROR", "key '" + key + "' needs an integer, got '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double parsed = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw Error("CONFIG_ERROR", "key '" + key + "' needs a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw Error("CONFIG_ERROR", "key '" + key + "' needs true or false, got '" + value + "'");
}

}  // namespace

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("IO_ERROR", "cannot read config file '" + path + "'");

    std::map<std::string, std::string> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error("CONFIG_ERROR", path + ":" + std::to_string(line_no) +
                                            ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = unquote(trim(line.substr(eq + 1)));
        if (key.empty()) {
            throw Error("CONFIG_ERROR",
                        path + ":" + std::to_string(line_no) + ": empty key");
        }
        entries[key] = value;
    }
    return entries;
}

void apply_config_entries(const std::map<std::string, std::string>& entries,
                          PipelineConfig& config) {
    for (const auto& [key, value] : entries) {
        if (key == "max_feasibility_iters") {
            config.max_feasibility_iters = parse_int(key, value);
        } else if (key == "max_refine_rounds") {
            config.max_refine_rounds = parse_int(key, value);
        } else if (key == "verification_mode") {
            config.verification_mode = verification_mode_from_tag(value);
        } else if (key == "pathway_override") {
            if (value == "NONE") {
                config.pathway_override = PathwayOverride::None;
            } else if (value == "FORCE_A") {
                config.pathway_override = PathwayOverride::ForceA;
            } else if (value == "FORCE_B") {
                config.pathway_override = PathwayOverride::ForceB;
            } else {
                throw Error("CONFIG_ERROR", "unknown pathway_override '" + value + "'");
            }
        } else if (key == "refinement_enabled") {
            config.refinement_enabled = parse_bool(key, value);
        } else if (key == "refine_history_cap") {
            config.refine_history_cap = parse_int(key, value);
        } else if (key == "cost_mismatch_warn_ratio") {
            config.cost_mismatch_warn_ratio = parse_double(key, value);
        } else if (key == "backend") {
            config.backend.kind = backend_kind_from_tag(value);
        } else if (key == "endpoint") {
            config.backend.endpoint = value;
        } else if (key == "model_name") {
            config.backend.model_name = value;
        } else if (key == "api_key_env") {
            config.backend.api_key_env = value;
        } else if (key == "temperature") {
            config.backend.temperature = parse_double(key, value);
        } else if (key == "timeout_ms") {
            config.backend.timeout_ms = parse_int(key, value);
        } else if (key == "max_retries") {
            config.backend.max_retries = parse_int(key, value);
        } else if (key == "retry_backoff_ms") {
            config.backend.retry_backoff_ms = parse_int(key, value);
        } else if (key == "cassette") {
            config.backend.cassette_path = value;
        } else {
            throw Error("CONFIG_ERROR", "unknown config key '" + key + "'");
        }
    }
}

std::string config_path_from_env() {
    const char* path = std::getenv("ROUTEFORGE_CONFIG");
    return path ? std::string(path) : std::string();
}

}  // namespace routeforge
