#pragma once

#include <map>
#include <string>

#include "routeforge/pipeline.hpp"

namespace routeforge {

// Flat key/value config file: "key = value" lines, # comments, optional
// quotes around values. Throws Error(CONFIG_ERROR) naming the line.
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Applies recognized keys onto a PipelineConfig. Unknown keys are rejected
// so typos fail loudly.
void apply_config_entries(const std::map<std::string, std::string>& entries,
                          PipelineConfig& config);

// Config file named by ROUTEFORGE_CONFIG, when set and non-empty.
std::string config_path_from_env();

}  // namespace routeforge
