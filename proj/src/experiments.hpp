#pragma once

#include <map>
#include <string>
#include <vector>

#include "report.hpp"

namespace wl {

constexpr const char* kVersion = "1.0.0";

struct ExperimentConfig {
  std::string name;
  std::map<std::string, std::string> params;  // g, p, l, k, l0, N, seed, budget, ...
  std::string out;                            // base path for emitted files; empty = none
  std::string format;                         // csv, json or both; empty means json
};

std::vector<std::string> experiment_names();
// Parameters accepted by an experiment, with their defaults.
std::map<std::string, std::string> experiment_defaults(const std::string& name);

// "key = value" per line, '#' starts a comment. The keys experiment, out and
// format fill the matching fields; everything else goes to params.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
// Later values win: set fields and params of `over` replace those of `base`.
ExperimentConfig merge_config(ExperimentConfig base, const ExperimentConfig& over);

// Checks the name and every parameter before any computation.
void validate_config(const ExperimentConfig& cfg);

ExperimentReport run_experiment(const ExperimentConfig& cfg);

// 0 when every verdict passes, 2 on any failure, 3 when only resource limits were hit.
int exit_code(const ExperimentReport& r);

}  // namespace wl
