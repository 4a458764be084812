#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gecmetrics {

struct LlmSettings {
  std::string endpoint;
  std::string model;
  std::string api_key_env = "GECMETRICS_API_KEY";
  int timeout_seconds = 30;
  int retries = 2;

  bool operator==(const LlmSettings&) const = default;
};

// Flat bag of every tunable the metrics accept. Each metric reads the
// subset it understands; everything, defaults included, is echoed back into
// the output metadata so a run is reproducible from its own JSON.
struct EvalConfig {
  std::string metric = "errant";
  double beta = 0.5;
  int n_max = 4;
  int iterations = 500;
  std::uint64_t seed = 0;
  int threads = 1;
  double threshold = 0.8;
  bool higher_is_better = true;
  std::string weight_file;
  std::string score_file;
  std::string system;
  std::string ppl_file;
  std::string ppl_endpoint;
  std::string green_ref_mode = "best";  // "best" or "average"
  bool metric_ties_in_denominator = true;
  int trueskill_passes = 10;
  LlmSettings llm;

  bool operator==(const EvalConfig&) const = default;
};

const std::vector<std::string>& valid_metric_ids();

// Parses YAML text; unknown keys are rejected with a ConfigError. An empty
// document yields the defaults.
EvalConfig parse_config(const std::string& yaml_text);
EvalConfig load_config(const std::string& path);

// Full YAML rendering (every field present); parse(to_yaml(c)) == c.
std::string to_yaml(const EvalConfig& config);

// Range and enum checks beyond parsing; ConfigError on violation.
void validate_config(const EvalConfig& config);

}  // namespace gecmetrics
