#include "gecmetrics/config.hpp"

#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "gecmetrics/core.hpp"

namespace gecmetrics {

namespace {

template <typename T>
T read_scalar(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("bad value for config key '" + key + "'");
  }
}

LlmSettings parse_llm(const YAML::Node& node) {
  if (!node.IsMap()) throw ConfigError("config key 'llm' must be a mapping");
  LlmSettings llm;
  for (const auto& entry : node) {
    const std::string key = entry.first.as<std::string>();
    const YAML::Node& value = entry.second;
    if (key == "endpoint")
      llm.endpoint = read_scalar<std::string>(value, "llm.endpoint");
    else if (key == "model")
      llm.model = read_scalar<std::string>(value, "llm.model");
    else if (key == "api_key_env")
      llm.api_key_env = read_scalar<std::string>(value, "llm.api_key_env");
    else if (key == "timeout_seconds")
      llm.timeout_seconds = read_scalar<int>(value, "llm.timeout_seconds");
    else if (key == "retries")
      llm.retries = read_scalar<int>(value, "llm.retries");
    else
      throw ConfigError("unknown config key 'llm." + key + "'");
  }
  return llm;
}

}  // namespace

const std::vector<std::string>& valid_metric_ids() {
  static const std::vector<std::string> ids{
      "errant",    "pt-errant", "gotoscorer", "gleu",  "green",
      "scribendi", "llm-s",     "llm-e",      "external"};
  return ids;
}

EvalConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  EvalConfig config;
  if (root.IsNull() || !root.IsDefined()) return config;
  if (!root.IsMap()) throw ConfigError("config root must be a mapping");

  for (const auto& entry : root) {
    const std::string key = entry.first.as<std::string>();
    const YAML::Node& value = entry.second;
    if (key == "metric")
      config.metric = read_scalar<std::string>(value, key);
    else if (key == "beta")
      config.beta = read_scalar<double>(value, key);
    else if (key == "n_max")
      config.n_max = read_scalar<int>(value, key);
    else if (key == "iterations")
      config.iterations = read_scalar<int>(value, key);
    else if (key == "seed")
      config.seed = read_scalar<std::uint64_t>(value, key);
    else if (key == "threads")
      config.threads = read_scalar<int>(value, key);
    else if (key == "threshold")
      config.threshold = read_scalar<double>(value, key);
    else if (key == "higher_is_better")
      config.higher_is_better = read_scalar<bool>(value, key);
    else if (key == "weight_file")
      config.weight_file = read_scalar<std::string>(value, key);
    else if (key == "score_file")
      config.score_file = read_scalar<std::string>(value, key);
    else if (key == "system")
      config.system = read_scalar<std::string>(value, key);
    else if (key == "ppl_file")
      config.ppl_file = read_scalar<std::string>(value, key);
    else if (key == "ppl_endpoint")
      config.ppl_endpoint = read_scalar<std::string>(value, key);
    else if (key == "green_ref_mode")
      config.green_ref_mode = read_scalar<std::string>(value, key);
    else if (key == "metric_ties_in_denominator")
      config.metric_ties_in_denominator = read_scalar<bool>(value, key);
    else if (key == "trueskill_passes")
      config.trueskill_passes = read_scalar<int>(value, key);
    else if (key == "llm")
      config.llm = parse_llm(value);
    else
      throw ConfigError("unknown config key '" + key + "'");
  }
  return config;
}

EvalConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string to_yaml(const EvalConfig& config) {
  YAML::Node root;
  root["metric"] = config.metric;
  root["beta"] = config.beta;
  root["n_max"] = config.n_max;
  root["iterations"] = config.iterations;
  root["seed"] = config.seed;
  root["threads"] = config.threads;
  root["threshold"] = config.threshold;
  root["higher_is_better"] = config.higher_is_better;
  root["weight_file"] = config.weight_file;
  root["score_file"] = config.score_file;
  root["system"] = config.system;
  root["ppl_file"] = config.ppl_file;
  root["ppl_endpoint"] = config.ppl_endpoint;
  root["green_ref_mode"] = config.green_ref_mode;
  root["metric_ties_in_denominator"] = config.metric_ties_in_denominator;
  root["trueskill_passes"] = config.trueskill_passes;
  root["llm"]["endpoint"] = config.llm.endpoint;
  root["llm"]["model"] = config.llm.model;
  root["llm"]["api_key_env"] = config.llm.api_key_env;
  root["llm"]["timeout_seconds"] = config.llm.timeout_seconds;
  root["llm"]["retries"] = config.llm.retries;
  return YAML::Dump(root) + "\n";
}

void validate_config(const EvalConfig& config) {
  const auto& ids = valid_metric_ids();
  bool known = false;
  for (const auto& id : ids) known = known || id == config.metric;
  if (!known) {
    std::string message = "unknown metric '" + config.metric + "'; valid ids:";
    for (const auto& id : ids) message += " " + id;
    throw ConfigError(message);
  }
  if (config.beta <= 0.0) throw ConfigError("beta must be positive");
  if (config.n_max < 1) throw ConfigError("n_max must be at least 1");
  if (config.iterations < 1) throw ConfigError("iterations must be at least 1");
  if (config.threads < 1) throw ConfigError("threads must be at least 1");
  if (config.green_ref_mode != "best" && config.green_ref_mode != "average")
    throw ConfigError("green_ref_mode must be 'best' or 'average'");
  if (config.trueskill_passes < 1)
    throw ConfigError("trueskill_passes must be at least 1");
  if (config.llm.timeout_seconds < 1)
    throw ConfigError("llm.timeout_seconds must be at least 1");
  if (config.llm.retries < 0) throw ConfigError("llm.retries must be non-negative");
}

}  // namespace gecmetrics
