#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gecmetrics/config.hpp"
#include "gecmetrics/core.hpp"
#include "gecmetrics/dataset.hpp"
#include "gecmetrics/edit_metrics.hpp"
#include "gecmetrics/ngram_metrics.hpp"
#include "gecmetrics/sentence_metrics.hpp"

namespace gecmetrics::cli {

using nlohmann::json;

inline std::vector<TokenSeq> read_token_file(const std::string& path) {
  std::vector<TokenSeq> sentences;
  for (const auto& line : read_lines(path)) sentences.push_back(TokenSeq(tokenize(line)));
  return sentences;
}

inline void require_aligned(const std::string& path, std::size_t got,
                            const std::string& src_path, std::size_t expected) {
  if (got != expected)
    throw Error(path + " has " + std::to_string(got) + " lines, expected " +
                std::to_string(expected) + " (from " + src_path + ")");
}

// NaN serializes as null; callers treat null as "unscored".
inline json score_or_null(double value) {
  if (std::isnan(value)) return nullptr;
  return value;
}

inline json config_json(const EvalConfig& c) {
  json j;
  j["metric"] = c.metric;
  j["beta"] = c.beta;
  j["n_max"] = c.n_max;
  j["iterations"] = c.iterations;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["threshold"] = c.threshold;
  j["higher_is_better"] = c.higher_is_better;
  j["weight_file"] = c.weight_file;
  j["score_file"] = c.score_file;
  j["system"] = c.system;
  j["ppl_file"] = c.ppl_file;
  j["ppl_endpoint"] = c.ppl_endpoint;
  j["green_ref_mode"] = c.green_ref_mode;
  j["metric_ties_in_denominator"] = c.metric_ties_in_denominator;
  j["trueskill_passes"] = c.trueskill_passes;
  j["llm"] = {{"endpoint", c.llm.endpoint},
              {"model", c.llm.model},
              {"api_key_env", c.llm.api_key_env},
              {"timeout_seconds", c.llm.timeout_seconds},
              {"retries", c.llm.retries}};
  return j;
}

// Scores every system with the configured metric. `systems` keeps the
// caller's order; joint metrics (gotoscorer difficulty, LLM judging,
// external tables) see all systems at once.
inline std::vector<MetricResult> score_systems(
    const std::vector<TokenSeq>& sources,
    const std::vector<std::vector<TokenSeq>>& refs,
    const std::vector<std::pair<std::string, const std::vector<TokenSeq>*>>& systems,
    const EvalConfig& config) {
  const std::string& metric = config.metric;
  const bool reference_based = metric == "errant" || metric == "pt-errant" ||
                               metric == "gotoscorer" || metric == "gleu" ||
                               metric == "green";
  if (reference_based && refs.empty())
    throw Error("metric '" + metric + "' requires references");

  std::vector<MetricResult> results;
  if (metric == "errant") {
    const UniformWeights weights(1.0);
    for (const auto& [name, hyps] : systems)
      results.push_back(score_edit_level(sources, *hyps, refs, config.beta, weights));
  } else if (metric == "pt-errant") {
    if (config.weight_file.empty())
      throw ConfigError("metric 'pt-errant' requires weight_file");
    const TableWeights weights = load_edit_weights(config.weight_file);
    for (const auto& [name, hyps] : systems)
      results.push_back(score_edit_level(sources, *hyps, refs, config.beta, weights));
  } else if (metric == "gotoscorer") {
    std::vector<std::vector<TokenSeq>> pool;
    for (const auto& [name, hyps] : systems) pool.push_back(*hyps);
    const DifficultyTable table = gotoscorer_difficulty(sources, refs[0], pool);
    for (const auto& [name, hyps] : systems)
      results.push_back(
          score_gotoscorer(sources, *hyps, refs[0], table, config.beta).to_metric_result());
  } else if (metric == "gleu") {
    const GleuOptions options{.n_max = config.n_max,
                              .iterations = config.iterations,
                              .seed = config.seed,
                              .threads = config.threads};
    for (const auto& [name, hyps] : systems)
      results.push_back(gleu(sources, *hyps, refs, options));
  } else if (metric == "green") {
    const GreenOptions options{.n_max = config.n_max,
                               .beta = config.beta,
                               .ref_mode = config.green_ref_mode == "average"
                                               ? GreenRefMode::kAverage
                                               : GreenRefMode::kBestReference};
    for (const auto& [name, hyps] : systems)
      results.push_back(green(sources, *hyps, refs, options));
  } else if (metric == "scribendi") {
    if (config.ppl_file.empty() && config.ppl_endpoint.empty())
      throw ConfigError("metric 'scribendi' requires ppl_file or ppl_endpoint");
    if (!config.ppl_file.empty()) {
      TablePerplexity ppl = load_perplexity_table(config.ppl_file);
      for (const auto& [name, hyps] : systems)
        results.push_back(scribendi(sources, *hyps, ppl, config.threshold));
    } else {
      HttpPerplexity ppl(config.ppl_endpoint);
      for (const auto& [name, hyps] : systems)
        results.push_back(scribendi(sources, *hyps, ppl, config.threshold));
    }
  } else if (metric == "llm-s" || metric == "llm-e") {
    if (config.llm.endpoint.empty() || config.llm.model.empty())
      throw ConfigError("metric '" + metric + "' requires llm.endpoint and llm.model");
    LlmJudgeConfig judge;
    judge.endpoint = config.llm.endpoint;
    judge.model = config.llm.model;
    judge.api_key_env = config.llm.api_key_env;
    judge.mode = metric == "llm-e" ? LlmMode::kEdit : LlmMode::kSentence;
    judge.timeout_seconds = config.llm.timeout_seconds;
    judge.retries = config.llm.retries;
    std::map<std::string, std::vector<TokenSeq>> by_name;
    for (const auto& [name, hyps] : systems) by_name[name] = *hyps;
    auto judged = llm_judge(sources, by_name, judge);
    for (const auto& [name, hyps] : systems) results.push_back(std::move(judged.at(name)));
  } else if (metric == "external") {
    if (config.score_file.empty())
      throw ConfigError("metric 'external' requires score_file");
    const ExternalScoreTable table = load_external_scores(config.score_file);
    for (const auto& [name, hyps] : systems) {
      const std::string lookup =
          (systems.size() == 1 && !config.system.empty()) ? config.system : name;
      MetricResult result;
      result.sentence_scores = table.scores_for(lookup, sources.size());
      double sum = 0.0;
      std::size_t count = 0;
      for (double s : result.sentence_scores)
        if (!std::isnan(s)) {
          sum += s;
          ++count;
        }
      result.corpus_score =
          count > 0 ? sum / static_cast<double>(count) : std::nan("");
      results.push_back(std::move(result));
    }
  } else {
    throw ConfigError("unknown metric '" + metric + "'");
  }
  return results;
}

inline void write_output(const std::string& out, const std::string& text) {
  if (out == "-" || out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(out);
  if (!file) throw Error("cannot write output file: " + out);
  file << text;
}

// ConfigError means the invocation was wrong (exit 2); everything else is
// a data or runtime problem (exit 1).
template <typename Body>
int run_cli(Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gecmetrics::cli
