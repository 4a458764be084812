#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gecmetrics/core.hpp"

namespace gecmetrics {

class PerplexityProvider {
 public:
  virtual ~PerplexityProvider() = default;
  virtual double perplexity(const std::string& sentence) = 0;
};

// Lookup table loaded from a TSV of "sentence<TAB>perplexity" lines.
// Unknown sentences raise an Error naming the sentence.
class TablePerplexity : public PerplexityProvider {
 public:
  explicit TablePerplexity(std::map<std::string, double> table)
      : table_(std::move(table)) {}
  double perplexity(const std::string& sentence) override;

 private:
  std::map<std::string, double> table_;
};

TablePerplexity load_perplexity_table(const std::string& path);

// POSTs {"sentence": ...} to the endpoint and reads {"perplexity": ...}.
class HttpPerplexity : public PerplexityProvider {
 public:
  explicit HttpPerplexity(std::string endpoint, int timeout_seconds = 30)
      : endpoint_(std::move(endpoint)), timeout_seconds_(timeout_seconds) {}
  double perplexity(const std::string& sentence) override;

 private:
  std::string endpoint_;
  int timeout_seconds_;
};

// 1 - char_edit_distance / max(|a|, |b|); 1.0 when both strings are empty.
double levenshtein_ratio(const std::string& a, const std::string& b);

// levenshtein_ratio after sorting each side's tokens lexicographically.
double token_sort_ratio(const TokenSeq& a, const TokenSeq& b);

// Per sentence: 0 when the hypothesis is unchanged, -1 when perplexity did
// not improve, otherwise +1 iff max(levenshtein_ratio, token_sort_ratio)
// reaches the threshold. Equal perplexity counts as no improvement. The
// corpus score is the SUM of sentence scores.
MetricResult scribendi(const std::vector<TokenSeq>& sources,
                       const std::vector<TokenSeq>& hyps,
                       PerplexityProvider& ppl,
                       double threshold = 0.8);

// Scores produced outside this toolkit, keyed by (system, sentence index).
// Completeness is checked lazily: a missing pair raises only when queried.
class ExternalScoreTable {
 public:
  ExternalScoreTable() = default;
  ExternalScoreTable(std::map<std::pair<std::string, std::size_t>, double> scores,
                     std::size_t duplicate_count)
      : scores_(std::move(scores)), duplicates_(duplicate_count) {}

  double score(const std::string& system, std::size_t sentence_index) const;
  bool has(const std::string& system, std::size_t sentence_index) const;
  // Aligned score list for one system; missing pairs raise.
  std::vector<double> scores_for(const std::string& system, std::size_t n_sentences) const;
  std::size_t duplicate_count() const { return duplicates_; }
  std::size_t size() const { return scores_.size(); }

 private:
  std::map<std::pair<std::string, std::size_t>, double> scores_;
  std::size_t duplicates_ = 0;
};

// TSV "system<TAB>sentence_index<TAB>score"; duplicate keys keep the last
// value and increment the table's duplicate counter.
ExternalScoreTable load_external_scores(const std::string& path);

enum class LlmMode { kSentence, kEdit };

struct LlmJudgeConfig {
  std::string endpoint;
  std::string model;
  std::string api_key_env;  // name of the env var holding the key, may be empty
  LlmMode mode = LlmMode::kSentence;
  int timeout_seconds = 30;
  int retries = 2;  // attempts after the first failure
};

// Up to 5 unique hypotheses per source are judged in one request.
inline constexpr std::size_t kLlmMaxTargets = 5;

// The instruction block of the judging prompt, ready for the source and
// target list to be appended.
std::string llm_prompt(const std::string& source, const std::vector<std::string>& targets);

// Renders a hypothesis as its edit sequence against the source:
// "[span -> replacement]" entries joined by "; ", or "no edits".
std::string render_edit_sequence(const TokenSeq& source, const TokenSeq& hyp);

// 5-point LLM judging of each source's most frequent unique hypotheses.
// Sentence scores for systems whose hypothesis was not selected stay NaN
// (the missing marker); each system's corpus score is the mean of its
// available sentence scores.
std::map<std::string, MetricResult> llm_judge(
    const std::vector<TokenSeq>& sources,
    const std::map<std::string, std::vector<TokenSeq>>& hyps_per_system,
    const LlmJudgeConfig& cfg);

}  // namespace gecmetrics
