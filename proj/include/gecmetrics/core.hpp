#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gecmetrics {

inline constexpr const char* kVersion = "0.1.0";

// Data or file-format problem (bad input, malformed line, layout violation).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed file content; carries "file:line" context in the message.
struct ParseError : Error {
  using Error::Error;
};

// Invalid configuration (unknown key, bad value, unknown metric id).
struct ConfigError : Error {
  using Error::Error;
};

// API misuse (violated precondition).
struct UsageError : std::logic_error {
  using std::logic_error::logic_error;
};

// A tokenized sentence. Tokens are non-empty unicode strings; joining with
// single spaces and re-splitting on whitespace round-trips.
class TokenSeq {
 public:
  TokenSeq() = default;
  explicit TokenSeq(std::vector<std::string> tokens);

  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& operator[](std::size_t i) const { return tokens_[i]; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }

  // Tokens joined by single spaces.
  std::string join() const;

  friend bool operator==(const TokenSeq& a, const TokenSeq& b) {
    return a.tokens_ == b.tokens_;
  }
  friend bool operator!=(const TokenSeq& a, const TokenSeq& b) {
    return !(a == b);
  }

 private:
  std::vector<std::string> tokens_;
};

// Splits on runs of whitespace. Empty or whitespace-only input yields an
// empty TokenSeq.
TokenSeq tokenize(const std::string& text);

// A span replacement against a source sentence: source tokens in
// [src_start, src_end) are replaced by `replacement`. src_start == src_end
// with a non-empty replacement is a pure insertion.
struct Edit {
  std::size_t src_start = 0;
  std::size_t src_end = 0;
  std::vector<std::string> replacement;

  friend bool operator==(const Edit& a, const Edit& b) {
    return a.src_start == b.src_start && a.src_end == b.src_end &&
           a.replacement == b.replacement;
  }
  friend bool operator!=(const Edit& a, const Edit& b) { return !(a == b); }
  friend bool operator<(const Edit& a, const Edit& b) {
    if (a.src_start != b.src_start) return a.src_start < b.src_start;
    if (a.src_end != b.src_end) return a.src_end < b.src_end;
    return a.replacement < b.replacement;
  }
};

// A source sentence plus a sorted, non-overlapping set of edits. Applying
// the edits left to right reconstructs the target sentence.
struct EditSet {
  TokenSeq source;
  std::vector<Edit> edits;

  // Target sentence obtained by applying all edits.
  TokenSeq apply() const;

  // Throws UsageError if edits are unsorted, overlapping, out of range,
  // or no-ops.
  void validate() const;
};

struct WeightedEdit {
  Edit edit;
  double weight = 1.0;
};

// Precision/recall/F_beta triple; f_beta is the weighted harmonic mean of
// the stored precision and recall.
struct PRFScore {
  double precision = 0.0;
  double recall = 0.0;
  double f_beta = 0.0;
  double beta = 0.5;
};

// Corpus-level score plus one score per evaluated source sentence. Metrics
// that cannot score a sentence (e.g. an unselected LLM hypothesis) record
// NaN there.
struct MetricResult {
  double corpus_score = 0.0;
  std::vector<double> sentence_scores;
};

// (1+beta^2)*P*R / (beta^2*P + R). When the denominator is zero the result
// is 1.0 if `zero_counts` says both sides were empty upstream (a correct
// "do nothing"), else 0.0. beta must be positive.
double f_beta(double precision, double recall, double beta,
              bool zero_counts = false);

}  // namespace gecmetrics
