#include "gecmetrics/core.hpp"

#include <cctype>

namespace gecmetrics {

namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }

}  // namespace

TokenSeq::TokenSeq(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (const auto& t : tokens_) {
    if (t.empty()) throw UsageError("TokenSeq: empty token");
    for (unsigned char c : t) {
      if (is_space(c)) throw UsageError("TokenSeq: token contains whitespace: '" + t + "'");
    }
  }
}

std::string TokenSeq::join() const {
  std::string out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (i) out += ' ';
    out += tokens_[i];
  }
  return out;
}

TokenSeq tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) tokens.push_back(text.substr(start, i - start));
  }
  return TokenSeq(std::move(tokens));
}

TokenSeq EditSet::apply() const {
  validate();
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (const auto& e : edits) {
    for (std::size_t i = pos; i < e.src_start; ++i) out.push_back(source[i]);
    for (const auto& t : e.replacement) out.push_back(t);
    pos = e.src_end;
  }
  for (std::size_t i = pos; i < source.size(); ++i) out.push_back(source[i]);
  return TokenSeq(std::move(out));
}

void EditSet::validate() const {
  const Edit* prev = nullptr;
  for (const auto& e : edits) {
    if (e.src_start > e.src_end || e.src_end > source.size())
      throw UsageError("EditSet: edit span out of range");
    if (e.src_start == e.src_end && e.replacement.empty())
      throw UsageError("EditSet: empty insertion");
    std::vector<std::string> span(source.tokens().begin() + e.src_start,
                                  source.tokens().begin() + e.src_end);
    if (span == e.replacement) throw UsageError("EditSet: no-op edit");
    if (prev) {
      if (e.src_start < prev->src_end)
        throw UsageError("EditSet: overlapping edits");
      // Two insertions at the same index must be merged into one edit.
      if (prev->src_start == prev->src_end && e.src_start == e.src_end &&
          prev->src_start == e.src_start)
        throw UsageError("EditSet: unmerged insertions at index " +
                         std::to_string(e.src_start));
    }
    prev = &e;
  }
}

double f_beta(double precision, double recall, double beta, bool zero_counts) {
  if (beta <= 0.0) throw UsageError("f_beta: beta must be positive");
  const double denom = beta * beta * precision + recall;
  if (denom == 0.0) return zero_counts ? 1.0 : 0.0;
  return (1.0 + beta * beta) * precision * recall / denom;
}

}  // namespace gecmetrics
