#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gecmetrics/core.hpp"

namespace gecmetrics {

// Per-edit weight source for weighted P/R/F. Lookups are pure; edits the
// provider does not know get its declared default.
class EditWeightProvider {
 public:
  virtual ~EditWeightProvider() = default;
  virtual double weight(std::size_t sentence_index, const Edit& edit) const = 0;
};

class UniformWeights final : public EditWeightProvider {
 public:
  explicit UniformWeights(double value = 1.0) : value_(value) {
    if (value < 0.0) throw UsageError("UniformWeights: negative weight");
  }
  double weight(std::size_t, const Edit&) const override { return value_; }

 private:
  double value_;
};

// Keyed weight table (offline model scores etc.); unknown edits fall back
// to `fallback`.
class TableWeights final : public EditWeightProvider {
 public:
  explicit TableWeights(std::vector<std::pair<std::size_t, WeightedEdit>> entries,
                        double fallback = 1.0);
  double weight(std::size_t sentence_index, const Edit& edit) const override;

 private:
  std::map<std::pair<std::size_t, Edit>, double> table_;
  double fallback_;
};

// Reads a tab-separated weight file with lines
//   sentence_index <TAB> src_start <TAB> src_end <TAB> replacement <TAB> weight
// where `replacement` is space-joined (empty for deletions). Unknown
// lookups default to 1.0.
TableWeights load_edit_weights(const std::string& path);

struct EditLevelScores {
  PRFScore corpus;
  std::vector<PRFScore> sentences;

  MetricResult to_metric_result() const;
};

// Weighted edit-level P/R/F over pre-extracted edit sets. `ref_edits` is
// indexed [reference][sentence]; each sentence takes the reference with the
// highest F_beta (ties keep the lowest reference index) and the corpus
// score applies F_beta once to the summed weighted counts of those picks.
EditLevelScores score_edit_level_from_edits(
    const std::vector<std::vector<Edit>>& hyp_edits,
    const std::vector<std::vector<std::vector<Edit>>>& ref_edits, double beta,
    const EditWeightProvider& weights);

EditLevelScores score_edit_level_detailed(
    const std::vector<TokenSeq>& sources, const std::vector<TokenSeq>& hyps,
    const std::vector<std::vector<TokenSeq>>& refs, double beta,
    const EditWeightProvider& weights);

// F_beta projection of score_edit_level_detailed. `refs` is indexed
// [reference][sentence].
MetricResult score_edit_level(const std::vector<TokenSeq>& sources,
                              const std::vector<TokenSeq>& hyps,
                              const std::vector<std::vector<TokenSeq>>& refs,
                              double beta, const EditWeightProvider& weights);

// Difficulty weights derived from how many systems succeeded on each
// reference edit and each kept span. Kept spans are the maximal source
// intervals untouched by any reference edit, split at reference insertion
// points so a perfect hypothesis touches none of them.
struct DifficultyTable {
  struct KeptSpan {
    std::size_t start = 0;
    std::size_t end = 0;
    double weight = 1.0;
  };

  std::map<std::pair<std::size_t, Edit>, double> edit_weights;
  std::vector<std::vector<KeptSpan>> kept_spans;  // per sentence

  double edit_weight_or(std::size_t sentence_index, const Edit& edit,
                        double fallback) const;
};

// EditWeightProvider view over a DifficultyTable; hypothesis-only edits
// (absent from the table) weigh 1.0.
class DifficultyWeights final : public EditWeightProvider {
 public:
  explicit DifficultyWeights(const DifficultyTable& table) : table_(&table) {}
  double weight(std::size_t sentence_index, const Edit& edit) const override {
    return table_->edit_weight_or(sentence_index, edit, 1.0);
  }

 private:
  const DifficultyTable* table_;
};

// Builds the difficulty table against the first reference. The success
// pool contains every system plus one identity "system" that copies the
// sources, so K = |system_outputs| + 1.
DifficultyTable gotoscorer_difficulty(
    const std::vector<TokenSeq>& sources,
    const std::vector<TokenSeq>& refs_first,
    const std::vector<std::vector<TokenSeq>>& system_outputs);

// Difficulty-weighted scoring against the first reference. Edits score per
// the weighted P/R formulas with difficulty weights; kept spans add mass to
// recall's denominator, and to its numerator when the hypothesis left the
// span untouched (an insertion strictly inside a span touches it, one at
// its boundary does not).
EditLevelScores score_gotoscorer(const std::vector<TokenSeq>& sources,
                                 const std::vector<TokenSeq>& hyps,
                                 const std::vector<TokenSeq>& refs_first,
                                 const DifficultyTable& table, double beta);

}  // namespace gecmetrics
