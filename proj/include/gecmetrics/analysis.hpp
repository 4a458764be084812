#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gecmetrics/meta_eval.hpp"

namespace gecmetrics {

struct WindowRow {
  int start_rank = 0;  // 1-based rank of the window's best system
  std::optional<double> pearson;
  std::optional<double> spearman;
  int window = 0;
};

struct PairAgreementCell {
  int rank_a = 0;  // rank_a < rank_b, human ranks
  int rank_b = 0;
  double agreement = 0.0;
  long long pair_count = 0;
};

// Sliding-window correlations between the metric and the human gold: sort
// systems by system_gold descending, then correlate within each run of
// `window` consecutive systems. Constant values inside a window leave that
// row's correlations absent.
std::vector<WindowRow> window_analysis(const std::map<std::string, double>& metric_scores,
                                       const JudgmentSet& judgments,
                                       int window = 4);

// Metric-human agreement bucketed by the human rank pair: for every source
// pair with distinct human ranks (a < b) and both systems scored, the cell
// (a, b) counts the pair and whether the metric strictly prefers the
// human-preferred system. Cells are ordered by (rank_a, rank_b).
std::vector<PairAgreementCell> pairwise_analysis(
    const std::map<std::string, std::vector<double>>& sentence_scores,
    const JudgmentSet& judgments);

// Plot-ready CSV renderings, one header line plus one line per row; absent
// correlations become empty fields.
std::string window_csv(const std::vector<WindowRow>& rows);
std::string pairwise_csv(const std::vector<PairAgreementCell>& cells);

}  // namespace gecmetrics
