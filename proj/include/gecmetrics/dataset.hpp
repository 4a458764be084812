#pragma once

#include <map>
#include <string>
#include <vector>

#include "gecmetrics/core.hpp"
#include "gecmetrics/meta_eval.hpp"

namespace gecmetrics {

// A meta-evaluation dataset read from a directory of line-aligned text
// files:
//   sources.txt                 one source sentence per line
//   references/ref0.txt ...     optional, numbered consecutively
//   systems/<name>.txt          one file per system
//   judgments.tsv               source_index <TAB> system <TAB> rank
//   manifest.yaml               name, gold: expected_wins|trueskill,
//                               configuration: free-form label
struct MetaDataset {
  std::string name;
  std::vector<TokenSeq> sources;
  std::vector<std::vector<TokenSeq>> references;  // [reference][sentence]
  std::map<std::string, std::vector<TokenSeq>> systems;
  JudgmentSet judgments;  // system_gold filled per the manifest's aggregation
  GoldAggregation gold_aggregation = GoldAggregation::kExpectedWins;
};

// Loads and validates the layout; the first violated invariant is reported
// with its file (and line where applicable). References may be absent:
// reference-based metrics fail later, at metric construction.
MetaDataset load_meta_dataset(const std::string& root,
                              const TrueSkillOptions& trueskill_options = {});

// One sentence per line, UTF-8, LF endings (a trailing CR is stripped).
std::vector<std::string> read_lines(const std::string& path);

}  // namespace gecmetrics
