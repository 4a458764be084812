#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gecmetrics {

// Human judgments over a set of systems: per-source partial rankings
// (1 = best, dense tie-compressed ranks, unranked systems omitted) plus the
// dataset's official system-level score per system.
struct JudgmentSet {
  std::vector<std::string> systems;
  std::vector<std::map<std::string, int>> per_source_rankings;
  std::map<std::string, double> system_gold;
  std::string config_label;

  // Checks that every ranked system is declared and that each source's
  // ranks form a contiguous 1..k tie-compressed ordering.
  void validate() const;
};

struct CorrResult {
  std::optional<double> pearson;
  std::optional<double> spearman;
  std::optional<double> accuracy;
  std::optional<double> kendall;
};

enum class GoldAggregation { kAverage, kExpectedWins, kTrueSkill };

struct TrueSkillOptions {
  std::uint64_t seed = 0;
  int passes = 10;
};

struct Rating {
  double mu = 25.0;
  double sigma = 25.0 / 3.0;
};

struct RatingState {
  std::map<std::string, Rating> ratings;
};

// score(A) = mean over opponents B of wins/(wins+losses), ties excluded;
// opponents with no decisive comparison are skipped, and a system with no
// decisive comparison at all is absent from the result.
std::map<std::string, double> expected_wins(const JudgmentSet& judgments);

// One-vs-one Gaussian skill updates over every pairwise outcome implied by
// the per-source rankings, repeated for `passes` seeded shuffles of the
// pair list. mu0 = 25, sigma0 = 25/3, beta = sigma0/2, dynamics = sigma0/100,
// draw margin fit from the observed tie rate.
RatingState trueskill_rank(const JudgmentSet& judgments,
                           const TrueSkillOptions& options = {});

// Human score per system under the chosen aggregation: the official
// system_gold for kAverage, otherwise recomputed from the per-source
// rankings. Systems without a defined score are absent.
std::map<std::string, double> gold_scores(const JudgmentSet& judgments,
                                          GoldAggregation aggregation,
                                          const TrueSkillOptions& trueskill_options = {});

// System-level Pearson/Spearman between metric scores and the human gold.
// higher_is_better = false flips the metric's sign first (for rank-style
// scores where lower is better). Fewer than 3 jointly scored systems is an
// error.
CorrResult corr_system(const std::map<std::string, double>& metric_scores,
                       const JudgmentSet& judgments,
                       GoldAggregation aggregation,
                       bool higher_is_better = true,
                       const TrueSkillOptions& trueskill_options = {});

struct SentencePairPolicy {
  // Counts metric-tied pairs in the Accuracy/tau denominator when true;
  // drops them entirely when false. Human-tied pairs are always excluded.
  bool metric_ties_in_denominator = true;
};

// Sentence-level Accuracy and Kendall tau over human-ordered system pairs.
// sentence_scores maps each system to a score list aligned with the
// judgment sources; NaN entries mark unscored sentences and skip the pair.
CorrResult corr_sentence(const std::map<std::string, std::vector<double>>& sentence_scores,
                         const JudgmentSet& judgments,
                         const SentencePairPolicy& policy = {});

// Average rank per system across metrics (rank 1 = best score within each
// metric, ties get average ranks). Lower output = better.
std::map<std::string, double> ensemble_rank(
    const std::vector<std::map<std::string, double>>& per_metric_system_scores);

}  // namespace gecmetrics
