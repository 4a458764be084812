#include "gecmetrics/meta_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <set>
#include <utility>

#include "gecmetrics/core.hpp"
#include "gecmetrics/stats.hpp"

namespace gecmetrics {

namespace {

struct PairOutcome {
  std::size_t first;   // winner when decisive
  std::size_t second;
  bool draw;
};

std::map<std::string, std::size_t> index_systems(const std::vector<std::string>& systems) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < systems.size(); ++i) index.emplace(systems[i], i);
  return index;
}

// All pairwise outcomes implied by the rankings, in a deterministic order:
// sources in order, system pairs by their position in `systems`.
std::vector<PairOutcome> ranking_pairs(const JudgmentSet& judgments) {
  std::vector<PairOutcome> pairs;
  for (const auto& ranking : judgments.per_source_rankings) {
    for (std::size_t i = 0; i < judgments.systems.size(); ++i) {
      const auto it_a = ranking.find(judgments.systems[i]);
      if (it_a == ranking.end()) continue;
      for (std::size_t j = i + 1; j < judgments.systems.size(); ++j) {
        const auto it_b = ranking.find(judgments.systems[j]);
        if (it_b == ranking.end()) continue;
        if (it_a->second == it_b->second)
          pairs.push_back({i, j, true});
        else if (it_a->second < it_b->second)
          pairs.push_back({i, j, false});
        else
          pairs.push_back({j, i, false});
      }
    }
  }
  return pairs;
}

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

// Acklam's rational approximation with one Halley refinement step.
double norm_icdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0 || p == 1.0)
      throw UsageError("inverse normal cdf undefined at 0 or 1");
    throw UsageError("inverse normal cdf argument outside (0, 1)");
  }
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double err = norm_cdf(x) - p;
  const double u = err / norm_pdf(x);
  return x - u / (1.0 + x * u / 2.0);
}

double v_win(double t, double eps) {
  const double denom = norm_cdf(t - eps);
  if (denom < 1e-300) return eps - t;
  return norm_pdf(t - eps) / denom;
}

double w_win(double t, double eps) {
  const double v = v_win(t, eps);
  return v * (v + t - eps);
}

double v_draw(double t, double eps) {
  const double at = std::fabs(t);
  const double hi = eps - at;
  const double lo = -eps - at;
  const double denom = norm_cdf(hi) - norm_cdf(lo);
  const double v = denom < 1e-300 ? hi : (norm_pdf(lo) - norm_pdf(hi)) / denom;
  return t < 0.0 ? -v : v;
}

double w_draw(double t, double eps) {
  const double at = std::fabs(t);
  const double hi = eps - at;
  const double lo = -eps - at;
  const double denom = norm_cdf(hi) - norm_cdf(lo);
  if (denom < 1e-300) return 1.0;
  const double v = v_draw(at, eps);
  return v * v + (hi * norm_pdf(hi) - lo * norm_pdf(lo)) / denom;
}

}  // namespace

void JudgmentSet::validate() const {
  std::set<std::string> declared(systems.begin(), systems.end());
  if (declared.size() != systems.size())
    throw UsageError("duplicate system name in judgment set");
  for (std::size_t s = 0; s < per_source_rankings.size(); ++s) {
    const auto& ranking = per_source_rankings[s];
    std::set<int> distinct;
    for (const auto& [name, rank] : ranking) {
      if (!declared.count(name))
        throw UsageError("ranked system not declared: " + name);
      if (rank < 1)
        throw UsageError("rank below 1 at source " + std::to_string(s));
      distinct.insert(rank);
    }
    // dense tie-compressed ranks: distinct values must be exactly 1..k
    if (!distinct.empty() &&
        (*distinct.begin() != 1 ||
         *distinct.rbegin() != static_cast<int>(distinct.size())))
      throw UsageError("ranks not contiguous at source " + std::to_string(s));
  }
}

std::map<std::string, double> expected_wins(const JudgmentSet& judgments) {
  judgments.validate();
  if (judgments.systems.size() < 2)
    throw UsageError("expected_wins needs at least 2 systems");
  const std::size_t n = judgments.systems.size();
  std::vector<std::vector<long long>> wins(n, std::vector<long long>(n, 0));
  for (const auto& pair : ranking_pairs(judgments))
    if (!pair.draw) ++wins[pair.first][pair.second];

  std::map<std::string, double> scores;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    std::size_t opponents = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const long long total = wins[i][j] + wins[j][i];
      if (total == 0) continue;
      sum += static_cast<double>(wins[i][j]) / static_cast<double>(total);
      ++opponents;
    }
    if (opponents > 0)
      scores[judgments.systems[i]] = sum / static_cast<double>(opponents);
  }
  return scores;
}

RatingState trueskill_rank(const JudgmentSet& judgments,
                           const TrueSkillOptions& options) {
  judgments.validate();
  if (judgments.systems.size() < 2)
    throw UsageError("trueskill_rank needs at least 2 systems");
  if (options.passes < 1)
    throw UsageError("trueskill passes must be at least 1");

  const double mu0 = 25.0;
  const double sigma0 = mu0 / 3.0;
  const double beta = sigma0 / 2.0;
  const double gamma2 = (sigma0 / 100.0) * (sigma0 / 100.0);

  const std::size_t n = judgments.systems.size();
  std::vector<double> mu(n, mu0);
  std::vector<double> sigma2(n, sigma0 * sigma0);

  std::vector<PairOutcome> pairs = ranking_pairs(judgments);
  RatingState state;
  if (pairs.empty()) {
    for (const auto& name : judgments.systems) state.ratings[name] = {mu0, sigma0};
    return state;
  }

  long long draws = 0;
  for (const auto& pair : pairs) draws += pair.draw ? 1 : 0;
  double tie_rate = static_cast<double>(draws) / static_cast<double>(pairs.size());
  tie_rate = std::min(tie_rate, 0.95);
  // margin for a 2-player game at the observed tie rate
  const double eps = tie_rate <= 0.0
                         ? 0.0
                         : norm_icdf((tie_rate + 1.0) / 2.0) * kSqrt2 * beta;

  std::mt19937_64 rng(options.seed);
  for (int pass = 0; pass < options.passes; ++pass) {
    // Fisher-Yates with rng()%k keeps the order identical across platforms
    for (std::size_t k = pairs.size(); k > 1; --k)
      std::swap(pairs[k - 1], pairs[rng() % k]);

    for (const auto& pair : pairs) {
      const std::size_t a = pair.first;
      const std::size_t b = pair.second;
      sigma2[a] += gamma2;
      sigma2[b] += gamma2;
      const double c2 = 2.0 * beta * beta + sigma2[a] + sigma2[b];
      const double c = std::sqrt(c2);
      const double t = (mu[a] - mu[b]) / c;
      const double e = eps / c;
      double wa, wb;
      if (pair.draw) {
        mu[a] += sigma2[a] / c * v_draw(t, e);
        mu[b] += sigma2[b] / c * v_draw(-t, e);
        wa = w_draw(t, e);
        wb = w_draw(-t, e);
      } else {
        const double v = v_win(t, e);
        mu[a] += sigma2[a] / c * v;
        mu[b] -= sigma2[b] / c * v;
        wa = wb = w_win(t, e);
      }
      sigma2[a] *= std::max(1.0 - sigma2[a] / c2 * wa, 1e-6);
      sigma2[b] *= std::max(1.0 - sigma2[b] / c2 * wb, 1e-6);
    }
  }

  for (std::size_t i = 0; i < n; ++i)
    state.ratings[judgments.systems[i]] = {mu[i], std::sqrt(sigma2[i])};
  return state;
}

std::map<std::string, double> gold_scores(const JudgmentSet& judgments,
                                          GoldAggregation aggregation,
                                          const TrueSkillOptions& trueskill_options) {
  switch (aggregation) {
    case GoldAggregation::kAverage: {
      std::map<std::string, double> gold;
      for (const auto& name : judgments.systems) {
        const auto it = judgments.system_gold.find(name);
        if (it != judgments.system_gold.end()) gold[name] = it->second;
      }
      return gold;
    }
    case GoldAggregation::kExpectedWins:
      return expected_wins(judgments);
    case GoldAggregation::kTrueSkill: {
      std::map<std::string, double> gold;
      for (const auto& [name, rating] : trueskill_rank(judgments, trueskill_options).ratings)
        gold[name] = rating.mu;
      return gold;
    }
  }
  throw UsageError("unknown gold aggregation");
}

CorrResult corr_system(const std::map<std::string, double>& metric_scores,
                       const JudgmentSet& judgments,
                       GoldAggregation aggregation,
                       bool higher_is_better,
                       const TrueSkillOptions& trueskill_options) {
  judgments.validate();
  const auto gold = gold_scores(judgments, aggregation, trueskill_options);

  std::vector<double> x, y;
  for (const auto& name : judgments.systems) {
    const auto mit = metric_scores.find(name);
    const auto git = gold.find(name);
    if (mit == metric_scores.end() || git == gold.end()) continue;
    x.push_back(higher_is_better ? mit->second : -mit->second);
    y.push_back(git->second);
  }
  if (x.size() < 3)
    throw Error("system-level correlation needs at least 3 jointly scored systems, got " +
                std::to_string(x.size()));

  CorrResult result;
  result.pearson = pearson(x, y);
  result.spearman = spearman(x, y);
  return result;
}

CorrResult corr_sentence(const std::map<std::string, std::vector<double>>& sentence_scores,
                         const JudgmentSet& judgments,
                         const SentencePairPolicy& policy) {
  judgments.validate();
  const std::size_t n_sources = judgments.per_source_rankings.size();
  for (const auto& [name, scores] : sentence_scores) {
    if (scores.size() != n_sources)
      throw UsageError("sentence scores for " + name + " have " +
                       std::to_string(scores.size()) + " entries, expected " +
                       std::to_string(n_sources));
  }

  long long agree = 0, disagree = 0, metric_ties = 0;
  for (std::size_t s = 0; s < n_sources; ++s) {
    const auto& ranking = judgments.per_source_rankings[s];
    for (std::size_t i = 0; i < judgments.systems.size(); ++i) {
      const auto it_a = ranking.find(judgments.systems[i]);
      if (it_a == ranking.end()) continue;
      for (std::size_t j = i + 1; j < judgments.systems.size(); ++j) {
        const auto it_b = ranking.find(judgments.systems[j]);
        if (it_b == ranking.end()) continue;
        if (it_a->second == it_b->second) continue;  // human ties excluded

        const auto sa = sentence_scores.find(judgments.systems[i]);
        const auto sb = sentence_scores.find(judgments.systems[j]);
        if (sa == sentence_scores.end())
          throw UsageError("no sentence scores for system " + judgments.systems[i]);
        if (sb == sentence_scores.end())
          throw UsageError("no sentence scores for system " + judgments.systems[j]);
        const double xa = sa->second[s];
        const double xb = sb->second[s];
        if (std::isnan(xa) || std::isnan(xb)) continue;  // unscored sentence

        const bool human_prefers_a = it_a->second < it_b->second;
        if (xa == xb) {
          ++metric_ties;
        } else if ((xa > xb) == human_prefers_a) {
          ++agree;
        } else {
          ++disagree;
        }
      }
    }
  }

  const long long den = agree + disagree + (policy.metric_ties_in_denominator ? metric_ties : 0);
  if (den == 0) throw Error("no comparable sentence-level pairs");

  CorrResult result;
  result.accuracy = static_cast<double>(agree) / static_cast<double>(den);
  result.kendall = static_cast<double>(agree - disagree) / static_cast<double>(den);
  return result;
}

std::map<std::string, double> ensemble_rank(
    const std::vector<std::map<std::string, double>>& per_metric_system_scores) {
  if (per_metric_system_scores.size() < 2)
    throw UsageError("ensemble needs at least 2 metrics");

  std::vector<std::string> names;
  for (const auto& [name, score] : per_metric_system_scores.front()) names.push_back(name);

  std::map<std::string, double> totals;
  for (const auto& metric : per_metric_system_scores) {
    if (metric.size() != names.size())
      throw UsageError("ensemble metrics cover different system sets");
    std::vector<double> negated;
    negated.reserve(names.size());
    for (const auto& name : names) {
      const auto it = metric.find(name);
      if (it == metric.end())
        throw UsageError("ensemble metric missing system " + name);
      negated.push_back(-it->second);
    }
    // rank 1 = highest score
    const std::vector<double> ranks = average_ranks(negated);
    for (std::size_t i = 0; i < names.size(); ++i) totals[names[i]] += ranks[i];
  }
  for (auto& [name, total] : totals)
    total /= static_cast<double>(per_metric_system_scores.size());
  return totals;
}

}  // namespace gecmetrics
