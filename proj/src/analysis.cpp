#include "gecmetrics/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <utility>

#include "gecmetrics/core.hpp"
#include "gecmetrics/stats.hpp"

namespace gecmetrics {

namespace {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::vector<WindowRow> window_analysis(const std::map<std::string, double>& metric_scores,
                                       const JudgmentSet& judgments,
                                       int window) {
  judgments.validate();
  if (window < 2) throw UsageError("window must be at least 2");

  struct Entry {
    double gold;
    double metric;
    std::size_t position;  // order in judgments.systems
  };
  std::vector<Entry> entries;
  for (const auto& name : judgments.systems) {
    const auto git = judgments.system_gold.find(name);
    const auto mit = metric_scores.find(name);
    if (git == judgments.system_gold.end() || mit == metric_scores.end()) continue;
    entries.push_back({git->second, mit->second, entries.size()});
  }
  if (static_cast<std::size_t>(window) > entries.size())
    throw UsageError("window " + std::to_string(window) + " exceeds the " +
                     std::to_string(entries.size()) + " scored systems");

  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.gold > b.gold; });

  std::vector<WindowRow> rows;
  for (std::size_t start = 0; start + window <= entries.size(); ++start) {
    // accumulate window members in declaration order so that the full-range
    // window agrees with corr_system bit for bit
    std::vector<const Entry*> members;
    for (std::size_t i = start; i < start + window; ++i) members.push_back(&entries[i]);
    std::sort(members.begin(), members.end(),
              [](const Entry* a, const Entry* b) { return a->position < b->position; });
    std::vector<double> x, y;
    for (const Entry* e : members) {
      x.push_back(e->metric);
      y.push_back(e->gold);
    }
    WindowRow row;
    row.start_rank = static_cast<int>(start) + 1;
    row.window = window;
    row.pearson = pearson(x, y);
    row.spearman = spearman(x, y);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<PairAgreementCell> pairwise_analysis(
    const std::map<std::string, std::vector<double>>& sentence_scores,
    const JudgmentSet& judgments) {
  judgments.validate();
  const std::size_t n_sources = judgments.per_source_rankings.size();
  for (const auto& [name, scores] : sentence_scores) {
    if (scores.size() != n_sources)
      throw UsageError("sentence scores for " + name + " have " +
                       std::to_string(scores.size()) + " entries, expected " +
                       std::to_string(n_sources));
  }

  struct Bucket {
    long long pairs = 0;
    long long agreements = 0;
  };
  std::map<std::pair<int, int>, Bucket> buckets;

  for (std::size_t s = 0; s < n_sources; ++s) {
    const auto& ranking = judgments.per_source_rankings[s];
    for (std::size_t i = 0; i < judgments.systems.size(); ++i) {
      const auto it_a = ranking.find(judgments.systems[i]);
      if (it_a == ranking.end()) continue;
      for (std::size_t j = i + 1; j < judgments.systems.size(); ++j) {
        const auto it_b = ranking.find(judgments.systems[j]);
        if (it_b == ranking.end()) continue;
        if (it_a->second == it_b->second) continue;

        const auto sa = sentence_scores.find(judgments.systems[i]);
        const auto sb = sentence_scores.find(judgments.systems[j]);
        if (sa == sentence_scores.end())
          throw UsageError("no sentence scores for system " + judgments.systems[i]);
        if (sb == sentence_scores.end())
          throw UsageError("no sentence scores for system " + judgments.systems[j]);
        const double xa = sa->second[s];
        const double xb = sb->second[s];
        if (std::isnan(xa) || std::isnan(xb)) continue;

        const bool a_preferred = it_a->second < it_b->second;
        const double preferred = a_preferred ? xa : xb;
        const double other = a_preferred ? xb : xa;
        Bucket& bucket = buckets[{std::min(it_a->second, it_b->second),
                                  std::max(it_a->second, it_b->second)}];
        ++bucket.pairs;
        if (preferred > other) ++bucket.agreements;
      }
    }
  }

  std::vector<PairAgreementCell> cells;
  for (const auto& [key, bucket] : buckets) {
    PairAgreementCell cell;
    cell.rank_a = key.first;
    cell.rank_b = key.second;
    cell.pair_count = bucket.pairs;
    cell.agreement = static_cast<double>(bucket.agreements) / static_cast<double>(bucket.pairs);
    cells.push_back(cell);
  }
  return cells;
}

std::string window_csv(const std::vector<WindowRow>& rows) {
  std::ostringstream out;
  out << "start_rank,pearson,spearman,window\n";
  for (const auto& row : rows) {
    out << row.start_rank << ',';
    if (row.pearson) out << format_number(*row.pearson);
    out << ',';
    if (row.spearman) out << format_number(*row.spearman);
    out << ',' << row.window << '\n';
  }
  return out.str();
}

std::string pairwise_csv(const std::vector<PairAgreementCell>& cells) {
  std::ostringstream out;
  out << "rank_a,rank_b,agreement,pair_count\n";
  for (const auto& cell : cells)
    out << cell.rank_a << ',' << cell.rank_b << ',' << format_number(cell.agreement)
        << ',' << cell.pair_count << '\n';
  return out.str();
}

}  // namespace gecmetrics
