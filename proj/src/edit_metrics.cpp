#include "gecmetrics/edit_metrics.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "gecmetrics/align.hpp"

namespace gecmetrics {
namespace {

// Weighted-count accumulator. Precision and recall keep separate true
// positive masses because kept-span credit feeds only recall.
struct Counts {
  double tp_p = 0.0;
  double p_mass = 0.0;
  double tp_r = 0.0;
  double r_mass = 0.0;

  void operator+=(const Counts& o) {
    tp_p += o.tp_p;
    p_mass += o.p_mass;
    tp_r += o.tp_r;
    r_mass += o.r_mass;
  }
};

bool contains_edit(const std::vector<Edit>& edits, const Edit& e) {
  return std::find(edits.begin(), edits.end(), e) != edits.end();
}

Counts count_sentence(const std::vector<Edit>& hyp, const std::vector<Edit>& ref,
                      std::size_t sentence_index,
                      const EditWeightProvider& weights) {
  Counts c;
  for (const Edit& e : hyp) {
    const double w = weights.weight(sentence_index, e);
    c.p_mass += w;
    if (contains_edit(ref, e)) {
      c.tp_p += w;
      c.tp_r += w;
    }
  }
  for (const Edit& e : ref) c.r_mass += weights.weight(sentence_index, e);
  return c;
}

// Empty masses score 1.0: a hypothesis that proposes nothing is vacuously
// precise, a reference that demands nothing is vacuously recalled.
PRFScore make_prf(const Counts& c, double beta) {
  PRFScore s;
  s.beta = beta;
  s.precision = c.p_mass > 0.0 ? c.tp_p / c.p_mass : 1.0;
  s.recall = c.r_mass > 0.0 ? c.tp_r / c.r_mass : 1.0;
  s.f_beta = f_beta(s.precision, s.recall, beta);
  return s;
}

std::vector<std::vector<Edit>> extract_all(const std::vector<TokenSeq>& sources,
                                           const std::vector<TokenSeq>& targets) {
  std::vector<std::vector<Edit>> out;
  out.reserve(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i)
    out.push_back(extract_edits(sources[i], targets[i]).edits);
  return out;
}

}  // namespace

TableWeights::TableWeights(std::vector<std::pair<std::size_t, WeightedEdit>> entries,
                           double fallback)
    : fallback_(fallback) {
  if (fallback < 0.0) throw UsageError("TableWeights: negative fallback weight");
  for (auto& [idx, we] : entries) {
    if (we.weight < 0.0) throw UsageError("TableWeights: negative weight");
    table_[{idx, std::move(we.edit)}] = we.weight;
  }
}

double TableWeights::weight(std::size_t sentence_index, const Edit& edit) const {
  const auto it = table_.find({sentence_index, edit});
  return it == table_.end() ? fallback_ : it->second;
}

TableWeights load_edit_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open weight file: " + path);

  std::vector<std::pair<std::size_t, WeightedEdit>> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);

    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (fields.size() != 5)
      throw ParseError(where + ": expected 5 tab-separated fields, got " +
                       std::to_string(fields.size()));

    WeightedEdit we;
    std::size_t sentence = 0;
    try {
      std::size_t used = 0;
      sentence = std::stoul(fields[0], &used);
      if (used != fields[0].size()) throw std::invalid_argument(fields[0]);
      we.edit.src_start = std::stoul(fields[1], &used);
      if (used != fields[1].size()) throw std::invalid_argument(fields[1]);
      we.edit.src_end = std::stoul(fields[2], &used);
      if (used != fields[2].size()) throw std::invalid_argument(fields[2]);
      we.weight = std::stod(fields[4], &used);
      if (used != fields[4].size()) throw std::invalid_argument(fields[4]);
    } catch (const std::exception&) {
      throw ParseError(where + ": malformed weight line: " + line);
    }
    if (we.edit.src_start > we.edit.src_end)
      throw ParseError(where + ": reversed edit span");
    if (we.weight < 0.0)
      throw Error(where + ": negative weight " + fields[4]);
    we.edit.replacement = tokenize(fields[3]).tokens();
    entries.emplace_back(sentence, std::move(we));
  }
  return TableWeights(std::move(entries));
}

MetricResult EditLevelScores::to_metric_result() const {
  MetricResult r;
  r.corpus_score = corpus.f_beta;
  r.sentence_scores.reserve(sentences.size());
  for (const PRFScore& s : sentences) r.sentence_scores.push_back(s.f_beta);
  return r;
}

EditLevelScores score_edit_level_from_edits(
    const std::vector<std::vector<Edit>>& hyp_edits,
    const std::vector<std::vector<std::vector<Edit>>>& ref_edits, double beta,
    const EditWeightProvider& weights) {
  if (ref_edits.empty())
    throw UsageError("score_edit_level: at least one reference set required");
  const std::size_t n = hyp_edits.size();
  for (const auto& r : ref_edits) {
    if (r.size() != n)
      throw UsageError("score_edit_level: reference set has " +
                       std::to_string(r.size()) + " sentences, expected " +
                       std::to_string(n));
  }

  EditLevelScores out;
  out.sentences.reserve(n);
  Counts corpus;
  for (std::size_t i = 0; i < n; ++i) {
    Counts best_counts;
    PRFScore best;
    bool have = false;
    for (const auto& ref_set : ref_edits) {
      const Counts c = count_sentence(hyp_edits[i], ref_set[i], i, weights);
      const PRFScore s = make_prf(c, beta);
      if (!have || s.f_beta > best.f_beta) {
        best = s;
        best_counts = c;
        have = true;
      }
    }
    corpus += best_counts;
    out.sentences.push_back(best);
  }
  out.corpus = make_prf(corpus, beta);
  return out;
}

EditLevelScores score_edit_level_detailed(
    const std::vector<TokenSeq>& sources, const std::vector<TokenSeq>& hyps,
    const std::vector<std::vector<TokenSeq>>& refs, double beta,
    const EditWeightProvider& weights) {
  if (hyps.size() != sources.size())
    throw UsageError("score_edit_level: hypothesis count " +
                     std::to_string(hyps.size()) + " != source count " +
                     std::to_string(sources.size()));
  for (const auto& ref : refs) {
    if (ref.size() != sources.size())
      throw UsageError("score_edit_level: reference count " +
                       std::to_string(ref.size()) + " != source count " +
                       std::to_string(sources.size()));
  }

  std::vector<std::vector<std::vector<Edit>>> ref_edits;
  ref_edits.reserve(refs.size());
  for (const auto& ref : refs) ref_edits.push_back(extract_all(sources, ref));
  return score_edit_level_from_edits(extract_all(sources, hyps), ref_edits,
                                     beta, weights);
}

MetricResult score_edit_level(const std::vector<TokenSeq>& sources,
                              const std::vector<TokenSeq>& hyps,
                              const std::vector<std::vector<TokenSeq>>& refs,
                              double beta, const EditWeightProvider& weights) {
  return score_edit_level_detailed(sources, hyps, refs, beta, weights)
      .to_metric_result();
}

double DifficultyTable::edit_weight_or(std::size_t sentence_index,
                                       const Edit& edit, double fallback) const {
  const auto it = edit_weights.find({sentence_index, edit});
  return it == edit_weights.end() ? fallback : it->second;
}

namespace {

bool touches_span(const Edit& e, std::size_t start, std::size_t end) {
  if (e.src_start < e.src_end) return e.src_start < end && e.src_end > start;
  return start < e.src_start && e.src_start < end;
}

bool keeps_span(const std::vector<Edit>& edits, std::size_t start,
                std::size_t end) {
  for (const Edit& e : edits)
    if (touches_span(e, start, end)) return false;
  return true;
}

}  // namespace

DifficultyTable gotoscorer_difficulty(
    const std::vector<TokenSeq>& sources,
    const std::vector<TokenSeq>& refs_first,
    const std::vector<std::vector<TokenSeq>>& system_outputs) {
  if (system_outputs.empty())
    throw UsageError("gotoscorer_difficulty: at least one system required");
  const std::size_t n = sources.size();
  if (refs_first.size() != n)
    throw UsageError("gotoscorer_difficulty: reference count mismatch");
  for (const auto& sys : system_outputs) {
    if (sys.size() != n)
      throw UsageError("gotoscorer_difficulty: system output count mismatch");
  }

  // The pool counts one identity "system" that copies the sources: it never
  // makes an edit but keeps every span.
  const double pool = static_cast<double>(system_outputs.size() + 1);

  DifficultyTable table;
  table.kept_spans.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<Edit> ref = extract_edits(sources[i], refs_first[i]).edits;
    std::vector<std::vector<Edit>> sys_edits;
    sys_edits.reserve(system_outputs.size());
    for (const auto& sys : system_outputs)
      sys_edits.push_back(extract_edits(sources[i], sys[i]).edits);

    for (const Edit& e : ref) {
      int made = 0;
      for (const auto& edits : sys_edits)
        if (contains_edit(edits, e)) ++made;
      table.edit_weights[{i, e}] = 1.0 - static_cast<double>(made) / pool;
    }

    // Kept spans: runs of source tokens no reference edit covers, split at
    // reference insertion points so insertions sit on span boundaries.
    std::vector<bool> covered(sources[i].size(), false);
    std::vector<std::size_t> cuts;
    for (const Edit& e : ref) {
      for (std::size_t p = e.src_start; p < e.src_end; ++p) covered[p] = true;
      if (e.src_start == e.src_end) cuts.push_back(e.src_start);
    }
    std::size_t pos = 0;
    while (pos < covered.size()) {
      if (covered[pos]) {
        ++pos;
        continue;
      }
      std::size_t run_end = pos;
      while (run_end < covered.size() && !covered[run_end]) ++run_end;
      std::vector<std::size_t> bounds = {pos};
      for (std::size_t c : cuts)
        if (pos < c && c < run_end) bounds.push_back(c);
      std::sort(bounds.begin(), bounds.end());
      bounds.push_back(run_end);
      for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
        int kept = 1;  // identity
        for (const auto& edits : sys_edits)
          if (keeps_span(edits, bounds[b], bounds[b + 1])) ++kept;
        table.kept_spans[i].push_back(
            {bounds[b], bounds[b + 1], 1.0 - static_cast<double>(kept) / pool});
      }
      pos = run_end;
    }
  }
  return table;
}

EditLevelScores score_gotoscorer(const std::vector<TokenSeq>& sources,
                                 const std::vector<TokenSeq>& hyps,
                                 const std::vector<TokenSeq>& refs_first,
                                 const DifficultyTable& table, double beta) {
  const std::size_t n = sources.size();
  if (hyps.size() != n || refs_first.size() != n)
    throw UsageError("score_gotoscorer: sentence count mismatch");
  if (table.kept_spans.size() != n)
    throw UsageError("score_gotoscorer: table built for a different corpus");

  const DifficultyWeights weights(table);
  EditLevelScores out;
  out.sentences.reserve(n);
  Counts corpus;
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<Edit> hyp = extract_edits(sources[i], hyps[i]).edits;
    const std::vector<Edit> ref = extract_edits(sources[i], refs_first[i]).edits;
    Counts c = count_sentence(hyp, ref, i, weights);
    for (const auto& span : table.kept_spans[i]) {
      c.r_mass += span.weight;
      if (keeps_span(hyp, span.start, span.end)) c.tp_r += span.weight;
    }
    corpus += c;
    out.sentences.push_back(make_prf(c, beta));
  }
  out.corpus = make_prf(corpus, beta);
  return out;
}

}  // namespace gecmetrics
