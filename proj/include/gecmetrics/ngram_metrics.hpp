#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gecmetrics/core.hpp"

namespace gecmetrics {

// Counts of the seven n-gram Venn groups for one (source, hypothesis,
// reference) triple: true keep/deletion/insertion, over deletion/insertion,
// under deletion/insertion.
struct NGramVenn {
  int n = 1;
  long long tk = 0;
  long long td = 0;
  long long ti = 0;
  long long od = 0;
  long long oi = 0;
  long long ud = 0;
  long long ui = 0;

  void operator+=(const NGramVenn& o) {
    tk += o.tk;
    td += o.td;
    ti += o.ti;
    od += o.od;
    oi += o.oi;
    ud += o.ud;
    ui += o.ui;
  }
};

using Gram = std::vector<std::string>;

// Per-gram group assignment. For each distinct gram with multiplicities
// s, h, r in the three sentences:
//   tk = min(s,h,r)                ti = (min(h,r) - s)+
//   oi = ((h - s)+ - r)+           td = ((s - h)+ - r)+
//   od = (min(s,r) - h)+           ud = (min(s,h) - r)+
//   ui = ((r - s)+ - h)+
// where (x)+ = max(x, 0); subtractions are sequential multiset removals.
std::map<Gram, NGramVenn> venn_by_gram(const TokenSeq& source,
                                       const TokenSeq& hyp,
                                       const TokenSeq& ref, int n);

// Group totals over all grams. Sentences shorter than n contribute empty
// gram multisets.
NGramVenn venn_counts(const TokenSeq& source, const TokenSeq& hyp,
                      const TokenSeq& ref, int n);

struct GleuOptions {
  int n_max = 4;
  int iterations = 500;
  std::uint64_t seed = 0;
  // Worker threads for the per-sentence count pass. The iteration loop
  // reduces in fixed order, so the score does not depend on this.
  int threads = 1;
};

// Corpus score: mean over `iterations` of the sampled-reference corpus
// GLEU (one reference drawn per sentence and iteration from the seeded
// generator). Sentence scores: mean over all references of the
// single-sentence GLEU.
MetricResult gleu(const std::vector<TokenSeq>& sources,
                  const std::vector<TokenSeq>& hyps,
                  const std::vector<std::vector<TokenSeq>>& refs,
                  const GleuOptions& options = {});

enum class GreenRefMode {
  kBestReference,  // per sentence, the reference with the highest F_beta
  kAverage,        // mean over references
};

struct GreenOptions {
  int n_max = 4;
  double beta = 2.0;
  GreenRefMode ref_mode = GreenRefMode::kBestReference;
};

// Precision_n and Recall_n per gram order from pooled Venn counts, each
// geometrically averaged over n = 1..n_max, then combined with F_beta.
// A zero denominator (empty triple at that order) counts as 1.0.
double green_precision(const NGramVenn& v);
double green_recall(const NGramVenn& v);

MetricResult green(const std::vector<TokenSeq>& sources,
                   const std::vector<TokenSeq>& hyps,
                   const std::vector<std::vector<TokenSeq>>& refs,
                   const GreenOptions& options = {});

}  // namespace gecmetrics
