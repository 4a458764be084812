#include "gecmetrics/ngram_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace gecmetrics {
namespace {

long long clamp0(long long x) { return x > 0 ? x : 0; }

std::map<Gram, long long> gram_counts(const TokenSeq& t, int n) {
  std::map<Gram, long long> out;
  const auto& toks = t.tokens();
  if (toks.size() < static_cast<std::size_t>(n)) return out;
  for (std::size_t i = 0; i + n <= toks.size(); ++i)
    ++out[Gram(toks.begin() + i, toks.begin() + i + n)];
  return out;
}

long long count_of(const std::map<Gram, long long>& m, const Gram& g) {
  const auto it = m.find(g);
  return it == m.end() ? 0 : it->second;
}

}  // namespace

std::map<Gram, NGramVenn> venn_by_gram(const TokenSeq& source,
                                       const TokenSeq& hyp,
                                       const TokenSeq& ref, int n) {
  if (n < 1) throw UsageError("venn_by_gram: n must be >= 1");
  const auto s = gram_counts(source, n);
  const auto h = gram_counts(hyp, n);
  const auto r = gram_counts(ref, n);

  std::map<Gram, NGramVenn> out;
  auto visit = [&](const Gram& g) {
    if (out.count(g)) return;
    const long long cs = count_of(s, g);
    const long long ch = count_of(h, g);
    const long long cr = count_of(r, g);
    NGramVenn v;
    v.n = n;
    v.tk = std::min({cs, ch, cr});
    v.ti = clamp0(std::min(ch, cr) - cs);
    v.oi = clamp0(clamp0(ch - cs) - cr);
    v.td = clamp0(clamp0(cs - ch) - cr);
    v.od = clamp0(std::min(cs, cr) - ch);
    v.ud = clamp0(std::min(cs, ch) - cr);
    v.ui = clamp0(clamp0(cr - cs) - ch);
    out[g] = v;
  };
  for (const auto& [g, c] : s) visit(g);
  for (const auto& [g, c] : h) visit(g);
  for (const auto& [g, c] : r) visit(g);
  return out;
}

NGramVenn venn_counts(const TokenSeq& source, const TokenSeq& hyp,
                      const TokenSeq& ref, int n) {
  NGramVenn total;
  total.n = n;
  for (const auto& [g, v] : venn_by_gram(source, hyp, ref, n)) total += v;
  return total;
}

namespace {

// Per-sentence GLEU ingredients, precomputed once per reference and gram
// order so the iteration loop is pure integer accumulation.
struct GleuCache {
  std::vector<std::vector<long long>> num;  // [ref][n-1], clamped
  std::vector<std::vector<long long>> den;
  std::vector<long long> ref_len;
  long long hyp_len = 0;
};

double brevity_penalty(long long r, long long c) {
  if (c == 0) return r == 0 ? 1.0 : 0.0;
  if (r <= c) return 1.0;
  return std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
}

// Geometric mean of the usable p_n times the brevity penalty. Orders where
// numerator and denominator are both zero are skipped; a zero numerator
// over a live denominator zeroes the whole score.
double gleu_from_counts(const std::vector<long long>& num,
                        const std::vector<long long>& den, long long r,
                        long long c) {
  double log_sum = 0.0;
  int used = 0;
  for (std::size_t k = 0; k < num.size(); ++k) {
    if (den[k] == 0) continue;
    if (num[k] == 0) return 0.0;
    log_sum += std::log(static_cast<double>(num[k]) / den[k]);
    ++used;
  }
  if (used == 0) return 0.0;
  return brevity_penalty(r, c) * std::exp(log_sum / used);
}

void check_corpus_shape(const std::vector<TokenSeq>& sources,
                        const std::vector<TokenSeq>& hyps,
                        const std::vector<std::vector<TokenSeq>>& refs,
                        const char* name) {
  const std::string prefix(name);
  if (hyps.size() != sources.size())
    throw UsageError(prefix + ": hypothesis count " +
                     std::to_string(hyps.size()) + " != source count " +
                     std::to_string(sources.size()));
  if (refs.empty())
    throw UsageError(prefix + ": at least one reference set required");
  for (const auto& ref : refs) {
    if (ref.size() != sources.size())
      throw UsageError(prefix + ": reference count " +
                       std::to_string(ref.size()) + " != source count " +
                       std::to_string(sources.size()));
  }
}

template <typename Fn>
void run_chunked(std::size_t count, int threads, Fn&& fn) {
  threads = std::max(1, threads);
  if (threads == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

MetricResult gleu(const std::vector<TokenSeq>& sources,
                  const std::vector<TokenSeq>& hyps,
                  const std::vector<std::vector<TokenSeq>>& refs,
                  const GleuOptions& options) {
  check_corpus_shape(sources, hyps, refs, "gleu");
  if (options.n_max < 1) throw UsageError("gleu: n_max must be >= 1");
  if (options.iterations < 1) throw UsageError("gleu: iterations must be >= 1");

  const std::size_t n_sent = sources.size();
  const std::size_t n_refs = refs.size();
  const std::size_t n_max = static_cast<std::size_t>(options.n_max);

  std::vector<GleuCache> cache(n_sent);
  run_chunked(n_sent, options.threads, [&](std::size_t i) {
    GleuCache& sg = cache[i];
    sg.hyp_len = static_cast<long long>(hyps[i].size());
    sg.num.assign(n_refs, std::vector<long long>(n_max, 0));
    sg.den.assign(n_refs, std::vector<long long>(n_max, 0));
    sg.ref_len.resize(n_refs);
    for (std::size_t j = 0; j < n_refs; ++j) {
      sg.ref_len[j] = static_cast<long long>(refs[j][i].size());
      for (std::size_t k = 0; k < n_max; ++k) {
        const NGramVenn v =
            venn_counts(sources[i], hyps[i], refs[j][i], static_cast<int>(k + 1));
        sg.num[j][k] = clamp0(v.ti + v.tk - v.ud);
        sg.den[j][k] = v.ti + v.tk + v.oi + v.ud;
      }
    }
  });

  std::mt19937_64 rng(options.seed);
  double total = 0.0;
  std::vector<long long> num(n_max), den(n_max);
  for (int it = 0; it < options.iterations; ++it) {
    std::fill(num.begin(), num.end(), 0);
    std::fill(den.begin(), den.end(), 0);
    long long r_total = 0;
    long long c_total = 0;
    for (std::size_t i = 0; i < n_sent; ++i) {
      const std::size_t j =
          n_refs == 1 ? 0 : static_cast<std::size_t>(rng() % n_refs);
      for (std::size_t k = 0; k < n_max; ++k) {
        num[k] += cache[i].num[j][k];
        den[k] += cache[i].den[j][k];
      }
      r_total += cache[i].ref_len[j];
      c_total += cache[i].hyp_len;
    }
    total += gleu_from_counts(num, den, r_total, c_total);
  }

  MetricResult result;
  result.corpus_score = total / options.iterations;
  result.sentence_scores.reserve(n_sent);
  for (std::size_t i = 0; i < n_sent; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n_refs; ++j)
      acc += gleu_from_counts(cache[i].num[j], cache[i].den[j],
                              cache[i].ref_len[j], cache[i].hyp_len);
    result.sentence_scores.push_back(acc / static_cast<double>(n_refs));
  }
  return result;
}

double green_precision(const NGramVenn& v) {
  const long long num = v.ti + v.td + v.tk;
  const long long den = num + v.oi + v.od;
  return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
}

double green_recall(const NGramVenn& v) {
  const long long num = v.ti + v.td + v.tk;
  const long long den = num + v.ui + v.ud;
  return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
}

namespace {

double geo_mean(const std::vector<double>& xs) {
  double log_sum = 0.0;
  for (const double x : xs) {
    if (x == 0.0) return 0.0;
    log_sum += std::log(x);
  }
  return xs.empty() ? 1.0 : std::exp(log_sum / static_cast<double>(xs.size()));
}

double green_score(const std::vector<NGramVenn>& per_n, double beta) {
  std::vector<double> ps, rs;
  ps.reserve(per_n.size());
  rs.reserve(per_n.size());
  for (const NGramVenn& v : per_n) {
    ps.push_back(green_precision(v));
    rs.push_back(green_recall(v));
  }
  return f_beta(geo_mean(ps), geo_mean(rs), beta);
}

}  // namespace

MetricResult green(const std::vector<TokenSeq>& sources,
                   const std::vector<TokenSeq>& hyps,
                   const std::vector<std::vector<TokenSeq>>& refs,
                   const GreenOptions& options) {
  check_corpus_shape(sources, hyps, refs, "green");
  if (options.n_max < 1) throw UsageError("green: n_max must be >= 1");

  const std::size_t n_sent = sources.size();
  const std::size_t n_refs = refs.size();
  const std::size_t n_max = static_cast<std::size_t>(options.n_max);

  auto empty_counts = [&]() {
    std::vector<NGramVenn> v(n_max);
    for (std::size_t k = 0; k < n_max; ++k) v[k].n = static_cast<int>(k + 1);
    return v;
  };

  std::vector<NGramVenn> pooled_best = empty_counts();
  std::vector<std::vector<NGramVenn>> pooled_per_ref(n_refs, empty_counts());

  MetricResult result;
  result.sentence_scores.reserve(n_sent);
  for (std::size_t i = 0; i < n_sent; ++i) {
    double best_f = -1.0;
    std::vector<NGramVenn> best_counts;
    double f_sum = 0.0;
    for (std::size_t j = 0; j < n_refs; ++j) {
      std::vector<NGramVenn> per_n = empty_counts();
      for (std::size_t k = 0; k < n_max; ++k)
        per_n[k] = venn_counts(sources[i], hyps[i], refs[j][i],
                               static_cast<int>(k + 1));
      const double f = green_score(per_n, options.beta);
      f_sum += f;
      if (f > best_f) {
        best_f = f;
        best_counts = per_n;
      }
      if (options.ref_mode == GreenRefMode::kAverage)
        for (std::size_t k = 0; k < n_max; ++k)
          pooled_per_ref[j][k] += per_n[k];
    }
    if (options.ref_mode == GreenRefMode::kBestReference) {
      for (std::size_t k = 0; k < n_max; ++k) pooled_best[k] += best_counts[k];
      result.sentence_scores.push_back(best_f);
    } else {
      result.sentence_scores.push_back(f_sum / static_cast<double>(n_refs));
    }
  }

  if (options.ref_mode == GreenRefMode::kBestReference) {
    result.corpus_score = green_score(pooled_best, options.beta);
  } else {
    double acc = 0.0;
    for (std::size_t j = 0; j < n_refs; ++j)
      acc += green_score(pooled_per_ref[j], options.beta);
    result.corpus_score = acc / static_cast<double>(n_refs);
  }
  return result;
}

}  // namespace gecmetrics
