#include "gecmetrics/sentence_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "gecmetrics/align.hpp"
#include "httplib.h"
#include "json.hpp"

namespace gecmetrics {

namespace {

using nlohmann::json;

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos)
    throw UsageError("endpoint must be an http:// or https:// URL: " + url);
  const auto path = url.find('/', scheme + 3);
  if (path == std::string::npos) return {url, "/"};
  return {url.substr(0, path), url.substr(path)};
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

double parse_full_double(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParseError(where + ": not a number: '" + text + "'");
  }
  if (used != text.size())
    throw ParseError(where + ": trailing characters in number: '" + text + "'");
  return value;
}

std::size_t parse_full_index(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  unsigned long value = 0;
  try {
    value = std::stoul(text, &used);
  } catch (const std::exception&) {
    throw ParseError(where + ": not an index: '" + text + "'");
  }
  if (used != text.size())
    throw ParseError(where + ": trailing characters in index: '" + text + "'");
  return static_cast<std::size_t>(value);
}

std::size_t levenshtein_distance(const std::string& a, const std::string& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

httplib::Headers auth_headers(const std::string& api_key_env) {
  httplib::Headers headers;
  if (!api_key_env.empty()) {
    const char* key = std::getenv(api_key_env.c_str());
    if (key != nullptr && *key != '\0')
      headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  return headers;
}

}  // namespace

double TablePerplexity::perplexity(const std::string& sentence) {
  const auto it = table_.find(sentence);
  if (it == table_.end())
    throw Error("no perplexity entry for sentence: '" + sentence + "'");
  return it->second;
}

TablePerplexity load_perplexity_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open perplexity file: " + path);
  std::map<std::string, double> table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    const std::string where = path + ":" + std::to_string(lineno);
    if (fields.size() != 2)
      throw ParseError(where + ": expected 2 tab-separated fields, got " +
                       std::to_string(fields.size()));
    table[fields[0]] = parse_full_double(fields[1], where);
  }
  return TablePerplexity(std::move(table));
}

double HttpPerplexity::perplexity(const std::string& sentence) {
  const SplitUrl url = split_url(endpoint_);
  httplib::Client client(url.base);
  client.set_connection_timeout(timeout_seconds_);
  client.set_read_timeout(timeout_seconds_);

  json body;
  body["sentence"] = sentence;
  const auto res = client.Post(url.path, body.dump(), "application/json");
  if (!res)
    throw Error("perplexity endpoint unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw Error("perplexity endpoint returned status " + std::to_string(res->status));
  try {
    const json reply = json::parse(res->body);
    return reply.at("perplexity").get<double>();
  } catch (const json::exception& e) {
    throw Error(std::string("bad perplexity response: ") + e.what());
  }
}

double levenshtein_ratio(const std::string& a, const std::string& b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein_distance(a, b)) /
                   static_cast<double>(longest);
}

double token_sort_ratio(const TokenSeq& a, const TokenSeq& b) {
  std::vector<std::string> ta = a.tokens();
  std::vector<std::string> tb = b.tokens();
  std::sort(ta.begin(), ta.end());
  std::sort(tb.begin(), tb.end());
  return levenshtein_ratio(TokenSeq(ta).join(), TokenSeq(tb).join());
}

MetricResult scribendi(const std::vector<TokenSeq>& sources,
                       const std::vector<TokenSeq>& hyps,
                       PerplexityProvider& ppl,
                       double threshold) {
  if (sources.size() != hyps.size())
    throw UsageError("scribendi needs one hypothesis per source");

  MetricResult result;
  double total = 0.0;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    double score;
    if (hyps[i] == sources[i]) {
      score = 0.0;
    } else {
      double ppl_src, ppl_hyp;
      try {
        ppl_src = ppl.perplexity(sources[i].join());
        ppl_hyp = ppl.perplexity(hyps[i].join());
      } catch (const std::exception& e) {
        throw Error("sentence " + std::to_string(i) + ": " + e.what());
      }
      if (ppl_hyp >= ppl_src) {
        score = -1.0;
      } else {
        const double ratio = std::max(levenshtein_ratio(sources[i].join(), hyps[i].join()),
                                      token_sort_ratio(sources[i], hyps[i]));
        score = ratio >= threshold ? 1.0 : -1.0;
      }
    }
    result.sentence_scores.push_back(score);
    total += score;
  }
  result.corpus_score = total;
  return result;
}

double ExternalScoreTable::score(const std::string& system,
                                 std::size_t sentence_index) const {
  const auto it = scores_.find({system, sentence_index});
  if (it == scores_.end())
    throw Error("no external score for (" + system + ", " +
                std::to_string(sentence_index) + ")");
  return it->second;
}

bool ExternalScoreTable::has(const std::string& system,
                             std::size_t sentence_index) const {
  return scores_.count({system, sentence_index}) > 0;
}

std::vector<double> ExternalScoreTable::scores_for(const std::string& system,
                                                   std::size_t n_sentences) const {
  std::vector<double> out;
  out.reserve(n_sentences);
  for (std::size_t i = 0; i < n_sentences; ++i) out.push_back(score(system, i));
  return out;
}

ExternalScoreTable load_external_scores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open score file: " + path);
  std::map<std::pair<std::string, std::size_t>, double> scores;
  std::size_t duplicates = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    const std::string where = path + ":" + std::to_string(lineno);
    if (fields.size() != 3)
      throw ParseError(where + ": expected 3 tab-separated fields, got " +
                       std::to_string(fields.size()));
    const std::pair<std::string, std::size_t> key{
        fields[0], parse_full_index(fields[1], where)};
    const double value = parse_full_double(fields[2], where);
    if (scores.count(key) > 0) ++duplicates;
    scores[key] = value;
  }
  return ExternalScoreTable(std::move(scores), duplicates);
}

std::string llm_prompt(const std::string& source,
                       const std::vector<std::string>& targets) {
  std::ostringstream out;
  out << "The goal of this task is to rank the presented targets based on the "
         "quality of the sentences.\n\n"
         "After reading the source sentence and target sentences, please assign "
         "a score from a minimum of 1 point to a maximum of 5 points to each "
         "target based on the quality of the sentence (note that you can assign "
         "the same score multiple times).\n\n"
         "# source\n\n"
      << source << "\n\n# targets\n\n";
  for (std::size_t i = 0; i < targets.size(); ++i)
    out << i << ". " << targets[i] << "\n";
  return out.str();
}

std::string render_edit_sequence(const TokenSeq& source, const TokenSeq& hyp) {
  const EditSet edits = extract_edits(source, hyp);
  if (edits.edits.empty()) return "no edits";
  std::ostringstream out;
  for (std::size_t i = 0; i < edits.edits.size(); ++i) {
    const Edit& e = edits.edits[i];
    if (i > 0) out << "; ";
    std::string span;
    for (std::size_t t = e.src_start; t < e.src_end; ++t) {
      if (!span.empty()) span += ' ';
      span += source.tokens()[t];
    }
    std::string replacement;
    for (const auto& token : e.replacement) {
      if (!replacement.empty()) replacement += ' ';
      replacement += token;
    }
    out << '[' << span << " → " << replacement << ']';
  }
  return out.str();
}

namespace {

// One judging request; returns the parsed index-to-score map or throws.
std::map<std::size_t, int> request_scores(const LlmJudgeConfig& cfg,
                                          const std::string& prompt,
                                          std::size_t n_targets) {
  const SplitUrl url = split_url(cfg.endpoint);
  httplib::Client client(url.base);
  client.set_connection_timeout(cfg.timeout_seconds);
  client.set_read_timeout(cfg.timeout_seconds);

  json body;
  body["model"] = cfg.model;
  body["messages"] = json::array({json{{"role", "user"}, {"content", prompt}}});
  body["response_format"] = json{{"type", "json_object"}};
  body["temperature"] = 0;

  const auto res = client.Post(url.path, auth_headers(cfg.api_key_env), body.dump(),
                               "application/json");
  if (!res) throw Error("endpoint unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw Error("endpoint returned status " + std::to_string(res->status));

  json content;
  try {
    const json reply = json::parse(res->body);
    content = json::parse(
        reply.at("choices").at(0).at("message").at("content").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(std::string("bad judge response: ") + e.what());
  }
  if (!content.is_object()) throw Error("judge response is not a JSON object");

  std::map<std::size_t, int> scores;
  for (std::size_t i = 0; i < n_targets; ++i) {
    const std::string key = std::to_string(i);
    if (!content.contains(key))
      throw Error("judge response missing target " + key);
    const json& value = content.at(key);
    if (!value.is_number_integer())
      throw Error("score for target " + key + " is not an integer");
    const int score = value.get<int>();
    if (score < 1 || score > 5)
      throw Error("score " + std::to_string(score) + " for target " + key +
                  " outside 1..5");
    scores[i] = score;
  }
  return scores;
}

}  // namespace

std::map<std::string, MetricResult> llm_judge(
    const std::vector<TokenSeq>& sources,
    const std::map<std::string, std::vector<TokenSeq>>& hyps_per_system,
    const LlmJudgeConfig& cfg) {
  if (hyps_per_system.empty()) throw UsageError("llm_judge needs at least one system");
  for (const auto& [system, hyps] : hyps_per_system) {
    if (hyps.size() != sources.size())
      throw UsageError("system " + system + " has " + std::to_string(hyps.size()) +
                       " hypotheses, expected " + std::to_string(sources.size()));
  }
  if (cfg.retries < 0) throw UsageError("retry count must be non-negative");

  const double missing = std::numeric_limits<double>::quiet_NaN();
  std::map<std::string, std::vector<double>> sentence_scores;
  for (const auto& [system, hyps] : hyps_per_system)
    sentence_scores[system] = std::vector<double>(sources.size(), missing);

  for (std::size_t i = 0; i < sources.size(); ++i) {
    // frequency = number of systems producing the hypothesis
    std::map<std::string, int> freq;
    std::map<std::string, const TokenSeq*> tokens_of;
    for (const auto& [system, hyps] : hyps_per_system) {
      const std::string text = hyps[i].join();
      ++freq[text];
      tokens_of.emplace(text, &hyps[i]);
    }

    std::vector<std::string> unique_texts;
    for (const auto& [text, count] : freq) unique_texts.push_back(text);
    std::stable_sort(unique_texts.begin(), unique_texts.end(),
                     [&](const std::string& a, const std::string& b) {
                       if (freq[a] != freq[b]) return freq[a] > freq[b];
                       return a < b;
                     });
    if (unique_texts.size() > kLlmMaxTargets) unique_texts.resize(kLlmMaxTargets);

    std::vector<std::string> targets;
    for (const auto& text : unique_texts)
      targets.push_back(cfg.mode == LlmMode::kSentence
                            ? text
                            : render_edit_sequence(sources[i], *tokens_of[text]));

    const std::string prompt = llm_prompt(sources[i].join(), targets);

    std::map<std::size_t, int> scores;
    std::string last_error;
    bool ok = false;
    for (int attempt = 0; attempt <= cfg.retries && !ok; ++attempt) {
      try {
        scores = request_scores(cfg, prompt, targets.size());
        ok = true;
      } catch (const Error& e) {
        last_error = e.what();
      }
    }
    if (!ok)
      throw Error("source " + std::to_string(i) + ": " + last_error);

    for (const auto& [system, hyps] : hyps_per_system) {
      const std::string text = hyps[i].join();
      for (std::size_t t = 0; t < unique_texts.size(); ++t) {
        if (unique_texts[t] == text) {
          sentence_scores[system][i] = static_cast<double>(scores.at(t));
          break;
        }
      }
    }
  }

  std::map<std::string, MetricResult> results;
  for (auto& [system, scores] : sentence_scores) {
    MetricResult r;
    double total = 0.0;
    std::size_t available = 0;
    for (const double s : scores) {
      if (!std::isnan(s)) {
        total += s;
        ++available;
      }
    }
    r.corpus_score = available > 0 ? total / static_cast<double>(available) : missing;
    r.sentence_scores = std::move(scores);
    results.emplace(system, std::move(r));
  }
  return results;
}

}  // namespace gecmetrics
