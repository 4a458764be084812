#include "gecmetrics/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include <yaml-cpp/yaml.h>

namespace fs = std::filesystem;

namespace gecmetrics {

namespace {

std::vector<TokenSeq> read_sentences(const std::string& path, std::size_t expected,
                                     const std::string& expected_from) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.size() != expected)
    throw Error(path + " has " + std::to_string(lines.size()) + " lines, expected " +
                std::to_string(expected) + " (from " + expected_from + ")");
  std::vector<TokenSeq> sentences;
  sentences.reserve(lines.size());
  for (const auto& line : lines) sentences.push_back(TokenSeq(tokenize(line)));
  return sentences;
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

long parse_long(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(text, &used);
  } catch (const std::exception&) {
    throw ParseError(where + ": not an integer: '" + text + "'");
  }
  if (used != text.size())
    throw ParseError(where + ": trailing characters in integer: '" + text + "'");
  return value;
}

}  // namespace

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

MetaDataset load_meta_dataset(const std::string& root,
                              const TrueSkillOptions& trueskill_options) {
  const fs::path base(root);
  if (!fs::is_directory(base)) throw Error("dataset root is not a directory: " + root);

  MetaDataset dataset;

  const fs::path sources_path = base / "sources.txt";
  const std::vector<std::string> source_lines = read_lines(sources_path.string());
  for (const auto& line : source_lines) dataset.sources.push_back(TokenSeq(tokenize(line)));
  const std::size_t n_sources = dataset.sources.size();

  const fs::path refs_dir = base / "references";
  if (fs::is_directory(refs_dir)) {
    std::size_t txt_files = 0;
    for (const auto& entry : fs::directory_iterator(refs_dir))
      if (entry.path().extension() == ".txt") ++txt_files;
    for (std::size_t i = 0;; ++i) {
      const fs::path ref = refs_dir / ("ref" + std::to_string(i) + ".txt");
      if (!fs::exists(ref)) break;
      dataset.references.push_back(
          read_sentences(ref.string(), n_sources, sources_path.string()));
    }
    if (dataset.references.size() != txt_files)
      throw Error(refs_dir.string() +
                  ": reference files must be named ref0.txt, ref1.txt, ... "
                  "consecutively");
  }

  const fs::path systems_dir = base / "systems";
  if (!fs::is_directory(systems_dir))
    throw Error("missing systems/ directory under " + root);
  std::vector<fs::path> system_files;
  for (const auto& entry : fs::directory_iterator(systems_dir))
    if (entry.path().extension() == ".txt") system_files.push_back(entry.path());
  std::sort(system_files.begin(), system_files.end());
  if (system_files.empty())
    throw Error("no system outputs (*.txt) under " + systems_dir.string());
  for (const auto& file : system_files) {
    dataset.systems[file.stem().string()] =
        read_sentences(file.string(), n_sources, sources_path.string());
    dataset.judgments.systems.push_back(file.stem().string());
  }

  const fs::path manifest_path = base / "manifest.yaml";
  YAML::Node manifest;
  try {
    manifest = YAML::LoadFile(manifest_path.string());
  } catch (const YAML::Exception& e) {
    throw Error(manifest_path.string() + ": " + e.what());
  }
  if (!manifest.IsMap()) throw Error(manifest_path.string() + ": must be a mapping");
  dataset.name = base.filename().string();
  bool gold_seen = false;
  for (const auto& entry : manifest) {
    const std::string key = entry.first.as<std::string>();
    if (key == "name") {
      dataset.name = entry.second.as<std::string>();
    } else if (key == "gold") {
      const std::string gold = entry.second.as<std::string>();
      if (gold == "expected_wins")
        dataset.gold_aggregation = GoldAggregation::kExpectedWins;
      else if (gold == "trueskill")
        dataset.gold_aggregation = GoldAggregation::kTrueSkill;
      else
        throw Error(manifest_path.string() +
                    ": gold must be 'expected_wins' or 'trueskill', got '" + gold + "'");
      gold_seen = true;
    } else if (key == "configuration") {
      dataset.judgments.config_label = entry.second.as<std::string>();
    } else {
      throw Error(manifest_path.string() + ": unknown key '" + key + "'");
    }
  }
  if (!gold_seen) throw Error(manifest_path.string() + ": missing 'gold' key");

  const fs::path judgments_path = base / "judgments.tsv";
  const std::vector<std::string> rows = read_lines(judgments_path.string());
  dataset.judgments.per_source_rankings.assign(n_sources, {});
  for (std::size_t lineno = 1; lineno <= rows.size(); ++lineno) {
    const std::string& row = rows[lineno - 1];
    if (row.empty()) continue;
    const std::string where = judgments_path.string() + ":" + std::to_string(lineno);
    const auto fields = split_tabs(row);
    if (fields.size() != 3)
      throw ParseError(where + ": expected 3 tab-separated fields, got " +
                       std::to_string(fields.size()));
    const long index = parse_long(fields[0], where);
    if (index < 0 || static_cast<std::size_t>(index) >= n_sources)
      throw ParseError(where + ": source index " + fields[0] + " outside 0.." +
                       std::to_string(n_sources - 1));
    if (dataset.systems.count(fields[1]) == 0)
      throw ParseError(where + ": unknown system '" + fields[1] + "'");
    const long rank = parse_long(fields[2], where);
    if (rank < 1) throw ParseError(where + ": rank must be at least 1");
    auto& ranking = dataset.judgments.per_source_rankings[static_cast<std::size_t>(index)];
    if (ranking.count(fields[1]) > 0)
      throw ParseError(where + ": duplicate judgment for system '" + fields[1] + "'");
    ranking[fields[1]] = static_cast<int>(rank);
  }

  try {
    dataset.judgments.validate();
  } catch (const std::exception& e) {
    throw Error(judgments_path.string() + ": " + e.what());
  }

  dataset.judgments.system_gold =
      gold_scores(dataset.judgments, dataset.gold_aggregation, trueskill_options);
  return dataset;
}

}  // namespace gecmetrics
