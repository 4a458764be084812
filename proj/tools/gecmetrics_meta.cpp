#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "common.hpp"
#include "gecmetrics/analysis.hpp"
#include "gecmetrics/meta_eval.hpp"

using namespace gecmetrics;
using cli::json;

namespace {

std::string aggregation_name(GoldAggregation aggregation) {
  switch (aggregation) {
    case GoldAggregation::kAverage:
      return "average";
    case GoldAggregation::kExpectedWins:
      return "expected_wins";
    case GoldAggregation::kTrueSkill:
      return "trueskill";
  }
  return "?";
}

json optional_json(const std::optional<double>& value) {
  if (!value) return nullptr;
  return *value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meta-evaluate a GEC metric against human judgments"};
  app.get_formatter()->column_width(28);

  std::string dataset_root;
  std::string metric_flag;
  std::string config_path;
  std::string level = "both";
  std::string aggregation_flag;
  std::string analysis = "none";
  int window = 4;
  std::string csv_dir;
  std::string out_path = "-";

  app.add_option("--dataset", dataset_root, "Dataset root directory")->required();
  app.add_option("--metric", metric_flag, "Metric id (overrides the config)");
  app.add_option("--config", config_path, "YAML configuration file");
  app.add_option("--level", level, "Correlation level")
      ->check(CLI::IsMember({"system", "sentence", "both"}));
  app.add_option("--aggregation", aggregation_flag,
                 "Gold aggregation (defaults to the manifest's)")
      ->check(CLI::IsMember({"average", "expected_wins", "trueskill"}));
  app.add_option("--analysis", analysis, "Extra analysis tables")
      ->check(CLI::IsMember({"none", "window", "pairwise", "both"}));
  app.add_option("--window", window, "Window size for the window analysis");
  app.add_option("--csv-dir", csv_dir, "Directory for window.csv / pairwise.csv");
  app.add_option("--out", out_path, "Output path, - for standard output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  return cli::run_cli([&]() {
    EvalConfig config;
    if (!config_path.empty()) config = load_config(config_path);
    if (!metric_flag.empty()) config.metric = metric_flag;
    validate_config(config);

    const TrueSkillOptions ts_options{.seed = config.seed,
                                      .passes = config.trueskill_passes};
    const MetaDataset dataset = load_meta_dataset(dataset_root, ts_options);

    GoldAggregation aggregation = dataset.gold_aggregation;
    if (aggregation_flag == "average")
      aggregation = GoldAggregation::kAverage;
    else if (aggregation_flag == "expected_wins")
      aggregation = GoldAggregation::kExpectedWins;
    else if (aggregation_flag == "trueskill")
      aggregation = GoldAggregation::kTrueSkill;

    std::vector<std::pair<std::string, const std::vector<TokenSeq>*>> systems;
    for (const auto& name : dataset.judgments.systems)
      systems.emplace_back(name, &dataset.systems.at(name));
    const std::vector<MetricResult> scored =
        cli::score_systems(dataset.sources, dataset.references, systems, config);

    // Unscored systems (NaN corpus) are left out of the correlation inputs;
    // lower-is-better metrics are negated once here so every downstream
    // comparison sees a higher-is-better orientation.
    const double sign = config.higher_is_better ? 1.0 : -1.0;
    std::map<std::string, double> corpus_scores;
    std::map<std::string, double> oriented_corpus;
    std::map<std::string, std::vector<double>> oriented_sentences;
    for (std::size_t i = 0; i < systems.size(); ++i) {
      const std::string& name = systems[i].first;
      if (!std::isnan(scored[i].corpus_score)) {
        corpus_scores[name] = scored[i].corpus_score;
        oriented_corpus[name] = sign * scored[i].corpus_score;
      }
      std::vector<double> oriented = scored[i].sentence_scores;
      for (double& s : oriented) s *= sign;
      oriented_sentences[name] = std::move(oriented);
    }

    json output;
    output["dataset"] = dataset.name;
    output["metric"] = config.metric;
    output["version"] = kVersion;
    output["seed"] = config.seed;
    output["config"] = cli::config_json(config);
    output["gold"] = aggregation_name(aggregation);
    output["config_label"] = dataset.judgments.config_label;
    output["systems"] = dataset.judgments.systems;
    json system_scores;
    for (std::size_t i = 0; i < systems.size(); ++i)
      system_scores[systems[i].first] = cli::score_or_null(scored[i].corpus_score);
    output["system_scores"] = system_scores;
    json gold_json;
    for (const auto& [name, value] : gold_scores(dataset.judgments, aggregation, ts_options))
      gold_json[name] = value;
    output["gold_scores"] = gold_json;

    if (level == "system" || level == "both") {
      const CorrResult corr = corr_system(corpus_scores, dataset.judgments, aggregation,
                                          config.higher_is_better, ts_options);
      output["system_level"] = {{"pearson", optional_json(corr.pearson)},
                                {"spearman", optional_json(corr.spearman)}};
    }
    if (level == "sentence" || level == "both") {
      const SentencePairPolicy policy{.metric_ties_in_denominator =
                                          config.metric_ties_in_denominator};
      const CorrResult corr = corr_sentence(oriented_sentences, dataset.judgments, policy);
      output["sentence_level"] = {{"accuracy", optional_json(corr.accuracy)},
                                  {"kendall", optional_json(corr.kendall)}};
    }

    const bool want_window = analysis == "window" || analysis == "both";
    const bool want_pairwise = analysis == "pairwise" || analysis == "both";
    if (!csv_dir.empty() && (want_window || want_pairwise))
      std::filesystem::create_directories(csv_dir);

    if (want_window) {
      const auto rows = window_analysis(oriented_corpus, dataset.judgments, window);
      json rows_json = json::array();
      for (const auto& row : rows)
        rows_json.push_back({{"start_rank", row.start_rank},
                             {"pearson", optional_json(row.pearson)},
                             {"spearman", optional_json(row.spearman)},
                             {"window", row.window}});
      output["window_analysis"] = rows_json;
      if (!csv_dir.empty())
        cli::write_output((std::filesystem::path(csv_dir) / "window.csv").string(),
                          window_csv(rows));
    }
    if (want_pairwise) {
      const auto cells = pairwise_analysis(oriented_sentences, dataset.judgments);
      json cells_json = json::array();
      for (const auto& cell : cells)
        cells_json.push_back({{"rank_a", cell.rank_a},
                              {"rank_b", cell.rank_b},
                              {"agreement", cell.agreement},
                              {"pair_count", cell.pair_count}});
      output["pairwise_analysis"] = cells_json;
      if (!csv_dir.empty())
        cli::write_output((std::filesystem::path(csv_dir) / "pairwise.csv").string(),
                          pairwise_csv(cells));
    }

    cli::write_output(out_path, output.dump(2) + "\n");
    return 0;
  });
}
