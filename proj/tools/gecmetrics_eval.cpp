#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "common.hpp"

using namespace gecmetrics;
using cli::json;

int main(int argc, char** argv) {
  CLI::App app{"Score hypothesis files against references with a GEC metric"};
  app.get_formatter()->column_width(28);

  std::string src_path;
  std::vector<std::string> hyp_paths;
  std::vector<std::string> ref_paths;
  std::string metric_flag;
  std::string config_path;
  std::string out_path = "-";

  app.add_option("--src", src_path, "Source sentences, one per line")->required();
  app.add_option("--hyps", hyp_paths, "Hypothesis files, one per system")
      ->required()
      ->expected(-1);
  app.add_option("--refs", ref_paths, "Reference files")->expected(-1);
  app.add_option("--metric", metric_flag, "Metric id (overrides the config)");
  app.add_option("--config", config_path, "YAML configuration file");
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

    const std::vector<TokenSeq> sources = cli::read_token_file(src_path);

    std::vector<std::vector<TokenSeq>> hyps;
    std::vector<std::string> names;
    for (const auto& path : hyp_paths) {
      hyps.push_back(cli::read_token_file(path));
      cli::require_aligned(path, hyps.back().size(), src_path, sources.size());
      names.push_back(std::filesystem::path(path).stem().string());
    }
    for (std::size_t i = 0; i < names.size(); ++i)
      for (std::size_t j = i + 1; j < names.size(); ++j)
        if (names[i] == names[j])
          throw UsageError("two hypothesis files share the system name '" +
                           names[i] + "'");

    std::vector<std::vector<TokenSeq>> refs;
    for (const auto& path : ref_paths) {
      refs.push_back(cli::read_token_file(path));
      cli::require_aligned(path, refs.back().size(), src_path, sources.size());
    }

    std::vector<std::pair<std::string, const std::vector<TokenSeq>*>> systems;
    for (std::size_t i = 0; i < hyps.size(); ++i) systems.emplace_back(names[i], &hyps[i]);

    const std::vector<MetricResult> scored =
        cli::score_systems(sources, refs, systems, config);

    json output;
    output["metric"] = config.metric;
    output["version"] = kVersion;
    output["seed"] = config.seed;
    output["config"] = cli::config_json(config);
    output["corpus_score"] = cli::score_or_null(scored[0].corpus_score);
    json first_scores = json::array();
    for (double s : scored[0].sentence_scores) first_scores.push_back(cli::score_or_null(s));
    output["sentence_scores"] = first_scores;
    json results = json::array();
    for (std::size_t i = 0; i < scored.size(); ++i) {
      json entry;
      entry["hyp"] = hyp_paths[i];
      entry["system"] = names[i];
      entry["corpus_score"] = cli::score_or_null(scored[i].corpus_score);
      json sentence_scores = json::array();
      for (double s : scored[i].sentence_scores)
        sentence_scores.push_back(cli::score_or_null(s));
      entry["sentence_scores"] = sentence_scores;
      results.push_back(entry);
    }
    output["results"] = results;

    cli::write_output(out_path, output.dump(2) + "\n");
    return 0;
  });
}
