#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "gecmetrics/align.hpp"
#include "gecmetrics/core.hpp"
#include "gecmetrics/edit_metrics.hpp"

using namespace gecmetrics;

namespace {

std::vector<TokenSeq> repeat(const std::string& line, std::size_t n) {
  return std::vector<TokenSeq>(n, tokenize(line));
}

}  // namespace

TEST_CASE("uniform F_0.5 on the 100-sentence toy corpus") {
  const auto sources = repeat("He go to the school .", 100);
  const auto hyps = repeat("He goes to the school .", 100);
  const std::vector<std::vector<TokenSeq>> refs = {
      repeat("He goes to school .", 100)};

  const UniformWeights w;
  const auto scores = score_edit_level_detailed(sources, hyps, refs, 0.5, w);
  CHECK(scores.corpus.precision == doctest::Approx(1.0));
  CHECK(scores.corpus.recall == doctest::Approx(0.5));
  CHECK(scores.corpus.f_beta == doctest::Approx(0.8333333333).epsilon(1e-7));
  REQUIRE(scores.sentences.size() == 100);
  for (const auto& s : scores.sentences)
    CHECK(s.f_beta == doctest::Approx(0.8333333333).epsilon(1e-7));
}

TEST_CASE("perfect hypotheses score 1.0") {
  const auto sources = repeat("He go to the school .", 3);
  const auto refs = repeat("He goes to school .", 3);
  const auto scores = score_edit_level_detailed(sources, refs, {refs}, 0.5,
                                                UniformWeights{});
  CHECK(scores.corpus.f_beta == doctest::Approx(1.0));
  CHECK(scores.corpus.precision == doctest::Approx(1.0));
  CHECK(scores.corpus.recall == doctest::Approx(1.0));
}

TEST_CASE("empty-side conventions") {
  const std::vector<TokenSeq> src = {tokenize("a b c")};

  SUBCASE("neither side edits: do-nothing is correct") {
    const auto s = score_edit_level_detailed(src, src, {src}, 0.5,
                                             UniformWeights{});
    CHECK(s.sentences[0].precision == doctest::Approx(1.0));
    CHECK(s.sentences[0].recall == doctest::Approx(1.0));
    CHECK(s.sentences[0].f_beta == doctest::Approx(1.0));
  }
  SUBCASE("hypothesis silent, reference edits: P=1, R=0") {
    const std::vector<TokenSeq> ref = {tokenize("a x c")};
    const auto s =
        score_edit_level_detailed(src, src, {ref}, 0.5, UniformWeights{});
    CHECK(s.sentences[0].precision == doctest::Approx(1.0));
    CHECK(s.sentences[0].recall == doctest::Approx(0.0));
    CHECK(s.sentences[0].f_beta == doctest::Approx(0.0));
  }
  SUBCASE("hypothesis edits, reference silent: P=0, R=1") {
    const std::vector<TokenSeq> hyp = {tokenize("a x c")};
    const auto s =
        score_edit_level_detailed(src, hyp, {src}, 0.5, UniformWeights{});
    CHECK(s.sentences[0].precision == doctest::Approx(0.0));
    CHECK(s.sentences[0].recall == doctest::Approx(1.0));
    CHECK(s.sentences[0].f_beta == doctest::Approx(0.0));
  }
}

TEST_CASE("corpus score pools counts instead of averaging sentence scores") {
  const std::vector<TokenSeq> src = {tokenize("He go to the school ."),
                                     tokenize("a b c")};
  const std::vector<TokenSeq> hyp = {tokenize("He goes to the school ."),
                                     tokenize("x b z")};
  const std::vector<TokenSeq> ref = {tokenize("He goes to school ."),
                                     tokenize("x b c")};

  const auto s =
      score_edit_level_detailed(src, hyp, {ref}, 0.5, UniformWeights{});
  // Pooled counts: tp=2, hyp mass=3, ref mass=3.
  CHECK(s.corpus.precision == doctest::Approx(2.0 / 3.0));
  CHECK(s.corpus.recall == doctest::Approx(2.0 / 3.0));
  CHECK(s.corpus.f_beta == doctest::Approx(2.0 / 3.0));
  // A sentence-score average would give (0.8333 + 0.5556) / 2 instead.
  CHECK(s.corpus.f_beta != doctest::Approx(0.69444).epsilon(1e-3));
}

TEST_CASE("input validation") {
  const auto src = repeat("a b", 2);
  CHECK_THROWS_AS(
      score_edit_level(src, repeat("a b", 1), {src}, 0.5, UniformWeights{}),
      UsageError);
  CHECK_THROWS_AS(score_edit_level(src, src, {}, 0.5, UniformWeights{}),
                  UsageError);
  CHECK_THROWS_AS(
      score_edit_level(src, src, {repeat("a b", 3)}, 0.5, UniformWeights{}),
      UsageError);
}

namespace {

// Pool of non-overlapping candidate edits along a random source; hypothesis
// and reference edit sets are random subsets, so intersections arise
// naturally and stay valid edit sets.
struct Instance {
  std::vector<std::string> source;
  std::vector<Edit> hyp;
  std::vector<Edit> ref;
  std::map<Edit, double> weights;
};

Instance make_instance(std::mt19937& rng) {
  const std::vector<std::string> alphabet = {"a", "b", "c", "d"};
  const std::vector<std::string> repl_pool = {"x", "y", "z"};
  std::uniform_int_distribution<std::size_t> src_len(3, 6);
  std::uniform_int_distribution<int> small(0, 2);
  std::uniform_real_distribution<double> weight(0.0, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Instance inst;
  const std::size_t n = src_len(rng);
  for (std::size_t i = 0; i < n; ++i)
    inst.source.push_back(alphabet[static_cast<std::size_t>(small(rng)) %
                                   alphabet.size()]);

  std::vector<Edit> pool;
  std::size_t pos = 0;
  while (pos <= n && pool.size() < 4) {
    pos += static_cast<std::size_t>(small(rng));
    if (pos > n) break;
    Edit e;
    e.src_start = pos;
    e.src_end = std::min(n, pos + static_cast<std::size_t>(small(rng)));
    const int repl_len = small(rng);
    for (int k = 0; k < repl_len; ++k)
      e.replacement.push_back(repl_pool[static_cast<std::size_t>(k)]);
    if (e.src_start == e.src_end && e.replacement.empty())
      e.replacement.push_back("x");
    const std::vector<std::string> span(inst.source.begin() + e.src_start,
                                        inst.source.begin() + e.src_end);
    if (span == e.replacement) e.replacement.push_back("q");
    pos = std::max(e.src_end, e.src_start + 1);
    if (unit(rng) < 0.7) inst.weights[e] = weight(rng);
    pool.push_back(std::move(e));
  }
  for (const Edit& e : pool) {
    if (unit(rng) < 0.6 && inst.hyp.size() < 3) inst.hyp.push_back(e);
    if (unit(rng) < 0.6 && inst.ref.size() < 3) inst.ref.push_back(e);
  }
  return inst;
}

double lookup(const Instance& inst, const Edit& e) {
  const auto it = inst.weights.find(e);
  return it == inst.weights.end() ? 1.0 : it->second;
}

// Direct transcription of the weighted P/R definition over explicit sets.
PRFScore enumeration_oracle(const Instance& inst, double beta) {
  double tp = 0.0, hyp_mass = 0.0, ref_mass = 0.0;
  for (const Edit& e : inst.hyp) {
    hyp_mass += lookup(inst, e);
    for (const Edit& r : inst.ref)
      if (edit_equal(e, r)) tp += lookup(inst, e);
  }
  for (const Edit& e : inst.ref) ref_mass += lookup(inst, e);

  PRFScore s;
  s.beta = beta;
  s.precision = hyp_mass > 0.0 ? tp / hyp_mass : 1.0;
  s.recall = ref_mass > 0.0 ? tp / ref_mass : 1.0;
  const double denom = beta * beta * s.precision + s.recall;
  s.f_beta = denom > 0.0
                 ? (1.0 + beta * beta) * s.precision * s.recall / denom
                 : 0.0;
  return s;
}

TableWeights instance_table(const Instance& inst, double scale = 1.0) {
  std::vector<std::pair<std::size_t, WeightedEdit>> entries;
  for (const auto& [edit, w] : inst.weights)
    entries.push_back({0, WeightedEdit{edit, w * scale}});
  return TableWeights(std::move(entries), scale);  // fallback scales too
}

}  // namespace

TEST_CASE("weighted P/R/F matches explicit set enumeration") {
  std::mt19937 rng(7031);
  for (int iter = 0; iter < 1000; ++iter) {
    const Instance inst = make_instance(rng);
    const PRFScore want = enumeration_oracle(inst, 0.5);
    const auto got = score_edit_level_from_edits({inst.hyp}, {{inst.ref}}, 0.5,
                                                 instance_table(inst));
    REQUIRE(got.sentences.size() == 1);
    CHECK(got.sentences[0].precision ==
          doctest::Approx(want.precision).epsilon(1e-12));
    CHECK(got.sentences[0].recall ==
          doctest::Approx(want.recall).epsilon(1e-12));
    CHECK(got.sentences[0].f_beta ==
          doctest::Approx(want.f_beta).epsilon(1e-12));
  }
}

TEST_CASE("constant weight scale cancels") {
  std::mt19937 rng(99);
  for (int iter = 0; iter < 100; ++iter) {
    const Instance inst = make_instance(rng);
    const auto base = score_edit_level_from_edits({inst.hyp}, {{inst.ref}}, 0.5,
                                                  instance_table(inst));
    const auto scaled = score_edit_level_from_edits(
        {inst.hyp}, {{inst.ref}}, 0.5, instance_table(inst, 2.5));
    CHECK(scaled.sentences[0].f_beta ==
          doctest::Approx(base.sentences[0].f_beta).epsilon(1e-12));

    const auto u1 = score_edit_level_from_edits({inst.hyp}, {{inst.ref}}, 0.5,
                                                UniformWeights{1.0});
    const auto u2 = score_edit_level_from_edits({inst.hyp}, {{inst.ref}}, 0.5,
                                                UniformWeights{3.7});
    CHECK(u1.sentences[0].precision ==
          doctest::Approx(u2.sentences[0].precision).epsilon(1e-12));
    CHECK(u1.sentences[0].recall ==
          doctest::Approx(u2.sentences[0].recall).epsilon(1e-12));
  }
}

TEST_CASE("adding a reference never lowers a sentence score") {
  std::mt19937 rng(411);
  for (int iter = 0; iter < 200; ++iter) {
    const Instance a = make_instance(rng);
    Instance b = make_instance(rng);

    const auto one = score_edit_level_from_edits({a.hyp}, {{a.ref}}, 0.5,
                                                 UniformWeights{});
    const auto two = score_edit_level_from_edits({a.hyp}, {{a.ref}, {b.ref}},
                                                 0.5, UniformWeights{});
    CHECK(two.sentences[0].f_beta >= one.sentences[0].f_beta - 1e-15);
  }
}

TEST_CASE("best reference tie keeps the lowest index") {
  // Both references give F=0, but ref0 with R=0 and ref1 with R=1; the
  // reported recall reveals which one was kept.
  const std::vector<TokenSeq> src = {tokenize("a b c")};
  const std::vector<TokenSeq> hyp = {tokenize("a b x")};
  const std::vector<TokenSeq> ref0 = {tokenize("y b c")};
  const std::vector<TokenSeq> ref1 = {tokenize("a b c")};
  const auto s = score_edit_level_detailed(src, hyp, {ref0, ref1}, 0.5,
                                           UniformWeights{});
  CHECK(s.sentences[0].f_beta == doctest::Approx(0.0));
  CHECK(s.sentences[0].recall == doctest::Approx(0.0));
}

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const auto dir = std::filesystem::temp_directory_path() / "gecmetrics_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

}  // namespace

TEST_CASE("load_edit_weights reads the tab-separated table") {
  const std::string path =
      write_temp("weights.tsv", "0\t1\t2\tgoes\t0.7\n1\t3\t4\t\t0\n");
  const TableWeights w = load_edit_weights(path);
  CHECK(w.weight(0, Edit{1, 2, {"goes"}}) == doctest::Approx(0.7));
  CHECK(w.weight(1, Edit{3, 4, {}}) == doctest::Approx(0.0));
  CHECK(w.weight(0, Edit{0, 1, {"nope"}}) == doctest::Approx(1.0));
  CHECK(w.weight(5, Edit{1, 2, {"goes"}}) == doctest::Approx(1.0));
}

TEST_CASE("load_edit_weights rejects bad files") {
  CHECK_THROWS_AS(load_edit_weights("/nonexistent/w.tsv"), ParseError);

  const std::string neg = write_temp("neg.tsv", "0\t1\t2\tgoes\t-1\n");
  CHECK_THROWS_AS(load_edit_weights(neg), Error);

  const std::string malformed = write_temp("short.tsv", "0\t1\t2\n");
  CHECK_THROWS_AS(load_edit_weights(malformed), ParseError);

  const std::string nonnum = write_temp("nonnum.tsv", "0\tx\t2\tgoes\t1\n");
  try {
    load_edit_weights(nonnum);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":1") != std::string::npos);
  }
}

TEST_CASE("external weights steer the score") {
  const auto sources = repeat("He go to the school .", 1);
  const auto hyps = repeat("He goes to the school .", 1);
  const std::vector<std::vector<TokenSeq>> refs = {
      repeat("He goes to school .", 1)};

  // Zero out the uncorrected deletion; the miss then costs no recall.
  const std::string path = write_temp("steer.tsv", "0\t3\t4\t\t0\n");
  const auto s =
      score_edit_level_detailed(sources, hyps, refs, 0.5,
                                load_edit_weights(path));
  CHECK(s.sentences[0].precision == doctest::Approx(1.0));
  CHECK(s.sentences[0].recall == doctest::Approx(1.0));
  CHECK(s.sentences[0].f_beta == doctest::Approx(1.0));
}

TEST_CASE("difficulty weights count systems that made each edit") {
  const std::vector<TokenSeq> src = {tokenize("a b c")};
  const std::vector<TokenSeq> ref = {tokenize("x b c")};
  const Edit target{0, 1, {"x"}};

  SUBCASE("one of three systems corrects: 1 - 1/4") {
    const std::vector<std::vector<TokenSeq>> systems = {
        {tokenize("x b c")}, {tokenize("a b c")}, {tokenize("a b q")}};
    const auto table = gotoscorer_difficulty(src, ref, systems);
    CHECK(table.edit_weight_or(0, target, -1.0) == doctest::Approx(0.75));
  }
  SUBCASE("no system corrects: difficulty 1") {
    const std::vector<std::vector<TokenSeq>> systems = {{tokenize("a b c")},
                                                        {tokenize("a b q")}};
    const auto table = gotoscorer_difficulty(src, ref, systems);
    CHECK(table.edit_weight_or(0, target, -1.0) == doctest::Approx(1.0));
  }
  SUBCASE("every real system corrects: only the identity fails") {
    const std::vector<std::vector<TokenSeq>> systems = {{tokenize("x b c")},
                                                        {tokenize("x b c")},
                                                        {tokenize("x b c")}};
    const auto table = gotoscorer_difficulty(src, ref, systems);
    CHECK(table.edit_weight_or(0, target, -1.0) == doctest::Approx(0.25));
  }
}

TEST_CASE("kept spans split at reference insertion points") {
  const std::vector<TokenSeq> src = {tokenize("a b")};
  const std::vector<TokenSeq> ref = {tokenize("a x b")};
  const auto table =
      gotoscorer_difficulty(src, ref, {{tokenize("a x b")}});
  REQUIRE(table.kept_spans.size() == 1);
  REQUIRE(table.kept_spans[0].size() == 2);
  CHECK(table.kept_spans[0][0].start == 0);
  CHECK(table.kept_spans[0][0].end == 1);
  CHECK(table.kept_spans[0][1].start == 1);
  CHECK(table.kept_spans[0][1].end == 2);
}

TEST_CASE("boundary insertions keep a span, interior ones break it") {
  const std::vector<TokenSeq> src = {tokenize("a b c d")};
  const std::vector<TokenSeq> ref = {tokenize("a b x d")};

  // Kept spans are [0,2) and [3,4). One system inserts at the boundary
  // index 2, another inside the span at index 1.
  const std::vector<std::vector<TokenSeq>> systems = {
      {tokenize("a b z c d")}, {tokenize("a z b c d")}};
  const auto table = gotoscorer_difficulty(src, ref, systems);
  REQUIRE(table.kept_spans[0].size() == 2);
  const auto& front = table.kept_spans[0][0];
  CHECK(front.start == 0);
  CHECK(front.end == 2);
  // Identity + boundary-inserter keep it, interior-inserter does not.
  CHECK(front.weight == doctest::Approx(1.0 - 2.0 / 3.0));
}

TEST_CASE("difficulty scoring rewards hard edits and kept spans") {
  const std::vector<TokenSeq> src = {tokenize("a b c d")};
  const std::vector<TokenSeq> ref = {tokenize("a b x d")};
  const std::vector<std::vector<TokenSeq>> systems = {{tokenize("a q c d")}};
  const auto table = gotoscorer_difficulty(src, ref, systems);
  // K=2: edit difficulty 1.0; kept [0,2) weight 0.5; kept [3,4) weight 0.

  SUBCASE("perfect hypothesis scores 1") {
    const auto s = score_gotoscorer(src, ref, ref, table, 0.5);
    CHECK(s.sentences[0].precision == doctest::Approx(1.0));
    CHECK(s.sentences[0].recall == doctest::Approx(1.0));
    CHECK(s.sentences[0].f_beta == doctest::Approx(1.0));
  }
  SUBCASE("identity hypothesis keeps spans but misses the edit") {
    const auto s = score_gotoscorer(src, src, ref, table, 0.5);
    CHECK(s.sentences[0].precision == doctest::Approx(1.0));
    CHECK(s.sentences[0].recall == doctest::Approx(0.5 / 1.5));
  }
  SUBCASE("interior insertion forfeits the kept span") {
    const std::vector<TokenSeq> hyp = {tokenize("a z b x d")};
    const auto s = score_gotoscorer(src, hyp, ref, table, 0.5);
    // Hyp edits: [1,1)->[z] (weight 1, wrong) and [2,3)->[x] (difficulty 1).
    CHECK(s.sentences[0].precision == doctest::Approx(0.5));
    CHECK(s.sentences[0].recall == doctest::Approx(1.0 / 1.5));
  }
}

TEST_CASE("difficulty-weighted recall can hit zero for the identity") {
  // Everyone keeps everything, so kept spans carry no weight and only the
  // missed edit counts.
  const std::vector<TokenSeq> src = {tokenize("a b")};
  const std::vector<TokenSeq> ref = {tokenize("a x b")};
  const auto table = gotoscorer_difficulty(
      src, ref, {{tokenize("a x b")}, {tokenize("a b")}});
  const auto s = score_gotoscorer(src, src, ref, table, 0.5);
  CHECK(s.sentences[0].recall == doctest::Approx(0.0));
  CHECK(s.sentences[0].precision == doctest::Approx(1.0));
}

TEST_CASE("gotoscorer rejects empty system pools and foreign tables") {
  const std::vector<TokenSeq> src = {tokenize("a")};
  CHECK_THROWS_AS(gotoscorer_difficulty(src, src, {}), UsageError);
  DifficultyTable table;
  CHECK_THROWS_AS(score_gotoscorer(src, src, src, table, 0.5), UsageError);
}
