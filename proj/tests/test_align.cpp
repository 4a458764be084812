#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "gecmetrics/align.hpp"
#include "gecmetrics/core.hpp"

using namespace gecmetrics;

namespace {

// Independent re-statement of the cost model for the exhaustive oracle.
std::string lc(const std::string& s) {
  std::string out = s;
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

double oracle_sub_cost(const std::string& a, const std::string& b) {
  const std::string la = lc(a), lb = lc(b);
  if (la == lb) return 1.0;
  const std::string& s = la.size() <= lb.size() ? la : lb;
  const std::string& l = la.size() <= lb.size() ? lb : la;
  if (s.size() >= 2 && l.substr(0, s.size()) == s) return 1.5;
  return 2.0;
}

double oracle_cost(const std::vector<std::string>& src,
                   const std::vector<std::string>& tgt, std::size_t i,
                   std::size_t j) {
  if (i == 0 && j == 0) return 0.0;
  double best = 1e18;
  if (i > 0) best = std::min(best, oracle_cost(src, tgt, i - 1, j) + 1.0);
  if (j > 0) best = std::min(best, oracle_cost(src, tgt, i, j - 1) + 1.0);
  if (i > 0 && j > 0) {
    if (src[i - 1] == tgt[j - 1])
      best = std::min(best, oracle_cost(src, tgt, i - 1, j - 1));
    best = std::min(best, oracle_cost(src, tgt, i - 1, j - 1) +
                              oracle_sub_cost(src[i - 1], tgt[j - 1]));
    for (std::size_t k = 2; k <= std::min(i, j); ++k) {
      std::vector<std::string> ws, wt;
      bool raw_equal = true;
      for (std::size_t t = 0; t < k; ++t) {
        ws.push_back(lc(src[i - k + t]));
        wt.push_back(lc(tgt[j - k + t]));
        raw_equal = raw_equal && src[i - k + t] == tgt[j - k + t];
      }
      std::sort(ws.begin(), ws.end());
      std::sort(wt.begin(), wt.end());
      if (ws == wt && !raw_equal)
        best = std::min(best, oracle_cost(src, tgt, i - k, j - k) +
                                  static_cast<double>(k));
    }
  }
  return best;
}

void all_seqs(const std::vector<std::string>& alphabet, std::size_t max_len,
              std::vector<std::string>& cur,
              std::vector<std::vector<std::string>>& out) {
  out.push_back(cur);
  if (cur.size() == max_len) return;
  for (const auto& t : alphabet) {
    cur.push_back(t);
    all_seqs(alphabet, max_len, cur, out);
    cur.pop_back();
  }
}

void check_span_coverage(const std::vector<AlignmentOp>& ops, std::size_t n,
                         std::size_t m) {
  std::size_t i = 0, j = 0;
  for (const auto& op : ops) {
    CHECK(op.src_start == i);
    CHECK(op.tgt_start == j);
    CHECK(op.src_start <= op.src_end);
    CHECK(op.tgt_start <= op.tgt_end);
    i = op.src_end;
    j = op.tgt_end;
  }
  CHECK(i == n);
  CHECK(j == m);
}

}  // namespace

TEST_CASE("align matches the exhaustive minimum cost on short sequences") {
  const std::vector<std::string> alphabet = {"a", "A", "b", "ab", "abc"};
  std::vector<std::vector<std::string>> seqs;
  std::vector<std::string> cur;
  all_seqs(alphabet, 3, cur, seqs);

  for (const auto& s : seqs) {
    for (const auto& t : seqs) {
      const TokenSeq src{s}, tgt{t};
      const auto ops = align(src, tgt);
      check_span_coverage(ops, s.size(), t.size());
      const double got = alignment_cost(ops, src, tgt);
      const double want = oracle_cost(s, t, s.size(), t.size());
      CAPTURE(src.join());
      CAPTURE(tgt.join());
      CHECK(got == want);
      CHECK(extract_edits(src, tgt).apply() == tgt);
    }
  }
}

TEST_CASE("equal sequences align as all matches") {
  const TokenSeq s = tokenize("He goes to school .");
  const auto ops = align(s, s);
  CHECK(ops.size() == s.size());
  for (const auto& op : ops) CHECK(op.kind == OpKind::kMatch);
  CHECK(extract_edits(s, s).edits.empty());
}

TEST_CASE("swapped adjacent tokens become one transposition") {
  const auto ops = align(TokenSeq{{"the", "cat"}}, TokenSeq{{"cat", "the"}});
  REQUIRE(ops.size() == 1);
  CHECK(ops[0].kind == OpKind::kTranspose);
  CHECK(ops[0].src_end - ops[0].src_start == 2);
}

TEST_CASE("transposition spans an intervening match") {
  const auto ops =
      align(TokenSeq{{"a", "x", "b"}}, TokenSeq{{"b", "x", "a"}});
  REQUIRE(ops.size() == 1);
  CHECK(ops[0].kind == OpKind::kTranspose);
  CHECK(ops[0].src_end - ops[0].src_start == 3);
}

TEST_CASE("pure positional matches never become a transposition") {
  const auto ops = align(TokenSeq{{"a", "b"}}, TokenSeq{{"a", "b"}});
  for (const auto& op : ops) CHECK(op.kind == OpKind::kMatch);
}

TEST_CASE("case-only differences substitute at reduced cost") {
  const auto ops = align(TokenSeq{{"The"}}, TokenSeq{{"the"}});
  REQUIRE(ops.size() == 1);
  CHECK(ops[0].kind == OpKind::kSubstitute);
  CHECK(alignment_cost(ops, TokenSeq{{"The"}}, TokenSeq{{"the"}}) == 1.0);
}

TEST_CASE("shared stems substitute below unrelated tokens") {
  const TokenSeq s{{"run"}}, t{{"running"}};
  const auto ops = align(s, t);
  REQUIRE(ops.size() == 1);
  CHECK(ops[0].kind == OpKind::kSubstitute);
  CHECK(alignment_cost(ops, s, t) == 1.5);

  // Single-character overlaps get no discount.
  const TokenSeq u{{"a"}}, v{{"ab"}};
  CHECK(alignment_cost(align(u, v), u, v) == 2.0);
}

TEST_CASE("unrelated single tokens prefer substitution over delete+insert") {
  const auto ops = align(TokenSeq{{"cat"}}, TokenSeq{{"dog"}});
  REQUIRE(ops.size() == 1);
  CHECK(ops[0].kind == OpKind::kSubstitute);
}

TEST_CASE("repeated tokens drop at the earliest position") {
  const EditSet es = extract_edits(TokenSeq{{"a", "a"}}, TokenSeq{{"a"}});
  REQUIRE(es.edits.size() == 1);
  CHECK(es.edits[0] == Edit{0, 1, {}});
}

TEST_CASE("extract_edits merges adjacent non-match ops") {
  const EditSet es = extract_edits(tokenize("a b c d"), tokenize("a x y d"));
  REQUIRE(es.edits.size() == 1);
  CHECK(es.edits[0] == Edit{1, 3, {"x", "y"}});
}

TEST_CASE("extract_edits keeps match-separated edits apart") {
  const EditSet es = extract_edits(tokenize("He go to the school ."),
                                   tokenize("He goes to school ."));
  REQUIRE(es.edits.size() == 2);
  CHECK(es.edits[0] == Edit{1, 2, {"goes"}});
  CHECK(es.edits[1] == Edit{3, 4, {}});
}

TEST_CASE("extracted edit sets reconstruct the target on random pairs") {
  std::mt19937 rng(20240817);
  const std::vector<std::string> alphabet = {"a", "b", "c", "A", "ab"};
  std::uniform_int_distribution<std::size_t> len(0, 8);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);

  for (int iter = 0; iter < 500; ++iter) {
    std::vector<std::string> s, t;
    const std::size_t ls = len(rng), lt = len(rng);
    for (std::size_t k = 0; k < ls; ++k) s.push_back(alphabet[pick(rng)]);
    for (std::size_t k = 0; k < lt; ++k) t.push_back(alphabet[pick(rng)]);
    const TokenSeq src{s}, tgt{t};
    const EditSet es = extract_edits(src, tgt);
    CHECK_NOTHROW(es.validate());
    CHECK(es.apply() == tgt);
    CHECK(align(src, tgt) == align(src, tgt));
    CHECK(extract_edits(src, tgt).edits == es.edits);
  }
}

TEST_CASE("edit_equal compares spans and replacements exactly") {
  CHECK(edit_equal(Edit{1, 2, {"goes"}}, Edit{1, 2, {"goes"}}));
  CHECK_FALSE(edit_equal(Edit{1, 2, {"goes"}}, Edit{1, 2, {"Goes"}}));
  CHECK_FALSE(edit_equal(Edit{1, 2, {"goes"}}, Edit{1, 3, {"goes"}}));
  CHECK_FALSE(edit_equal(Edit{1, 2, {"goes"}}, Edit{2, 2, {"goes"}}));
}

TEST_CASE("read_m2_file parses blocks and annotators") {
  const std::string path =
      std::string(GECMETRICS_TEST_DATA_DIR) + "/sample.m2";
  const auto entries = read_m2_file(path);
  REQUIRE(entries.size() == 2);

  CHECK(entries[0].source.join() == "He go to the school .");
  REQUIRE(entries[0].edits_by_annotator.count(0) == 1);
  REQUIRE(entries[0].edits_by_annotator.count(1) == 1);
  const auto& a0 = entries[0].edits_by_annotator.at(0);
  REQUIRE(a0.size() == 2);
  CHECK(a0[0] == Edit{1, 2, {"goes"}});
  CHECK(a0[1] == Edit{3, 4, {}});
  const auto& a1 = entries[0].edits_by_annotator.at(1);
  REQUIRE(a1.size() == 1);
  CHECK(a1[0] == Edit{1, 2, {"goes"}});

  CHECK(entries[1].source.join() == "This are a sentence .");
  CHECK(entries[1].edits_by_annotator.at(0).size() == 1);
  CHECK(entries[1].edits_by_annotator.at(1).empty());
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

TEST_CASE("read_m2_file rejects malformed input") {
  CHECK_THROWS_AS(read_m2_file("/nonexistent/file.m2"), ParseError);

  const std::string orphan = write_temp(
      "orphan.m2", "A 0 1|||R:X|||y|||REQUIRED|||-NONE-|||0\n");
  CHECK_THROWS_AS(read_m2_file(orphan), ParseError);

  const std::string badspan = write_temp(
      "badspan.m2", "S a b\nA x y|||R:X|||y|||REQUIRED|||-NONE-|||0\n");
  CHECK_THROWS_AS(read_m2_file(badspan), ParseError);

  const std::string range = write_temp(
      "range.m2", "S a b\nA 1 5|||R:X|||y|||REQUIRED|||-NONE-|||0\n");
  CHECK_THROWS_AS(read_m2_file(range), ParseError);

  const std::string fields = write_temp("fields.m2", "S a b\nA 0 1|||R:X\n");
  CHECK_THROWS_AS(read_m2_file(fields), ParseError);

  const std::string junk = write_temp("junk.m2", "S a b\nnot a valid line\n");
  CHECK_THROWS_AS(read_m2_file(junk), ParseError);
}

TEST_CASE("read_m2_file reports the offending line") {
  const std::string path = write_temp(
      "lineinfo.m2", "S a b\nA 0 1|||R:X|||y|||REQUIRED|||-NONE-|||0\nA zz\n");
  try {
    read_m2_file(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":3") != std::string::npos);
  }
}

TEST_CASE("read_m2_file sorts edits within an annotator") {
  const std::string path = write_temp(
      "unsorted.m2",
      "S a b c\n"
      "A 2 3|||R:X|||z|||REQUIRED|||-NONE-|||0\n"
      "A 0 1|||R:X|||x|||REQUIRED|||-NONE-|||0\n");
  const auto entries = read_m2_file(path);
  REQUIRE(entries.size() == 1);
  const auto& edits = entries[0].edits_by_annotator.at(0);
  REQUIRE(edits.size() == 2);
  CHECK(edits[0].src_start == 0);
  CHECK(edits[1].src_start == 2);
}
