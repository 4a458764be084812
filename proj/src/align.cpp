#include "gecmetrics/align.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace gecmetrics {
namespace {

std::string lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

double substitute_cost(const std::string& a, const std::string& b) {
  const std::string la = lower(a);
  const std::string lb = lower(b);
  if (la == lb) return 1.0;
  const std::string& shorter = la.size() <= lb.size() ? la : lb;
  const std::string& longer = la.size() <= lb.size() ? lb : la;
  if (shorter.size() >= 2 &&
      longer.compare(0, shorter.size(), shorter) == 0) {
    return 1.5;
  }
  return 2.0;
}

struct Cell {
  double cost = std::numeric_limits<double>::infinity();
  OpKind op = OpKind::kMatch;
  std::size_t window = 1;  // transposition width, 1 otherwise
};

}  // namespace

std::vector<AlignmentOp> align(const TokenSeq& source, const TokenSeq& target) {
  const std::size_t n = source.size();
  const std::size_t m = target.size();
  const auto& src = source.tokens();
  const auto& tgt = target.tokens();

  std::vector<std::string> src_lc(n);
  std::vector<std::string> tgt_lc(m);
  for (std::size_t i = 0; i < n; ++i) src_lc[i] = lower(src[i]);
  for (std::size_t j = 0; j < m; ++j) tgt_lc[j] = lower(tgt[j]);

  std::vector<std::vector<Cell>> dp(n + 1, std::vector<Cell>(m + 1));
  dp[0][0] = {0.0, OpKind::kMatch, 1};
  for (std::size_t i = 1; i <= n; ++i)
    dp[i][0] = {static_cast<double>(i), OpKind::kDelete, 1};
  for (std::size_t j = 1; j <= m; ++j)
    dp[0][j] = {static_cast<double>(j), OpKind::kInsert, 1};

  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      Cell best;

      // Candidates are tried in preference order; only a strictly lower
      // cost replaces the current best, so ties keep the preferred op.
      if (src[i - 1] == tgt[j - 1]) {
        best = {dp[i - 1][j - 1].cost, OpKind::kMatch, 1};
      }

      // Window multiset equality is tracked incrementally: counts[t] is
      // (occurrences in the source window) - (occurrences in the target
      // window), and the window is a transposition candidate when every
      // count is zero but some aligned pair differs verbatim.
      std::map<std::string, int> counts;
      std::size_t nonzero = 0;
      bool all_raw_equal = true;
      auto bump = [&](const std::string& t, int d) {
        int& c = counts[t];
        if (c != 0) --nonzero;
        c += d;
        if (c != 0) ++nonzero;
      };
      const std::size_t max_k = std::min(i, j);
      for (std::size_t k = 1; k <= max_k; ++k) {
        bump(src_lc[i - k], +1);
        bump(tgt_lc[j - k], -1);
        all_raw_equal = all_raw_equal && src[i - k] == tgt[j - k];
        if (k < 2 || nonzero != 0 || all_raw_equal) continue;
        const double cost = dp[i - k][j - k].cost + static_cast<double>(k);
        if (cost < best.cost) best = {cost, OpKind::kTranspose, k};
      }

      const double sub =
          dp[i - 1][j - 1].cost + substitute_cost(src[i - 1], tgt[j - 1]);
      if (sub < best.cost) best = {sub, OpKind::kSubstitute, 1};
      const double del = dp[i - 1][j].cost + 1.0;
      if (del < best.cost) best = {del, OpKind::kDelete, 1};
      const double ins = dp[i][j - 1].cost + 1.0;
      if (ins < best.cost) best = {ins, OpKind::kInsert, 1};

      dp[i][j] = best;
    }
  }

  std::vector<AlignmentOp> ops;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    const Cell& c = dp[i][j];
    AlignmentOp op;
    op.kind = (i == 0) ? OpKind::kInsert : (j == 0) ? OpKind::kDelete : c.op;
    switch (op.kind) {
      case OpKind::kMatch:
      case OpKind::kSubstitute:
        op.src_start = i - 1;
        op.src_end = i;
        op.tgt_start = j - 1;
        op.tgt_end = j;
        --i;
        --j;
        break;
      case OpKind::kDelete:
        op.src_start = i - 1;
        op.src_end = i;
        op.tgt_start = j;
        op.tgt_end = j;
        --i;
        break;
      case OpKind::kInsert:
        op.src_start = i;
        op.src_end = i;
        op.tgt_start = j - 1;
        op.tgt_end = j;
        --j;
        break;
      case OpKind::kTranspose:
        op.src_start = i - c.window;
        op.src_end = i;
        op.tgt_start = j - c.window;
        op.tgt_end = j;
        i -= c.window;
        j -= c.window;
        break;
    }
    ops.push_back(op);
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

double alignment_cost(const std::vector<AlignmentOp>& ops,
                      const TokenSeq& source, const TokenSeq& target) {
  double total = 0.0;
  for (const AlignmentOp& op : ops) {
    switch (op.kind) {
      case OpKind::kMatch:
        break;
      case OpKind::kDelete:
      case OpKind::kInsert:
        total += 1.0;
        break;
      case OpKind::kSubstitute:
        total += substitute_cost(source.tokens()[op.src_start],
                                 target.tokens()[op.tgt_start]);
        break;
      case OpKind::kTranspose:
        total += static_cast<double>(op.src_end - op.src_start);
        break;
    }
  }
  return total;
}

EditSet extract_edits(const TokenSeq& source, const TokenSeq& target) {
  const std::vector<AlignmentOp> ops = align(source, target);
  EditSet result;
  result.source = source;

  std::size_t run_begin = 0;
  while (run_begin < ops.size()) {
    if (ops[run_begin].kind == OpKind::kMatch) {
      ++run_begin;
      continue;
    }
    std::size_t run_end = run_begin + 1;
    while (run_end < ops.size() && ops[run_end].kind != OpKind::kMatch)
      ++run_end;
    Edit e;
    e.src_start = ops[run_begin].src_start;
    e.src_end = ops[run_end - 1].src_end;
    const auto& tgt = target.tokens();
    e.replacement.assign(tgt.begin() + ops[run_begin].tgt_start,
                         tgt.begin() + ops[run_end - 1].tgt_end);
    result.edits.push_back(std::move(e));
    run_begin = run_end;
  }

  result.validate();
  return result;
}

bool edit_equal(const Edit& a, const Edit& b) {
  return a == b;
}

namespace {

Edit parse_m2_edit(const std::string& line, const TokenSeq& source,
                   const std::string& path, std::size_t lineno, int* annotator,
                   bool* is_noop) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  const std::string body = line.substr(2);
  while (true) {
    const std::size_t sep = body.find("|||", pos);
    if (sep == std::string::npos) {
      fields.push_back(body.substr(pos));
      break;
    }
    fields.push_back(body.substr(pos, sep - pos));
    pos = sep + 3;
  }
  const std::string where = path + ":" + std::to_string(lineno);
  if (fields.size() < 4)
    throw ParseError(where + ": malformed edit line: " + line);

  std::istringstream span(fields[0]);
  long start = 0;
  long end = 0;
  if (!(span >> start >> end))
    throw ParseError(where + ": bad edit span: " + fields[0]);

  try {
    *annotator = std::stoi(fields.back());
  } catch (const std::exception&) {
    throw ParseError(where + ": bad annotator id: " + fields.back());
  }

  const std::string& type = fields[1];
  if (type == "noop" || start == -1) {
    *is_noop = true;
    return Edit{};
  }
  *is_noop = false;

  if (start < 0 || end < start || static_cast<std::size_t>(end) > source.size())
    throw ParseError(where + ": edit span out of range: " + fields[0]);

  Edit e;
  e.src_start = static_cast<std::size_t>(start);
  e.src_end = static_cast<std::size_t>(end);
  if (fields[2] != "-NONE-")
    e.replacement = tokenize(fields[2]).tokens();
  return e;
}

}  // namespace

std::vector<M2Entry> read_m2_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open M2 file: " + path);

  std::vector<M2Entry> entries;
  M2Entry current;
  bool open = false;

  auto flush = [&]() {
    if (!open) return;
    for (auto& [annotator, edits] : current.edits_by_annotator)
      std::sort(edits.begin(), edits.end());
    entries.push_back(std::move(current));
    current = M2Entry{};
    open = false;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == 'S' && (line.size() == 1 || line[1] == ' ')) {
      flush();
      current.source = tokenize(line.size() > 2 ? line.substr(2) : "");
      open = true;
      continue;
    }
    if (line.rfind("A ", 0) == 0) {
      if (!open)
        throw ParseError(path + ":" + std::to_string(lineno) +
                         ": edit line before any source line");
      int annotator = 0;
      bool is_noop = false;
      Edit e =
          parse_m2_edit(line, current.source, path, lineno, &annotator, &is_noop);
      auto& edits = current.edits_by_annotator[annotator];
      if (!is_noop) edits.push_back(std::move(e));
      continue;
    }
    throw ParseError(path + ":" + std::to_string(lineno) +
                     ": unrecognized line: " + line);
  }
  flush();
  return entries;
}

}  // namespace gecmetrics
