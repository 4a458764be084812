#pragma once

#include <map>
#include <string>
#include <vector>

#include "gecmetrics/core.hpp"

namespace gecmetrics {

enum class OpKind { kMatch, kSubstitute, kDelete, kInsert, kTranspose };

// One step of a token alignment. Spans are half-open indices into the
// source/target token sequences and are monotone across an alignment.
struct AlignmentOp {
  OpKind kind = OpKind::kMatch;
  std::size_t src_start = 0;
  std::size_t src_end = 0;
  std::size_t tgt_start = 0;
  std::size_t tgt_end = 0;

  friend bool operator==(const AlignmentOp& a, const AlignmentOp& b) {
    return a.kind == b.kind && a.src_start == b.src_start &&
           a.src_end == b.src_end && a.tgt_start == b.tgt_start &&
           a.tgt_end == b.tgt_end;
  }
};

// Minimal-cost token alignment.
//
// Costs: match 0; delete/insert 1; substitute 1 when the lowercased tokens
// are equal, 1.5 when one lowercased token is a prefix (length >= 2) of the
// other, else 2; transposition of a k-token window (k >= 2, equal lowercased
// multisets on both sides, not a pure positional match) costs k.
// Ties break by op preference match > transpose (smallest window) >
// substitute > delete > insert, which keeps edits at the earliest source
// position.
std::vector<AlignmentOp> align(const TokenSeq& source, const TokenSeq& target);

// Cost of the alignment align() returns.
double alignment_cost(const std::vector<AlignmentOp>& ops,
                      const TokenSeq& source, const TokenSeq& target);

// Merges maximal runs of adjacent non-match ops into single edits; match
// runs break edits. The result reconstructs `target` from `source`.
EditSet extract_edits(const TokenSeq& source, const TokenSeq& target);

// Exact span and replacement equality, case-sensitive. Both edits must
// refer to the same source sentence; that precondition is the caller's.
bool edit_equal(const Edit& a, const Edit& b);

// One sentence block of an M2 edit file: the source line plus the edits of
// each annotator. A noop annotation yields an annotator with no edits.
struct M2Entry {
  TokenSeq source;
  std::map<int, std::vector<Edit>> edits_by_annotator;
};

// Reads an M2-style edit file ("S <tokens>" lines followed by
// "A <start> <end>|||<type>|||<replacement>|||..." lines, blocks separated
// by blank lines). Lets users supply gold edits extracted by external
// tools, bypassing align() entirely.
std::vector<M2Entry> read_m2_file(const std::string& path);

}  // namespace gecmetrics
