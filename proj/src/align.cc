#include "ocrprobe/align.h"

#include "ocrprobe/unicode.h"

namespace ocrprobe {

std::string_view OpKindName(OpKind kind) {
  switch (kind) {
    case OpKind::kMatch:
      return "match";
    case OpKind::kSubstitute:
      return "substitute";
    case OpKind::kDelete:
      return "delete";
    case OpKind::kInsert:
      return "insert";
  }
  return "unknown";
}

std::string_view CharLabelName(CharLabelKind kind) {
  switch (kind) {
    case CharLabelKind::kCorrect:
      return "correct";
    case CharLabelKind::kSubstitution:
      return "substitution";
    case CharLabelKind::kOvergeneration:
      return "overgeneration";
  }
  return "unknown";
}

std::size_t EditDistance(std::u32string_view ref, std::u32string_view hyp) {
  return EditDistance<char32_t>(std::span(ref.data(), ref.size()),
                                std::span(hyp.data(), hyp.size()));
}

std::vector<AlignOp> AlignWords(std::span<const std::string> ref,
                                std::span<const std::string> hyp) {
  const std::size_t m = ref.size();
  const std::size_t n = hyp.size();
  const std::size_t width = n + 1;
  std::vector<std::size_t> d((m + 1) * width);
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& {
    return d[i * width + j];
  };
  for (std::size_t i = 0; i <= m; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= n; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const std::size_t diag =
          at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  std::vector<AlignOp> ops;
  ops.reserve(std::max(m, n));
  std::size_t i = m;
  std::size_t j = n;
  while (i > 0 || j > 0) {
    AlignOp op;
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] &&
        at(i, j) == at(i - 1, j - 1)) {
      op.kind = OpKind::kMatch;
    } else if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + 1) {
      op.kind = OpKind::kSubstitute;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      op.kind = OpKind::kDelete;
    } else {
      op.kind = OpKind::kInsert;
    }
    if (op.kind != OpKind::kInsert) {
      --i;
      op.ref_token = ref[i];
      op.ref_index = i;
    }
    if (op.kind != OpKind::kDelete) {
      --j;
      op.hyp_token = hyp[j];
      op.hyp_index = j;
    }
    ops.push_back(std::move(op));
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

std::size_t AlignmentCost(std::span<const AlignOp> ops) {
  return static_cast<std::size_t>(
      std::count_if(ops.begin(), ops.end(),
                    [](const AlignOp& op) { return op.kind != OpKind::kMatch; }));
}

namespace {

// Longest common block within ref[alo,ahi) x hyp[blo,bhi). Among equally
// long blocks the one starting earliest in ref, then in hyp, wins.
MatchingBlock FindLongestMatch(std::u32string_view a, std::u32string_view b,
                               std::size_t alo, std::size_t ahi,
                               std::size_t blo, std::size_t bhi) {
  MatchingBlock best{alo, blo, 0};
  std::vector<std::size_t> prev(bhi - blo + 1, 0), cur(bhi - blo + 1, 0);
  for (std::size_t i = alo; i < ahi; ++i) {
    for (std::size_t j = blo; j < bhi; ++j) {
      const std::size_t k = j - blo + 1;
      cur[k] = a[i] == b[j] ? prev[k - 1] + 1 : 0;
      if (cur[k] > best.size) {
        best = {i + 1 - cur[k], j + 1 - cur[k], cur[k]};
      }
    }
    std::swap(prev, cur);
  }
  return best;
}

}  // namespace

std::vector<MatchingBlock> MatchingBlocks(std::u32string_view ref,
                                          std::u32string_view hyp) {
  struct Range {
    std::size_t alo, ahi, blo, bhi;
  };
  std::vector<Range> queue{{0, ref.size(), 0, hyp.size()}};
  std::vector<MatchingBlock> blocks;
  while (!queue.empty()) {
    const Range r = queue.back();
    queue.pop_back();
    if (r.alo >= r.ahi || r.blo >= r.bhi) continue;
    const MatchingBlock m = FindLongestMatch(ref, hyp, r.alo, r.ahi, r.blo, r.bhi);
    if (m.size == 0) continue;
    blocks.push_back(m);
    queue.push_back({r.alo, m.ref_begin, r.blo, m.hyp_begin});
    queue.push_back({m.ref_begin + m.size, r.ahi, m.hyp_begin + m.size, r.bhi});
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const MatchingBlock& x, const MatchingBlock& y) {
              return x.ref_begin < y.ref_begin;
            });
  std::vector<MatchingBlock> merged;
  for (const auto& b : blocks) {
    if (!merged.empty()) {
      auto& last = merged.back();
      if (last.ref_begin + last.size == b.ref_begin &&
          last.hyp_begin + last.size == b.hyp_begin) {
        last.size += b.size;
        continue;
      }
    }
    merged.push_back(b);
  }
  return merged;
}

std::vector<CharLabel> AlignChars(std::u32string_view ref,
                                  std::u32string_view hyp) {
  std::vector<CharLabel> labels(hyp.size());
  for (std::size_t j = 0; j < hyp.size(); ++j) labels[j].position = j;

  auto label_gap = [&](std::size_t ref_from, std::size_t ref_to,
                       std::size_t hyp_from, std::size_t hyp_to) {
    for (std::size_t j = hyp_from; j < hyp_to; ++j) {
      const std::size_t paired = ref_from + (j - hyp_from);
      if (paired < ref_to) {
        labels[j].label = CharLabelKind::kSubstitution;
        labels[j].ref_position = paired;
      } else {
        labels[j].label = CharLabelKind::kOvergeneration;
      }
    }
  };

  std::size_t ref_pos = 0;
  std::size_t hyp_pos = 0;
  for (const auto& block : MatchingBlocks(ref, hyp)) {
    label_gap(ref_pos, block.ref_begin, hyp_pos, block.hyp_begin);
    for (std::size_t k = 0; k < block.size; ++k) {
      auto& l = labels[block.hyp_begin + k];
      l.label = CharLabelKind::kCorrect;
      l.ref_position = block.ref_begin + k;
    }
    ref_pos = block.ref_begin + block.size;
    hyp_pos = block.hyp_begin + block.size;
  }
  label_gap(ref_pos, ref.size(), hyp_pos, hyp.size());
  return labels;
}

std::vector<CharLabel> AlignChars(std::string_view ref, std::string_view hyp) {
  return AlignChars(unicode::Decode(ref), unicode::Decode(hyp));
}

}  // namespace ocrprobe
