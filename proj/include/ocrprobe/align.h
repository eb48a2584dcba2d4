#ifndef OCRPROBE_ALIGN_H_
#define OCRPROBE_ALIGN_H_

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ocrprobe {

enum class OpKind { kMatch, kSubstitute, kDelete, kInsert };

std::string_view OpKindName(OpKind kind);

// One step of a word alignment. Match/Substitute carry both sides, Delete
// only the reference, Insert only the hypothesis.
struct AlignOp {
  OpKind kind = OpKind::kMatch;
  std::optional<std::string> ref_token;
  std::optional<std::string> hyp_token;
  std::optional<std::size_t> ref_index;
  std::optional<std::size_t> hyp_index;

  bool operator==(const AlignOp&) const = default;
};

enum class CharLabelKind { kCorrect, kSubstitution, kOvergeneration };

std::string_view CharLabelName(CharLabelKind kind);

// Label for one hypothesis character. `ref_position` is the reference
// character it was paired with (absent for overgeneration).
struct CharLabel {
  std::size_t position = 0;
  CharLabelKind label = CharLabelKind::kCorrect;
  std::optional<std::size_t> ref_position;
};

// Unit-cost Levenshtein distance, two-row DP.
template <typename T>
std::size_t EditDistance(std::span<const T> ref, std::span<const T> hyp) {
  std::vector<std::size_t> prev(hyp.size() + 1), cur(hyp.size() + 1);
  for (std::size_t j = 0; j <= hyp.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= ref.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= hyp.size(); ++j) {
      const std::size_t diag = prev[j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      cur[j] = std::min({diag, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[hyp.size()];
}

std::size_t EditDistance(std::u32string_view ref, std::u32string_view hyp);

// Minimum-cost alignment. Backtrace ties resolve Match > Substitute >
// Delete > Insert.
std::vector<AlignOp> AlignWords(std::span<const std::string> ref,
                                std::span<const std::string> hyp);

// Number of non-Match ops.
std::size_t AlignmentCost(std::span<const AlignOp> ops);

// A matching block: ref[ref_begin, ref_begin+size) == hyp[hyp_begin, ...).
struct MatchingBlock {
  std::size_t ref_begin = 0;
  std::size_t hyp_begin = 0;
  std::size_t size = 0;
};

// Recursive longest-common-contiguous-block matching (no junk heuristic).
// Blocks are returned in increasing order, adjacent blocks merged.
std::vector<MatchingBlock> MatchingBlocks(std::u32string_view ref,
                                          std::u32string_view hyp);

// Labels every hypothesis code point. Characters in matching blocks are
// Correct; inside a replaced gap, hypothesis characters are paired in order
// with reference characters (Substitution) and any surplus is
// Overgeneration; pure insertions are Overgeneration.
std::vector<CharLabel> AlignChars(std::u32string_view ref,
                                  std::u32string_view hyp);
std::vector<CharLabel> AlignChars(std::string_view ref, std::string_view hyp);

}  // namespace ocrprobe

#endif  // OCRPROBE_ALIGN_H_
