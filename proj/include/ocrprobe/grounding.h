#ifndef OCRPROBE_GROUNDING_H_
#define OCRPROBE_GROUNDING_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ocrprobe/align.h"

namespace ocrprobe {

enum class SubstitutionSubtype { kPerceptual, kCrossScript, kLexical };

std::string_view SubtypeName(SubstitutionSubtype s);

// Half-open code-point range into the prediction.
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct TokenGainRecord {
  std::string page_id;
  std::size_t token_index = 0;
  std::string token_text;
  double logp_cond = 0.0;
  double logp_free = 0.0;
  double gain = 0.0;
  double top1_prob = 0.0;
  double entropy = 0.0;
  // Absent for zero-width tokens, which cover no prediction characters.
  std::optional<CharLabelKind> label;
  std::optional<SubstitutionSubtype> subtype;
  bool within_greek = false;
  // Ground-truth characters paired with this token's characters.
  std::string gt_span;
  // False when a log-probability is non-finite or positive; such records
  // stay in per-token output but are left out of summaries.
  bool valid = true;
};

// logp_cond - logp_free. Positive means the image supports the token.
double ComputeGain(double logp_cond, double logp_free);

struct TokenLabel {
  std::optional<CharLabelKind> label;
  std::string gt_span;
  std::string pred_span;
};

// Labels each token by the majority label of its characters; ties go to
// the more severe label (Overgeneration > Substitution > Correct). Spans
// must tile `pred` in order; throws std::invalid_argument otherwise.
std::vector<TokenLabel> LabelTokens(std::string_view gt, std::string_view pred,
                                    std::span<const CharSpan> token_spans);

// nullopt when `gt_span` has no Greek letter (outside the within-Greek
// comparison). Otherwise Perceptual for equal bare-letter forms,
// CrossScript when the prediction brings Latin letters, Lexical otherwise.
std::optional<SubstitutionSubtype> SubtypeSubstitution(std::string_view gt_span,
                                                       std::string_view pred_span);

bool HasGreekLetter(std::string_view text);

enum class GainClass { kCorrect, kPerceptual, kCrossScript, kLexical };
inline constexpr std::size_t kNumGainClasses = 4;
std::string_view GainClassName(GainClass c);

// Class of a record for summaries, or nullopt if it does not enter them
// (invalid, not within Greek, overgeneration, unlabeled).
std::optional<GainClass> ClassOf(const TokenGainRecord& record);

struct GainClassStats {
  std::size_t count = 0;
  // Absent when count == 0.
  std::optional<double> median_gain;
  std::optional<double> median_top1;
  std::optional<double> median_entropy;
};

struct GainSummary {
  std::array<GainClassStats, kNumGainClasses> by_class{};
  const GainClassStats& operator[](GainClass c) const {
    return by_class[static_cast<std::size_t>(c)];
  }
};

GainSummary SummarizeGains(std::span<const TokenGainRecord> records);

// One page of a token log, before labeling.
struct LoggedToken {
  std::size_t token_index = 0;
  std::string token_text;
  CharSpan span;
  double logp_cond = 0.0;
  double logp_free = 0.0;
  double top1_prob = 0.0;
  double entropy = 0.0;
};

// Labels and subtypes one page. The prediction is the concatenation of the
// token texts in token_index order, and each span must match its text.
std::vector<TokenGainRecord> BuildGainRecords(std::string_view page_id,
                                              std::string_view gt,
                                              std::span<const LoggedToken> tokens);

}  // namespace ocrprobe

#endif  // OCRPROBE_GROUNDING_H_
