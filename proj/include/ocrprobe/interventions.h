#ifndef OCRPROBE_INTERVENTIONS_H_
#define OCRPROBE_INTERVENTIONS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ocrprobe {

// Logit transforms for decode-time interventions. Everything here acts on
// exported per-step logit vectors; a decoding loop is a thin consumer.

struct VocabEntry {
  std::int64_t token_id = 0;
  std::string decoded;
  bool is_special = false;
};

// Punctuation admitted by the script mask in addition to the Greek and
// Greek Extended blocks and whitespace: period, comma, ano teleia, Greek
// question mark, apostrophes, brackets, dashes.
std::u32string DefaultMaskPunctuation();

// True if every code point of `decoded` is in U+0370-03FF, U+1F00-1FFF,
// `punctuation`, or whitespace. Digits are never admitted.
bool IsScriptAllowed(std::u32string_view decoded,
                     const std::u32string& punctuation);

// mask[i] is true when vocab[i] may be emitted; special tokens always may.
std::vector<bool> BuildScriptMask(
    std::span<const VocabEntry> vocab,
    const std::u32string& punctuation = DefaultMaskPunctuation());

// Masked entries become -inf. Throws std::invalid_argument on length
// mismatch or when nothing is allowed.
std::vector<float> ApplyMask(std::span<const float> logits,
                             const std::vector<bool>& mask);

// Index of the largest entry; first index on ties. -1 if empty.
std::ptrdiff_t Argmax(std::span<const float> values);

enum class AbstainDecision { kKeep, kAbstain };

// Abstain iff pred_len / ref_len > threshold. Throws if ref_len == 0.
AbstainDecision LengthAbstain(std::size_t pred_len, std::size_t ref_len,
                              double threshold);

// Picks the threshold among the observed ratios whose abstention rate
// (share of ratios strictly above it) is closest to `target_rate`; ties go
// to the larger threshold.
double CalibrateAbstainThreshold(std::span<const double> ratios,
                                 double target_rate);

struct ContrastiveParams {
  double alpha = 1.0;
  double beta = 0.1;
  double gamma = 0.0;
  std::optional<double> repetition_penalty;
  std::optional<std::size_t> no_repeat_ngram;

  // alpha 1.0, beta 0.1.
  static ContrastiveParams Vcd();
  // alpha 0.5, gamma 0.02, no-repeat 3-gram.
  static ContrastiveParams M3id();
};

// Plausibility-constrained contrast. Candidates are tokens whose clean
// probability is at least beta times the clean maximum; they score
// (1 + alpha) * clean - alpha * noisy, all others -inf.
std::vector<float> VcdCombine(std::span<const float> clean,
                              std::span<const float> noisy, double alpha,
                              double beta);

// min(alpha, e^(gamma * t) - 1): zero at the first step, rising to alpha.
double M3idWeight(std::size_t step, double alpha, double gamma);

// (1 + w_t) * image - w_t * text, followed by the optional repetition
// penalty and no-repeat n-gram filter against `history`.
std::vector<float> M3idCombine(std::span<const float> image,
                               std::span<const float> text, std::size_t step,
                               const ContrastiveParams& params,
                               std::span<const std::int64_t> history = {});

// Divides positive and multiplies negative scores of every token already in
// `history` by `penalty`.
void ApplyRepetitionPenalty(std::span<float> logits,
                            std::span<const std::int64_t> history,
                            double penalty);

// Masks tokens that would complete an n-gram already present in `history`.
void ApplyNoRepeatNgram(std::span<float> logits,
                        std::span<const std::int64_t> history, std::size_t n);

}  // namespace ocrprobe

#endif  // OCRPROBE_INTERVENTIONS_H_
