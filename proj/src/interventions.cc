#include "ocrprobe/interventions.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ocrprobe/unicode.h"

namespace ocrprobe {

namespace {

constexpr float kNegInf = -std::numeric_limits<float>::infinity();

void CheckSameLength(std::size_t a, std::size_t b) {
  if (a != b) {
    throw std::invalid_argument("logit vectors differ in length: " +
                                std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

std::u32string DefaultMaskPunctuation() {
  return U".,··;;'’ʼ()[]-‐–—";
}

bool IsScriptAllowed(std::u32string_view decoded,
                     const std::u32string& punctuation) {
  for (char32_t c : decoded) {
    if (unicode::IsDigit(c)) return false;
    const bool greek = (c >= 0x0370 && c <= 0x03FF) || (c >= 0x1F00 && c <= 0x1FFF);
    if (greek || unicode::IsWhitespace(c) ||
        punctuation.find(c) != std::u32string::npos) {
      continue;
    }
    return false;
  }
  return true;
}

std::vector<bool> BuildScriptMask(std::span<const VocabEntry> vocab,
                                  const std::u32string& punctuation) {
  std::vector<bool> mask(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    mask[i] = vocab[i].is_special ||
              IsScriptAllowed(unicode::Decode(vocab[i].decoded), punctuation);
  }
  return mask;
}

std::vector<float> ApplyMask(std::span<const float> logits,
                             const std::vector<bool>& mask) {
  CheckSameLength(logits.size(), mask.size());
  if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; })) {
    throw std::invalid_argument("mask admits no token");
  }
  std::vector<float> out(logits.begin(), logits.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!mask[i]) out[i] = kNegInf;
  }
  return out;
}

std::ptrdiff_t Argmax(std::span<const float> values) {
  if (values.empty()) return -1;
  return std::max_element(values.begin(), values.end()) - values.begin();
}

AbstainDecision LengthAbstain(std::size_t pred_len, std::size_t ref_len,
                              double threshold) {
  if (ref_len == 0) throw std::invalid_argument("reference length is zero");
  const double ratio =
      static_cast<double>(pred_len) / static_cast<double>(ref_len);
  return ratio > threshold ? AbstainDecision::kAbstain : AbstainDecision::kKeep;
}

double CalibrateAbstainThreshold(std::span<const double> ratios,
                                 double target_rate) {
  if (ratios.empty()) throw std::invalid_argument("no ratios to calibrate on");
  std::vector<double> sorted(ratios.begin(), ratios.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double best = sorted.back();
  double best_error = std::abs(0.0 - target_rate);
  // Walk distinct values from the top; above(t) = count strictly greater.
  for (std::size_t i = sorted.size(); i-- > 0;) {
    if (i + 1 < sorted.size() && sorted[i] == sorted[i + 1]) continue;
    const double above = static_cast<double>(sorted.size() - 1 - i);
    // sorted[i] is the last copy of its value, so everything after it is
    // strictly greater.
    const double error = std::abs(above / n - target_rate);
    if (error < best_error) {
      best_error = error;
      best = sorted[i];
    }
  }
  return best;
}

ContrastiveParams ContrastiveParams::Vcd() {
  ContrastiveParams p;
  p.alpha = 1.0;
  p.beta = 0.1;
  return p;
}

ContrastiveParams ContrastiveParams::M3id() {
  ContrastiveParams p;
  p.alpha = 0.5;
  p.gamma = 0.02;
  p.beta = 1.0;
  p.no_repeat_ngram = 3;
  return p;
}

std::vector<float> VcdCombine(std::span<const float> clean,
                              std::span<const float> noisy, double alpha,
                              double beta) {
  CheckSameLength(clean.size(), noisy.size());
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("beta must lie in (0, 1]");
  }
  std::vector<float> out(clean.size(), kNegInf);
  if (clean.empty()) return out;
  // p_i >= beta * p_max  <=>  l_i - l_max >= log(beta), softmax-invariant.
  const double max_logit = *std::max_element(clean.begin(), clean.end());
  const double cutoff = std::log(beta);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    if (static_cast<double>(clean[i]) - max_logit >= cutoff) {
      out[i] = static_cast<float>((1.0 + alpha) * clean[i] - alpha * noisy[i]);
    }
  }
  return out;
}

double M3idWeight(std::size_t step, double alpha, double gamma) {
  return std::min(alpha, std::expm1(gamma * static_cast<double>(step)));
}

std::vector<float> M3idCombine(std::span<const float> image,
                               std::span<const float> text, std::size_t step,
                               const ContrastiveParams& params,
                               std::span<const std::int64_t> history) {
  CheckSameLength(image.size(), text.size());
  const double w = M3idWeight(step, params.alpha, params.gamma);
  std::vector<float> out(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) {
    out[i] = static_cast<float>((1.0 + w) * image[i] - w * text[i]);
  }
  if (params.repetition_penalty) {
    ApplyRepetitionPenalty(out, history, *params.repetition_penalty);
  }
  if (params.no_repeat_ngram) {
    ApplyNoRepeatNgram(out, history, *params.no_repeat_ngram);
  }
  return out;
}

void ApplyRepetitionPenalty(std::span<float> logits,
                            std::span<const std::int64_t> history,
                            double penalty) {
  std::vector<bool> seen(logits.size(), false);
  for (std::int64_t id : history) {
    if (id < 0 || static_cast<std::size_t>(id) >= logits.size()) continue;
    seen[static_cast<std::size_t>(id)] = true;
  }
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!seen[i]) continue;
    logits[i] = logits[i] > 0 ? static_cast<float>(logits[i] / penalty)
                              : static_cast<float>(logits[i] * penalty);
  }
}

void ApplyNoRepeatNgram(std::span<float> logits,
                        std::span<const std::int64_t> history, std::size_t n) {
  if (n == 0 || history.size() + 1 < n) return;
  // The n-1 most recent tokens form the prefix that a new token would extend.
  const std::size_t prefix_len = n - 1;
  const auto prefix = history.subspan(history.size() - prefix_len);
  for (std::size_t start = 0; start + n <= history.size(); ++start) {
    if (!std::equal(prefix.begin(), prefix.end(), history.begin() + static_cast<std::ptrdiff_t>(start))) {
      continue;
    }
    const std::int64_t banned = history[start + prefix_len];
    if (banned >= 0 && static_cast<std::size_t>(banned) < logits.size()) {
      logits[static_cast<std::size_t>(banned)] = kNegInf;
    }
  }
}

}  // namespace ocrprobe
