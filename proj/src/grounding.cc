#include "ocrprobe/grounding.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ocrprobe/metrics.h"
#include "ocrprobe/textnorm.h"
#include "ocrprobe/unicode.h"

namespace ocrprobe {

std::string_view SubtypeName(SubstitutionSubtype s) {
  switch (s) {
    case SubstitutionSubtype::kPerceptual:
      return "perceptual";
    case SubstitutionSubtype::kCrossScript:
      return "cross_script";
    case SubstitutionSubtype::kLexical:
      return "lexical";
  }
  return "unknown";
}

std::string_view GainClassName(GainClass c) {
  switch (c) {
    case GainClass::kCorrect:
      return "correct";
    case GainClass::kPerceptual:
      return "perceptual";
    case GainClass::kCrossScript:
      return "cross_script";
    case GainClass::kLexical:
      return "lexical";
  }
  return "unknown";
}

double ComputeGain(double logp_cond, double logp_free) {
  return logp_cond - logp_free;
}

bool HasGreekLetter(std::string_view text) {
  const std::u32string s = unicode::Decode(text);
  return std::any_of(s.begin(), s.end(), unicode::IsGreekLetter);
}

namespace {

bool HasLatinLetter(std::string_view text) {
  const std::u32string s = unicode::Decode(text);
  return std::any_of(s.begin(), s.end(), unicode::IsLatinLetter);
}

int Severity(CharLabelKind k) {
  switch (k) {
    case CharLabelKind::kCorrect:
      return 0;
    case CharLabelKind::kSubstitution:
      return 1;
    case CharLabelKind::kOvergeneration:
      return 2;
  }
  return 0;
}

}  // namespace

std::vector<TokenLabel> LabelTokens(std::string_view gt, std::string_view pred,
                                    std::span<const CharSpan> token_spans) {
  const std::u32string g = unicode::Decode(gt);
  const std::u32string p = unicode::Decode(pred);
  std::size_t expected = 0;
  for (const auto& span : token_spans) {
    if (span.begin != expected || span.end < span.begin) {
      throw std::invalid_argument(
          "token spans must tile the prediction; gap or overlap at code point " +
          std::to_string(expected));
    }
    expected = span.end;
  }
  if (expected != p.size()) {
    throw std::invalid_argument("token spans cover " + std::to_string(expected) +
                                " of " + std::to_string(p.size()) +
                                " prediction code points");
  }

  const std::vector<CharLabel> chars = AlignChars(g, p);
  std::vector<TokenLabel> out;
  out.reserve(token_spans.size());
  for (const auto& span : token_spans) {
    TokenLabel t;
    std::array<std::size_t, 3> counts{};
    std::u32string gt_chars;
    for (std::size_t i = span.begin; i < span.end; ++i) {
      ++counts[static_cast<std::size_t>(Severity(chars[i].label))];
      if (chars[i].ref_position) gt_chars.push_back(g[*chars[i].ref_position]);
    }
    if (span.end > span.begin) {
      // Iterate from most to least severe so ties keep the severe label.
      std::size_t best = 2;
      for (std::size_t s = 2; s-- > 0;) {
        if (counts[s] > counts[best]) best = s;
      }
      t.label = best == 0   ? CharLabelKind::kCorrect
                : best == 1 ? CharLabelKind::kSubstitution
                            : CharLabelKind::kOvergeneration;
    }
    t.gt_span = unicode::Encode(gt_chars);
    t.pred_span = unicode::Encode(p.substr(span.begin, span.end - span.begin));
    out.push_back(std::move(t));
  }
  return out;
}

std::optional<SubstitutionSubtype> SubtypeSubstitution(
    std::string_view gt_span, std::string_view pred_span) {
  if (!HasGreekLetter(gt_span)) return std::nullopt;
  if (BareLetterForm(gt_span) == BareLetterForm(pred_span)) {
    return SubstitutionSubtype::kPerceptual;
  }
  if (HasLatinLetter(pred_span)) return SubstitutionSubtype::kCrossScript;
  return SubstitutionSubtype::kLexical;
}

std::optional<GainClass> ClassOf(const TokenGainRecord& r) {
  if (!r.valid || !r.within_greek || !r.label) return std::nullopt;
  if (*r.label == CharLabelKind::kCorrect) return GainClass::kCorrect;
  if (*r.label != CharLabelKind::kSubstitution || !r.subtype) return std::nullopt;
  switch (*r.subtype) {
    case SubstitutionSubtype::kPerceptual:
      return GainClass::kPerceptual;
    case SubstitutionSubtype::kCrossScript:
      return GainClass::kCrossScript;
    case SubstitutionSubtype::kLexical:
      return GainClass::kLexical;
  }
  return std::nullopt;
}

GainSummary SummarizeGains(std::span<const TokenGainRecord> records) {
  std::array<std::vector<double>, kNumGainClasses> gains, top1, entropy;
  for (const auto& r : records) {
    const auto cls = ClassOf(r);
    if (!cls) continue;
    const auto k = static_cast<std::size_t>(*cls);
    gains[k].push_back(r.gain);
    top1[k].push_back(r.top1_prob);
    entropy[k].push_back(r.entropy);
  }
  GainSummary summary;
  for (std::size_t k = 0; k < kNumGainClasses; ++k) {
    auto& s = summary.by_class[k];
    s.count = gains[k].size();
    if (s.count == 0) continue;
    s.median_gain = Median(gains[k]);
    s.median_top1 = Median(top1[k]);
    s.median_entropy = Median(entropy[k]);
  }
  return summary;
}

std::vector<TokenGainRecord> BuildGainRecords(std::string_view page_id,
                                              std::string_view gt,
                                              std::span<const LoggedToken> tokens) {
  std::vector<LoggedToken> sorted(tokens.begin(), tokens.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const LoggedToken& a, const LoggedToken& b) {
              return a.token_index < b.token_index;
            });
  std::string pred;
  std::vector<CharSpan> spans;
  for (const auto& t : sorted) {
    const std::size_t length = unicode::Length(t.token_text);
    if (t.span.end < t.span.begin || t.span.end - t.span.begin != length) {
      throw std::invalid_argument(
          "page " + std::string(page_id) + " token " +
          std::to_string(t.token_index) + ": span length does not match text");
    }
    pred += t.token_text;
    spans.push_back(t.span);
  }
  const auto labels = LabelTokens(gt, pred, spans);

  std::vector<TokenGainRecord> records;
  records.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& t = sorted[i];
    TokenGainRecord r;
    r.page_id = std::string(page_id);
    r.token_index = t.token_index;
    r.token_text = t.token_text;
    r.logp_cond = t.logp_cond;
    r.logp_free = t.logp_free;
    r.gain = ComputeGain(t.logp_cond, t.logp_free);
    r.top1_prob = t.top1_prob;
    r.entropy = t.entropy;
    r.label = labels[i].label;
    r.gt_span = labels[i].gt_span;
    r.within_greek = HasGreekLetter(r.gt_span);
    if (r.label == CharLabelKind::kSubstitution && r.within_greek) {
      r.subtype = SubtypeSubstitution(r.gt_span, labels[i].pred_span);
    }
    r.valid = std::isfinite(t.logp_cond) && std::isfinite(t.logp_free) &&
              t.logp_cond <= 0.0 && t.logp_free <= 0.0 &&
              std::isfinite(t.top1_prob) && t.top1_prob >= 0.0 &&
              t.top1_prob <= 1.0 && std::isfinite(t.entropy) && t.entropy >= 0.0;
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace ocrprobe
