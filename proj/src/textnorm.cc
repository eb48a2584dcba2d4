#include "ocrprobe/textnorm.h"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <stdexcept>

#include "ocrprobe/unicode.h"

namespace ocrprobe {

namespace {

constexpr char32_t kFinalSigma = U'ς';
constexpr char32_t kSigma = U'σ';
constexpr char32_t kElisionTarget = U'’';
constexpr int kMaxPasses = 16;

const icu::Normalizer2& Instance(CanonicalForm form) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = form == CanonicalForm::kNFC
                                  ? icu::Normalizer2::getNFCInstance(status)
                                  : icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status) || n == nullptr) {
    throw std::runtime_error("ICU normalizer unavailable");
  }
  return *n;
}

const icu::Normalizer2& NfdInstance() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFDInstance(status);
  if (U_FAILURE(status) || n == nullptr) {
    throw std::runtime_error("ICU normalizer unavailable");
  }
  return *n;
}

std::u32string ApplyNormalizer(const icu::Normalizer2& normalizer,
                               const std::u32string& text) {
  const std::string utf8 = unicode::Encode(text);
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = normalizer.normalize(
      icu::UnicodeString::fromUTF8(icu::StringPiece(utf8)), status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU normalization failed");
  std::string back;
  out.toUTF8String(back);
  return unicode::Decode(back);
}

bool IsAsciiLetter(char32_t c) {
  return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z');
}

bool IsTagNameChar(char32_t c) {
  return IsAsciiLetter(c) || (c >= U'0' && c <= U'9') || c == U'_' ||
         c == U'-' || c == U':';
}

struct Tag {
  std::size_t begin = 0;
  std::size_t end = 0;  // one past '>'
  std::u32string name;
  bool closing = false;
  bool self_closing = false;
};

// Parses a tag starting at `pos` (which holds '<'). Returns nullopt if `pos`
// does not begin a tag at all; sets `malformed` if it begins one that never
// closes.
std::optional<Tag> ParseTag(const std::u32string& s, std::size_t pos,
                            bool& malformed) {
  malformed = false;
  std::size_t i = pos + 1;
  Tag tag;
  tag.begin = pos;
  if (i < s.size() && s[i] == U'/') {
    tag.closing = true;
    ++i;
  }
  if (i >= s.size() || !IsAsciiLetter(s[i])) return std::nullopt;
  while (i < s.size() && IsTagNameChar(s[i])) tag.name.push_back(s[i++]);
  while (i < s.size() && s[i] != U'>' && s[i] != U'<') ++i;
  if (i >= s.size() || s[i] != U'>') {
    malformed = true;
    return std::nullopt;
  }
  tag.self_closing = i > pos && s[i - 1] == U'/';
  tag.end = i + 1;
  std::transform(tag.name.begin(), tag.name.end(), tag.name.begin(),
                 [](char32_t c) { return c < 128 ? std::tolower(c) : c; });
  return tag;
}

// Finds the end of the </note> that closes the <note> opened at `from`,
// honoring nesting. Returns npos when unbalanced.
std::size_t FindNoteClose(const std::u32string& s, std::size_t from) {
  int depth = 1;
  for (std::size_t i = from; i < s.size(); ++i) {
    if (s[i] != U'<') continue;
    bool malformed = false;
    auto tag = ParseTag(s, i, malformed);
    if (!tag || tag->name != U"note" || tag->self_closing) continue;
    depth += tag->closing ? -1 : 1;
    if (depth == 0) return tag->end;
    i = tag->end - 1;
  }
  return std::u32string::npos;
}

std::u32string StripMarkupOnce(const std::u32string& s,
                               std::vector<std::string>& warnings) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != U'<') {
      out.push_back(s[i++]);
      continue;
    }
    bool malformed = false;
    auto tag = ParseTag(s, i, malformed);
    if (!tag) {
      if (malformed) {
        warnings.push_back("unclosed tag at code point " + std::to_string(i) +
                           "; left verbatim");
      }
      out.push_back(s[i++]);
      continue;
    }
    if (tag->name == U"note" && !tag->closing && !tag->self_closing) {
      const std::size_t close = FindNoteClose(s, tag->end);
      if (close == std::u32string::npos) {
        warnings.push_back("unbalanced <note> at code point " +
                           std::to_string(i) + "; left verbatim");
        out.push_back(s[i++]);
        continue;
      }
      i = close;
      continue;
    }
    i = tag->end;
  }
  return out;
}

bool IsHyphen(char32_t c) { return c == U'-' || c == U'‐'; }

// One left-to-right rejoin pass; returns true if anything changed.
bool RejoinHyphenationOnce(std::u32string& s) {
  std::u32string out;
  out.reserve(s.size());
  bool changed = false;
  std::size_t i = 0;
  while (i < s.size()) {
    if (IsHyphen(s[i])) {
      std::size_t j = i + 1;
      if (j < s.size() && s[j] == U'\r') ++j;
      if (j < s.size() && s[j] == U'\n') {
        std::size_t k = j + 1;
        while (k < s.size() && unicode::IsCombiningMark(s[k])) ++k;
        if (k < s.size() && unicode::IsLetter(s[k])) {
          i = j + 1;
          changed = true;
          continue;
        }
      }
    }
    out.push_back(s[i++]);
  }
  s = std::move(out);
  return changed;
}

bool IsElision(char32_t c) {
  return c == U'’' || c == U'ʼ' || c == U'\'' || c == U'᾽';
}

bool IsBracket(char32_t c) {
  return IsolatedBrackets().find(c) != std::u32string::npos;
}

bool ClusterIsWhitespace(const std::u32string& g) {
  return unicode::IsWhitespace(g.front());
}

std::u32string Join(const std::vector<std::u32string>& clusters) {
  std::u32string out;
  for (const auto& g : clusters) out += g;
  return out;
}

std::u32string IsolateBrackets(const std::u32string& s) {
  const auto clusters = unicode::Graphemes(s);
  std::vector<std::u32string> out;
  out.reserve(clusters.size());
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const auto& g = clusters[i];
    if (!IsBracket(g.front())) {
      out.push_back(g);
      continue;
    }
    if (!out.empty() && !ClusterIsWhitespace(out.back())) out.push_back(U" ");
    out.push_back(g);
    if (i + 1 < clusters.size() && !ClusterIsWhitespace(clusters[i + 1])) {
      out.push_back(U" ");
    }
  }
  return Join(out);
}

std::u32string SplitDigitLetter(const std::u32string& s) {
  const auto clusters = unicode::Graphemes(s);
  std::u32string out;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (i > 0) {
      const char32_t a = clusters[i - 1].front();
      const char32_t b = clusters[i].front();
      if ((unicode::IsDigit(a) && unicode::IsLetter(b)) ||
          (unicode::IsLetter(a) && unicode::IsDigit(b))) {
        out.push_back(U' ');
      }
    }
    out += clusters[i];
  }
  return out;
}

std::u32string StripMarks(const std::u32string& s) {
  std::u32string decomposed = ApplyNormalizer(NfdInstance(), s);
  std::erase_if(decomposed,
                [](char32_t c) { return unicode::IsCombiningMark(c); });
  return ApplyNormalizer(Instance(CanonicalForm::kNFC), decomposed);
}

std::u32string RunPipeline(const std::u32string& input, const NormProfile& p,
                           std::vector<std::string>& warnings) {
  const icu::Normalizer2& canonical = Instance(p.canonical_form);
  std::u32string s = ApplyNormalizer(canonical, input);
  if (p.strip_markup) {
    std::u32string prev;
    do {
      prev = s;
      s = StripMarkupOnce(prev, warnings);
    } while (s != prev);
  }
  if (p.rejoin_hyphenation) {
    while (RejoinHyphenationOnce(s)) {
    }
  }
  if (p.unify_elision) {
    for (char32_t& c : s) {
      if (IsElision(c)) c = kElisionTarget;
    }
  }
  if (p.isolate_brackets) s = IsolateBrackets(s);
  if (p.split_digit_letter) s = SplitDigitLetter(s);
  if (p.strip_diacritics) s = StripMarks(s);
  if (p.fold_case) {
    for (char32_t& c : s) c = unicode::ToLower(c);
  }
  if (p.final_sigma_to_sigma) {
    for (char32_t& c : s) {
      if (c == kFinalSigma) c = kSigma;
    }
  }
  if (p.strip_spaces) {
    std::erase_if(s, [](char32_t c) { return unicode::IsWhitespace(c); });
  }
  return ApplyNormalizer(canonical, s);
}

}  // namespace

NormProfile NormProfile::Raw() { return NormProfile{}; }

NormProfile NormProfile::NoDiacritics() {
  NormProfile p;
  p.strip_diacritics = true;
  return p;
}

NormProfile NormProfile::Rq2() {
  NormProfile p;
  p.strip_diacritics = true;
  p.strip_spaces = true;
  return p;
}

NormProfile NormProfile::Taxonomy() {
  NormProfile p;
  p.strip_markup = true;
  p.rejoin_hyphenation = true;
  p.unify_elision = true;
  p.isolate_brackets = true;
  p.split_digit_letter = true;
  return p;
}

NormProfile NormProfile::Rq3() {
  NormProfile p;
  p.canonical_form = CanonicalForm::kNFKC;
  p.strip_markup = true;
  return p;
}

std::optional<NormProfile> NormProfile::FromPreset(std::string_view name) {
  if (name == "raw") return Raw();
  if (name == "no-diac") return NoDiacritics();
  if (name == "rq2") return Rq2();
  if (name == "taxonomy") return Taxonomy();
  if (name == "rq3") return Rq3();
  return std::nullopt;
}

const std::u32string& IsolatedBrackets() {
  static const std::u32string kSet = U"[]()—–";
  return kSet;
}

NormalizeResult NormalizePageWithWarnings(std::string_view text,
                                          const NormProfile& profile) {
  NormalizeResult result;
  std::u32string current = unicode::Decode(text);
  if (current.empty()) return result;
  // Later stages can expose patterns an earlier stage acts on (a stripped
  // space that completes a tag, a removed mark that uncovers a digit-letter
  // boundary), so the pipeline is iterated until stable.
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    std::vector<std::string> pass_warnings;
    std::u32string next = RunPipeline(current, profile, pass_warnings);
    if (pass == 0) result.warnings = std::move(pass_warnings);
    if (next == current) break;
    current = std::move(next);
  }
  result.text = unicode::Encode(current);
  return result;
}

std::string NormalizePage(std::string_view text, const NormProfile& profile) {
  return NormalizePageWithWarnings(text, profile).text;
}

std::string StripDiacritics(std::string_view text) {
  return unicode::Encode(StripMarks(unicode::Decode(text)));
}

std::string BareLetterForm(std::string_view word) {
  std::u32string s = StripMarks(unicode::Decode(word));
  for (char32_t& c : s) {
    c = unicode::ToLower(c);
    if (c == kFinalSigma) c = kSigma;
  }
  return unicode::Encode(s);
}

std::vector<std::string> TokenizeWords(std::string_view text) {
  std::vector<std::string> tokens;
  std::u32string current;
  for (char32_t c : unicode::Decode(text)) {
    if (unicode::IsWhitespace(c)) {
      if (!current.empty()) tokens.push_back(unicode::Encode(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tokens.push_back(unicode::Encode(current));
  return tokens;
}

}  // namespace ocrprobe
