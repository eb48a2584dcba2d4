#ifndef OCRPROBE_TEXTNORM_H_
#define OCRPROBE_TEXTNORM_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ocrprobe {

enum class CanonicalForm { kNFC, kNFKC };

// Switches for the normalization pipeline. Stages always run in this order:
// canonical form, markup strip, hyphenation rejoin, elision unification,
// bracket/dash isolation, digit-letter split, diacritic strip, case fold and
// final sigma, space strip. A closing canonical-form pass recomposes any
// sequences the earlier stages joined.
struct NormProfile {
  CanonicalForm canonical_form = CanonicalForm::kNFC;
  bool strip_markup = false;
  bool rejoin_hyphenation = false;
  bool unify_elision = false;
  bool isolate_brackets = false;
  bool split_digit_letter = false;
  bool strip_diacritics = false;
  bool strip_spaces = false;
  bool fold_case = false;
  bool final_sigma_to_sigma = false;

  bool operator==(const NormProfile&) const = default;

  // Canonical form only.
  static NormProfile Raw();
  // Raw plus diacritic stripping.
  static NormProfile NoDiacritics();
  // Perturbation scoring: diacritics and all whitespace removed.
  static NormProfile Rq2();
  // Word-level error analysis: NFC plus every structural stage.
  static NormProfile Taxonomy();
  // Intervention scoring: NFKC with tag stripping.
  static NormProfile Rq3();

  // Accepts "raw", "no-diac", "rq2", "taxonomy", "rq3".
  static std::optional<NormProfile> FromPreset(std::string_view name);
};

struct NormalizeResult {
  std::string text;
  std::vector<std::string> warnings;
};

NormalizeResult NormalizePageWithWarnings(std::string_view text,
                                          const NormProfile& profile);
std::string NormalizePage(std::string_view text, const NormProfile& profile);

// NFD, drop every combining mark, recompose.
std::string StripDiacritics(std::string_view text);

// Lowercased, diacritic-free form with final sigma mapped to medial sigma.
// Used for lexicon lookup and the small-edit confusion test.
std::string BareLetterForm(std::string_view word);

std::vector<std::string> TokenizeWords(std::string_view text);

// Code points that the bracket/dash isolation stage pads with spaces.
const std::u32string& IsolatedBrackets();

}  // namespace ocrprobe

#endif  // OCRPROBE_TEXTNORM_H_
