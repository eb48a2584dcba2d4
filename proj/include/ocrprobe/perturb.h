#ifndef OCRPROBE_PERTURB_H_
#define OCRPROBE_PERTURB_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ocrprobe {

enum class Axis { kWord, kChar };
enum class Variant { kOriginal, kSwap, kShuffle, kLocal, kReverse, kRandom };

std::string_view AxisName(Axis axis);
std::string_view VariantName(Variant variant);

// Fully determines one perturbation. `p` is only meaningful for Swap and
// Shuffle.
struct PerturbSpec {
  Axis axis = Axis::kWord;
  Variant variant = Variant::kOriginal;
  double p = 0.0;
  std::uint64_t seed = 0;

  // "original", or "<axis>_<variant>" with a "_p<percent>" suffix for
  // Swap/Shuffle, e.g. "char_swap_p10".
  std::string ConditionName() const;
  static std::optional<PerturbSpec> FromConditionName(std::string_view name,
                                                      std::uint64_t seed);
};

// Applies `spec` to `text`, one paragraph per line. Whitespace between
// tokens is kept in place; only token content moves.
//
// Word axis acts on the whitespace tokens of each paragraph. Char axis acts
// on the letter core of each token (first to last letter, grapheme
// clusters as units); leading and trailing non-letters stay put.
//
//   Swap     word: left-to-right, Bernoulli(p) at each position, on success
//            swap with the next token and skip it.
//            char: each word with >= 2 units is picked with probability p;
//            a picked word swaps one uniformly chosen adjacent pair.
//   Shuffle  word: per paragraph, ceil(p*N) tokens are removed and each is
//            reinserted at a uniform index of the shrinking list.
//            char: ceil(p*N) of the document's N words with >= 2 units are
//            fully scrambled.
//   Local    shuffle inside consecutive windows of three units.
//   Reverse  reverse the tokens of each paragraph, or each word's core.
//   Random   per sentence: shuffle its tokens (word), or pool every core
//            unit of its words, shuffle, and refill the words in order so
//            each keeps its length (char).
std::string Perturb(std::string_view text, const PerturbSpec& spec);

// The nine perturbed conditions of each axis plus the shared "original",
// each seeded by DeriveSeed(seed, condition name).
std::vector<PerturbSpec> SuiteSpecs(std::uint64_t seed);
std::map<std::string, std::string> PerturbationSuite(std::string_view text,
                                                     std::uint64_t seed);

// Sentence terminators for the Random variant: . · ; ! and the Greek
// ano teleia / question mark.
bool IsSentenceTerminator(char32_t c);

}  // namespace ocrprobe

#endif  // OCRPROBE_PERTURB_H_
