#include "ocrprobe/perturb.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ocrprobe/rng.h"
#include "ocrprobe/unicode.h"

namespace ocrprobe {

std::string_view AxisName(Axis axis) {
  return axis == Axis::kWord ? "word" : "char";
}

std::string_view VariantName(Variant variant) {
  switch (variant) {
    case Variant::kOriginal:
      return "original";
    case Variant::kSwap:
      return "swap";
    case Variant::kShuffle:
      return "shuffle";
    case Variant::kLocal:
      return "local";
    case Variant::kReverse:
      return "reverse";
    case Variant::kRandom:
      return "random";
  }
  return "unknown";
}

std::string PerturbSpec::ConditionName() const {
  if (variant == Variant::kOriginal) return "original";
  std::string name = std::string(AxisName(axis)) + "_" +
                     std::string(VariantName(variant));
  if (variant == Variant::kSwap || variant == Variant::kShuffle) {
    name += "_p" + std::to_string(static_cast<int>(std::lround(p * 100)));
  }
  return name;
}

std::optional<PerturbSpec> PerturbSpec::FromConditionName(std::string_view name,
                                                          std::uint64_t seed) {
  PerturbSpec spec;
  spec.seed = seed;
  if (name == "original") return spec;
  const auto us = name.find('_');
  if (us == std::string_view::npos) return std::nullopt;
  const std::string_view axis = name.substr(0, us);
  std::string_view rest = name.substr(us + 1);
  if (axis == "word") {
    spec.axis = Axis::kWord;
  } else if (axis == "char") {
    spec.axis = Axis::kChar;
  } else {
    return std::nullopt;
  }
  std::string_view variant = rest;
  std::optional<int> percent;
  if (const auto p = rest.find("_p"); p != std::string_view::npos) {
    variant = rest.substr(0, p);
    const std::string digits(rest.substr(p + 2));
    if (digits.empty() ||
        !std::all_of(digits.begin(), digits.end(), ::isdigit)) {
      return std::nullopt;
    }
    percent = std::stoi(digits);
  }
  for (Variant v : {Variant::kSwap, Variant::kShuffle, Variant::kLocal,
                    Variant::kReverse, Variant::kRandom}) {
    if (VariantName(v) == variant) spec.variant = v;
  }
  if (spec.variant == Variant::kOriginal) return std::nullopt;
  const bool needs_p =
      spec.variant == Variant::kSwap || spec.variant == Variant::kShuffle;
  if (needs_p != percent.has_value()) return std::nullopt;
  if (percent) spec.p = *percent / 100.0;
  return spec;
}

bool IsSentenceTerminator(char32_t c) {
  switch (c) {
    case U'.':
    case U'\u00B7':
    case U'\u0387':
    case U';':
    case U'\u037E':
    case U'!':
      return true;
    default:
      return false;
  }
}

namespace {

using Cluster = std::u32string;

// A paragraph split into tokens with the whitespace around them kept
// verbatim: prefix, tok[0], sep[0], tok[1], sep[1], ...
struct Paragraph {
  std::u32string prefix;
  std::vector<std::u32string> tokens;
  std::vector<std::u32string> seps;
};

Paragraph SplitParagraph(const std::u32string& line) {
  Paragraph p;
  std::size_t i = 0;
  while (i < line.size() && unicode::IsWhitespace(line[i])) p.prefix += line[i++];
  while (i < line.size()) {
    std::u32string token;
    while (i < line.size() && !unicode::IsWhitespace(line[i])) token += line[i++];
    std::u32string sep;
    while (i < line.size() && unicode::IsWhitespace(line[i])) sep += line[i++];
    p.tokens.push_back(std::move(token));
    p.seps.push_back(std::move(sep));
  }
  return p;
}

std::u32string JoinParagraph(const Paragraph& p) {
  std::u32string out = p.prefix;
  for (std::size_t i = 0; i < p.tokens.size(); ++i) out += p.tokens[i] + p.seps[i];
  return out;
}

std::vector<std::u32string> SplitLines(const std::u32string& text) {
  std::vector<std::u32string> lines(1);
  for (char32_t c : text) {
    if (c == U'\n') {
      lines.emplace_back();
    } else {
      lines.back().push_back(c);
    }
  }
  return lines;
}

// Word with its letter core isolated.
struct Word {
  std::vector<Cluster> lead;
  std::vector<Cluster> core;
  std::vector<Cluster> trail;
};

Word SplitWord(const std::u32string& token) {
  const auto clusters = unicode::Graphemes(token);
  Word w;
  std::size_t first = clusters.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (unicode::IsLetterCluster(clusters[i])) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first == clusters.size()) {
    w.lead = clusters;
    return w;
  }
  w.lead.assign(clusters.begin(), clusters.begin() + static_cast<std::ptrdiff_t>(first));
  w.core.assign(clusters.begin() + static_cast<std::ptrdiff_t>(first),
                clusters.begin() + static_cast<std::ptrdiff_t>(last + 1));
  w.trail.assign(clusters.begin() + static_cast<std::ptrdiff_t>(last + 1), clusters.end());
  return w;
}

std::u32string JoinWord(const Word& w) {
  std::u32string out;
  for (const auto& part : {&w.lead, &w.core, &w.trail}) {
    for (const auto& c : *part) out += c;
  }
  return out;
}

std::size_t CeilCount(double p, std::size_t n) {
  // Guard against p*n landing a hair above an integer.
  const double x = p * static_cast<double>(n) - 1e-9;
  return x <= 0.0 ? 0 : std::min(n, static_cast<std::size_t>(std::ceil(x)));
}

// First k entries of a uniformly shuffled 0..n-1 (partial Fisher-Yates from
// the front).
std::vector<std::size_t> Sample(Xoshiro256& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.Below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

template <typename T>
void SwapPass(std::vector<T>& units, double p, Xoshiro256& rng) {
  for (std::size_t i = 0; i + 1 < units.size(); ++i) {
    if (rng.Bernoulli(p)) {
      std::swap(units[i], units[i + 1]);
      ++i;
    }
  }
}

template <typename T>
void LocalShuffle(std::vector<T>& units, Xoshiro256& rng) {
  for (std::size_t start = 0; start < units.size(); start += 3) {
    const std::size_t end = std::min(units.size(), start + 3);
    std::vector<T> window(units.begin() + static_cast<std::ptrdiff_t>(start),
                          units.begin() + static_cast<std::ptrdiff_t>(end));
    rng.Shuffle(window);
    std::copy(window.begin(), window.end(),
              units.begin() + static_cast<std::ptrdiff_t>(start));
  }
}

template <typename T>
void Relocate(std::vector<T>& units, double p, Xoshiro256& rng) {
  const std::size_t k = CeilCount(p, units.size());
  if (k == 0) return;
  const auto picked = Sample(rng, units.size(), k);
  std::vector<bool> removed(units.size(), false);
  std::vector<T> moving;
  for (std::size_t i : picked) {
    removed[i] = true;
    moving.push_back(units[i]);
  }
  std::vector<T> kept;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (!removed[i]) kept.push_back(units[i]);
  }
  for (auto& unit : moving) {
    const std::size_t at = static_cast<std::size_t>(rng.Below(kept.size() + 1));
    kept.insert(kept.begin() + static_cast<std::ptrdiff_t>(at), std::move(unit));
  }
  units = std::move(kept);
}

// Token index ranges [begin, end) of the sentences in a paragraph.
std::vector<std::pair<std::size_t, std::size_t>> Sentences(
    const std::vector<std::u32string>& tokens) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!tokens[i].empty() && IsSentenceTerminator(tokens[i].back())) {
      out.emplace_back(begin, i + 1);
      begin = i + 1;
    }
  }
  if (begin < tokens.size()) out.emplace_back(begin, tokens.size());
  return out;
}

void PerturbWords(std::vector<Paragraph>& paragraphs, const PerturbSpec& spec,
                  Xoshiro256& rng) {
  for (auto& para : paragraphs) {
    auto& t = para.tokens;
    switch (spec.variant) {
      case Variant::kOriginal:
        break;
      case Variant::kSwap:
        SwapPass(t, spec.p, rng);
        break;
      case Variant::kShuffle:
        Relocate(t, spec.p, rng);
        break;
      case Variant::kLocal:
        LocalShuffle(t, rng);
        break;
      case Variant::kReverse:
        std::reverse(t.begin(), t.end());
        break;
      case Variant::kRandom:
        for (auto [b, e] : Sentences(t)) {
          std::vector<std::u32string> sentence(t.begin() + static_cast<std::ptrdiff_t>(b),
                                               t.begin() + static_cast<std::ptrdiff_t>(e));
          rng.Shuffle(sentence);
          std::copy(sentence.begin(), sentence.end(),
                    t.begin() + static_cast<std::ptrdiff_t>(b));
        }
        break;
    }
  }
}

void PerturbChars(std::vector<Paragraph>& paragraphs, const PerturbSpec& spec,
                  Xoshiro256& rng) {
  std::vector<std::vector<Word>> words(paragraphs.size());
  for (std::size_t i = 0; i < paragraphs.size(); ++i) {
    for (const auto& token : paragraphs[i].tokens) {
      words[i].push_back(SplitWord(token));
    }
  }

  switch (spec.variant) {
    case Variant::kOriginal:
      break;
    case Variant::kSwap:
      for (auto& para : words) {
        for (auto& w : para) {
          if (w.core.size() < 2 || !rng.Bernoulli(spec.p)) continue;
          const std::size_t k =
              static_cast<std::size_t>(rng.Below(w.core.size() - 1));
          std::swap(w.core[k], w.core[k + 1]);
        }
      }
      break;
    case Variant::kShuffle: {
      std::vector<Word*> eligible;
      for (auto& para : words) {
        for (auto& w : para) {
          if (w.core.size() >= 2) eligible.push_back(&w);
        }
      }
      const std::size_t k = CeilCount(spec.p, eligible.size());
      for (std::size_t i : Sample(rng, eligible.size(), k)) {
        rng.Shuffle(eligible[i]->core);
      }
      break;
    }
    case Variant::kLocal:
      for (auto& para : words) {
        for (auto& w : para) LocalShuffle(w.core, rng);
      }
      break;
    case Variant::kReverse:
      for (auto& para : words) {
        for (auto& w : para) std::reverse(w.core.begin(), w.core.end());
      }
      break;
    case Variant::kRandom:
      for (std::size_t pi = 0; pi < paragraphs.size(); ++pi) {
        for (auto [b, e] : Sentences(paragraphs[pi].tokens)) {
          std::vector<Cluster> pool;
          for (std::size_t i = b; i < e; ++i) {
            pool.insert(pool.end(), words[pi][i].core.begin(), words[pi][i].core.end());
          }
          rng.Shuffle(pool);
          auto next = pool.begin();
          for (std::size_t i = b; i < e; ++i) {
            for (auto& unit : words[pi][i].core) unit = *next++;
          }
        }
      }
      break;
  }

  for (std::size_t i = 0; i < paragraphs.size(); ++i) {
    for (std::size_t j = 0; j < words[i].size(); ++j) {
      paragraphs[i].tokens[j] = JoinWord(words[i][j]);
    }
  }
}

}  // namespace

std::string Perturb(std::string_view text, const PerturbSpec& spec) {
  if (spec.variant == Variant::kOriginal) return std::string(text);
  const std::u32string decoded = unicode::Decode(text);
  std::vector<Paragraph> paragraphs;
  for (const auto& line : SplitLines(decoded)) {
    paragraphs.push_back(SplitParagraph(line));
  }
  Xoshiro256 rng(spec.seed);
  if (spec.axis == Axis::kWord) {
    PerturbWords(paragraphs, spec, rng);
  } else {
    PerturbChars(paragraphs, spec, rng);
  }
  std::u32string out;
  for (std::size_t i = 0; i < paragraphs.size(); ++i) {
    if (i > 0) out += U'\n';
    out += JoinParagraph(paragraphs[i]);
  }
  return unicode::Encode(out);
}

std::vector<PerturbSpec> SuiteSpecs(std::uint64_t seed) {
  std::vector<PerturbSpec> specs;
  specs.push_back(PerturbSpec{Axis::kWord, Variant::kOriginal, 0.0, seed});
  for (Axis axis : {Axis::kWord, Axis::kChar}) {
    for (Variant v : {Variant::kSwap, Variant::kShuffle}) {
      for (double p : {0.05, 0.10, 0.25}) specs.push_back({axis, v, p, 0});
    }
    for (Variant v : {Variant::kLocal, Variant::kReverse, Variant::kRandom}) {
      specs.push_back({axis, v, 0.0, 0});
    }
  }
  for (std::size_t i = 1; i < specs.size(); ++i) {
    specs[i].seed = DeriveSeed(seed, specs[i].ConditionName());
  }
  return specs;
}

std::map<std::string, std::string> PerturbationSuite(std::string_view text,
                                                     std::uint64_t seed) {
  std::map<std::string, std::string> out;
  for (const auto& spec : SuiteSpecs(seed)) {
    out.emplace(spec.ConditionName(), Perturb(text, spec));
  }
  return out;
}

}  // namespace ocrprobe
