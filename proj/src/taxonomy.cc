#include "ocrprobe/taxonomy.h"

#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

#include "ocrprobe/csv.h"
#include "ocrprobe/textnorm.h"
#include "ocrprobe/unicode.h"

namespace ocrprobe {

std::string_view CategoryName(Category c) {
  switch (c) {
    case Category::kAccentDiacritic:
      return "accent_diacritic";
    case Category::kCharConfusion:
      return "char_confusion";
    case Category::kCrossScript:
      return "cross_script";
    case Category::kWordSubstitution:
      return "word_substitution";
    case Category::kOvergeneration:
      return "overgeneration";
    case Category::kOmission:
      return "omission";
    case Category::kPageFurniture:
      return "page_furniture";
    case Category::kPunctuation:
      return "punctuation";
  }
  return "unknown";
}

std::string_view FineLabelName(FineLabel f) {
  switch (f) {
    case FineLabel::kRealWord:
      return "real_word";
    case FineLabel::kNonWord:
      return "non_word";
    case FineLabel::kSegmentation:
      return "segmentation";
    case FineLabel::kCollapse:
      return "collapse";
  }
  return "unknown";
}

std::optional<Category> CategoryFromName(std::string_view name) {
  for (Category c : kAllCategories) {
    if (CategoryName(c) == name) return c;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Lexicon

Lexicon Lexicon::Load(std::istream& in) {
  const std::string bytes{std::istreambuf_iterator<char>(in),
                          std::istreambuf_iterator<char>()};
  const std::size_t bad = unicode::FindInvalidUtf8(bytes);
  if (bad != std::string::npos) {
    throw EncodingError(
        "lexicon is not valid UTF-8 at byte offset " + std::to_string(bad), bad);
  }
  Lexicon lexicon;
  std::istringstream lines(bytes);
  std::string line;
  while (std::getline(lines, line)) {
    const auto tokens = TokenizeWords(line);
    if (tokens.empty()) continue;
    std::string form = tokens.front();
    for (std::size_t i = 1; i < tokens.size(); ++i) form += " " + tokens[i];
    lexicon.Insert(form);
  }
  return lexicon;
}

Lexicon Lexicon::LoadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open lexicon " + path);
  return Load(in);
}

void Lexicon::Insert(std::string_view form) {
  std::string bare = BareLetterForm(form);
  if (!bare.empty()) forms_.insert(std::move(bare));
}

bool Lexicon::Contains(std::string_view word) const {
  return forms_.contains(BareLetterForm(word));
}

// ---------------------------------------------------------------------------
// Classification

std::u32string TaxonomyConfig::DefaultPunctuation() {
  // Ano teleia U+0387 and the Greek question mark U+037E are listed even
  // though NFC folds them to U+00B7 and ';'.
  return U".,;:!?\u00B7\u0387\u037E\"'\u00AB\u00BB\u201C\u201D\u201E"
         U"\u2018\u2019\u02BC\u1FBD\u2039\u203A-\u2010";
}

namespace {

struct ScriptProfile {
  std::size_t greek = 0;
  std::size_t greek_upper = 0;
  std::size_t latin = 0;
  std::size_t letters = 0;
  std::size_t digits = 0;
};

ScriptProfile Profile(std::string_view token) {
  ScriptProfile p;
  for (char32_t c : unicode::Decode(token)) {
    if (unicode::IsDigit(c)) ++p.digits;
    if (!unicode::IsLetter(c)) continue;
    ++p.letters;
    if (unicode::IsGreekLetter(c)) {
      ++p.greek;
      if (unicode::IsUpper(c)) ++p.greek_upper;
    } else if (unicode::IsLatinLetter(c)) {
      ++p.latin;
    }
  }
  return p;
}

// Numerals, Latin-script words, and all-caps Greek with at least two letters.
bool IsFurnitureToken(std::string_view token) {
  const ScriptProfile p = Profile(token);
  if (p.digits > 0 && p.letters == 0) return true;
  if (p.latin > 0 && p.greek == 0) return true;
  return p.greek >= 2 && p.greek == p.greek_upper && p.latin == 0 &&
         p.letters >= 2;
}

std::u32string WithoutMarks(std::string_view token, const std::u32string& set) {
  std::u32string out = unicode::Decode(token);
  std::erase_if(out, [&](char32_t c) { return set.find(c) != std::u32string::npos; });
  return out;
}

bool IsCrossScript(const ScriptProfile& ref, const ScriptProfile& hyp) {
  return (ref.greek > 0 && ref.latin == 0 && hyp.latin > 0) ||
         (ref.latin > 0 && ref.greek == 0 && hyp.greek > 0);
}

// True when op `index` sits in a run of at least `min_run` identical tokens
// of the hypothesis sequence.
bool InCollapseRun(std::span<const AlignOp> context, std::size_t index,
                   std::size_t min_run) {
  const AlignOp& op = context[index];
  if (!op.hyp_token) return false;
  std::vector<const std::string*> hyp;
  std::size_t own = 0;
  for (std::size_t i = 0; i < context.size(); ++i) {
    if (!context[i].hyp_token) continue;
    if (i == index) own = hyp.size();
    hyp.push_back(&*context[i].hyp_token);
  }
  std::size_t lo = own;
  std::size_t hi = own;
  while (lo > 0 && *hyp[lo - 1] == *hyp[own]) --lo;
  while (hi + 1 < hyp.size() && *hyp[hi + 1] == *hyp[own]) ++hi;
  return hi - lo + 1 >= min_run;
}

// Split (ref word read as several hyp words) or merge (several ref words
// read as one hyp word) around a substitution.
bool IsSegmentation(std::span<const AlignOp> context, std::size_t index) {
  const AlignOp& op = context[index];
  auto check = [&](OpKind neighbor_kind, bool use_hyp) {
    std::vector<std::string> left;
    std::vector<std::string> right;
    for (std::size_t i = index; i > 0 && context[i - 1].kind == neighbor_kind;
         --i) {
      const auto& n = context[i - 1];
      left.insert(left.begin(), use_hyp ? *n.hyp_token : *n.ref_token);
    }
    for (std::size_t i = index + 1;
         i < context.size() && context[i].kind == neighbor_kind; ++i) {
      const auto& n = context[i];
      right.push_back(use_hyp ? *n.hyp_token : *n.ref_token);
    }
    const std::string& middle = use_hyp ? *op.hyp_token : *op.ref_token;
    const std::string target = BareLetterForm(use_hyp ? *op.ref_token : *op.hyp_token);
    for (std::size_t a = 0; a <= left.size(); ++a) {
      for (std::size_t b = 0; b <= right.size(); ++b) {
        if (a + b == 0) continue;
        std::string joined;
        for (std::size_t k = left.size() - a; k < left.size(); ++k) joined += left[k];
        joined += middle;
        for (std::size_t k = 0; k < b; ++k) joined += right[k];
        if (BareLetterForm(joined) == target) return true;
      }
    }
    return false;
  };
  return check(OpKind::kInsert, true) || check(OpKind::kDelete, false);
}

CategoryLabel ClassifySubstitution(std::span<const AlignOp> context,
                                   std::size_t index, const Lexicon& lexicon,
                                   const TaxonomyConfig& config) {
  const AlignOp& op = context[index];
  const std::string& ref = *op.ref_token;
  const std::string& hyp = *op.hyp_token;

  if (WithoutMarks(ref, config.punctuation) ==
      WithoutMarks(hyp, config.punctuation)) {
    return {Category::kPunctuation, std::nullopt};
  }
  const std::string ref_bare = BareLetterForm(ref);
  const std::string hyp_bare = BareLetterForm(hyp);
  if (ref_bare == hyp_bare) return {Category::kAccentDiacritic, std::nullopt};
  if (IsCrossScript(Profile(ref), Profile(hyp))) {
    return {Category::kCrossScript, std::nullopt};
  }
  if (EditDistance(unicode::Decode(ref_bare), unicode::Decode(hyp_bare)) <=
      config.max_confusion_edits) {
    return {Category::kCharConfusion, std::nullopt};
  }
  if (IsSegmentation(context, index)) {
    return {Category::kWordSubstitution, FineLabel::kSegmentation};
  }
  return {Category::kWordSubstitution, lexicon.Contains(hyp)
                                           ? FineLabel::kRealWord
                                           : FineLabel::kNonWord};
}

}  // namespace

CategoryLabel ClassifyOp(std::span<const AlignOp> context, std::size_t index,
                         const Lexicon& lexicon, const TaxonomyConfig& config) {
  if (index >= context.size()) {
    throw std::out_of_range("op index outside context");
  }
  const AlignOp& op = context[index];
  if (op.kind == OpKind::kMatch) {
    throw std::invalid_argument("cannot classify a Match op");
  }
  if (InCollapseRun(context, index, config.collapse_run)) {
    return {Category::kOvergeneration, FineLabel::kCollapse};
  }
  if (op.kind == OpKind::kInsert || op.kind == OpKind::kDelete) {
    const std::string& token =
        op.kind == OpKind::kInsert ? *op.hyp_token : *op.ref_token;
    if (IsFurnitureToken(token)) return {Category::kPageFurniture, std::nullopt};
    return {op.kind == OpKind::kDelete ? Category::kOmission
                                       : Category::kOvergeneration,
            std::nullopt};
  }
  return ClassifySubstitution(context, index, lexicon, config);
}

CategoryLabel ClassifyOp(const AlignOp& op, const Lexicon& lexicon,
                         const TaxonomyConfig& config) {
  return ClassifyOp(std::span<const AlignOp>(&op, 1), 0, lexicon, config);
}

std::vector<ErrorRecord> ClassifyPage(std::span<const AlignOp> ops,
                                      const Lexicon& lexicon,
                                      std::string_view page_id,
                                      std::string_view system_id,
                                      const TaxonomyConfig& config) {
  std::vector<ErrorRecord> records;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (ops[i].kind == OpKind::kMatch) continue;
    records.push_back({ops[i], ClassifyOp(ops, i, lexicon, config),
                       std::string(page_id), std::string(system_id)});
  }
  return records;
}

CategoryShares ComputeCategoryShares(std::span<const ErrorRecord> records,
                                     std::size_t gt_word_count) {
  if (gt_word_count == 0) {
    throw std::invalid_argument("ground-truth word count must be positive");
  }
  CategoryShares out;
  for (const auto& r : records) {
    ++out.by_category[static_cast<std::size_t>(r.category.value)].count;
  }
  out.total = records.size();
  const double words = static_cast<double>(gt_word_count);
  for (auto& s : out.by_category) {
    s.share = out.total == 0 ? 0.0
                             : static_cast<double>(s.count) /
                                   static_cast<double>(out.total);
    s.rate_per_1000 = 1000.0 * static_cast<double>(s.count) / words;
  }
  out.total_rate_per_1000 = 1000.0 * static_cast<double>(out.total) / words;
  return out;
}

void WriteErrorCsv(std::ostream& out, std::span<const ErrorRecord> records) {
  out << "page_id,system_id,kind,ref_token,hyp_token,category,fine\n";
  for (const auto& r : records) {
    out << csv::Escape(r.page_id) << ',' << csv::Escape(r.system_id) << ','
        << OpKindName(r.op.kind) << ','
        << csv::Escape(r.op.ref_token.value_or("")) << ','
        << csv::Escape(r.op.hyp_token.value_or("")) << ','
        << CategoryName(r.category.value) << ','
        << (r.category.fine ? FineLabelName(*r.category.fine) : "") << '\n';
  }
}

}  // namespace ocrprobe
