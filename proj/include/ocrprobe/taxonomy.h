#ifndef OCRPROBE_TAXONOMY_H_
#define OCRPROBE_TAXONOMY_H_

#include <array>
#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ocrprobe/align.h"

namespace ocrprobe {

enum class Category {
  kAccentDiacritic,
  kCharConfusion,
  kCrossScript,
  kWordSubstitution,
  kOvergeneration,
  kOmission,
  kPageFurniture,
  kPunctuation,
};
inline constexpr std::size_t kNumCategories = 8;

enum class FineLabel { kRealWord, kNonWord, kSegmentation, kCollapse };

struct CategoryLabel {
  Category value = Category::kOvergeneration;
  std::optional<FineLabel> fine;

  bool operator==(const CategoryLabel&) const = default;
};

std::string_view CategoryName(Category c);
std::string_view FineLabelName(FineLabel f);
std::optional<Category> CategoryFromName(std::string_view name);

inline constexpr std::array<Category, kNumCategories> kAllCategories = {
    Category::kAccentDiacritic, Category::kCharConfusion,
    Category::kCrossScript,     Category::kWordSubstitution,
    Category::kOvergeneration,  Category::kOmission,
    Category::kPageFurniture,   Category::kPunctuation,
};

// Set of bare-letter word forms. Read-only after loading.
class Lexicon {
 public:
  Lexicon() = default;

  // One form per line, UTF-8. Throws EncodingError with the byte offset of
  // the first malformed sequence.
  static Lexicon Load(std::istream& in);
  static Lexicon LoadFile(const std::string& path);

  // Stores BareLetterForm(form); blank input is ignored.
  void Insert(std::string_view form);
  // Looks up BareLetterForm(word).
  bool Contains(std::string_view word) const;
  std::size_t size() const { return forms_.size(); }
  const std::unordered_set<std::string>& forms() const { return forms_; }

 private:
  std::unordered_set<std::string> forms_;
};

// Rules that are data rather than logic.
struct TaxonomyConfig {
  // Marks whose sole difference makes a substitution a punctuation error.
  std::u32string punctuation = DefaultPunctuation();
  std::size_t collapse_run = 5;
  std::size_t max_confusion_edits = 2;

  static std::u32string DefaultPunctuation();
};

// Classifies context[index], which must not be a Match (throws
// std::invalid_argument otherwise). `context` is the page's full op sequence.
CategoryLabel ClassifyOp(std::span<const AlignOp> context, std::size_t index,
                         const Lexicon& lexicon,
                         const TaxonomyConfig& config = {});

// Convenience form for a single op without surrounding context.
CategoryLabel ClassifyOp(const AlignOp& op, const Lexicon& lexicon,
                         const TaxonomyConfig& config = {});

struct ErrorRecord {
  AlignOp op;
  CategoryLabel category;
  std::string page_id;
  std::string system_id;
};

std::vector<ErrorRecord> ClassifyPage(std::span<const AlignOp> ops,
                                      const Lexicon& lexicon,
                                      std::string_view page_id,
                                      std::string_view system_id,
                                      const TaxonomyConfig& config = {});

struct CategoryShare {
  std::size_t count = 0;
  double share = 0.0;
  double rate_per_1000 = 0.0;
};

struct CategoryShares {
  std::array<CategoryShare, kNumCategories> by_category{};
  std::size_t total = 0;
  double total_rate_per_1000 = 0.0;

  const CategoryShare& operator[](Category c) const {
    return by_category[static_cast<std::size_t>(c)];
  }
};

// Throws std::invalid_argument when gt_word_count == 0.
CategoryShares ComputeCategoryShares(std::span<const ErrorRecord> records,
                                     std::size_t gt_word_count);

// Header plus one row per record: page_id, system_id, kind, ref_token,
// hyp_token, category, fine.
void WriteErrorCsv(std::ostream& out, std::span<const ErrorRecord> records);

}  // namespace ocrprobe

#endif  // OCRPROBE_TAXONOMY_H_
