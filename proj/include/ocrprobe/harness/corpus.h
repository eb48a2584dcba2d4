#ifndef OCRPROBE_HARNESS_CORPUS_H_
#define OCRPROBE_HARNESS_CORPUS_H_

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ocrprobe::harness {

enum class Layout { kSingleColumn, kTwoColumn, kUnknown };

std::string_view LayoutName(Layout layout);
// "single_column", "two_column", "unknown".
std::optional<Layout> LayoutFromName(std::string_view name);

struct PageRecord {
  std::string page_id;
  std::string edition_id;
  std::string gt_text;
  // Predictions without a condition tag, keyed by system_id.
  std::map<std::string, std::string> predictions;
  Layout layout = Layout::kUnknown;
};

// One line of a predictions file. An empty condition is the plain run of
// the system; other conditions name a perturbation or an intervention.
struct Prediction {
  std::string page_id;
  std::string system_id;
  std::string text;
  std::string condition;
};

struct PageMeta {
  std::string edition_id;
  Layout layout = Layout::kUnknown;
};

// page_id -> text for every *.txt file in `dir` (the stem is the page id).
// Throws InputError on malformed UTF-8 (with byte offset) or empty pages.
std::map<std::string, std::string> LoadGroundTruthDir(const std::filesystem::path& dir);

// Line-delimited {page_id, system_id, text[, condition]}. Blank lines are
// skipped. Errors name the file and line number; duplicate
// (page_id, system_id, condition) triples are rejected.
std::vector<Prediction> ReadPredictionsJsonl(const std::filesystem::path& path);

// Line-delimited {page_id, edition_id?, layout?}.
std::map<std::string, PageMeta> ReadMetadataJsonl(const std::filesystem::path& path);

// (system_id, condition) -> page_id -> text.
using PredictionTable =
    std::map<std::pair<std::string, std::string>, std::map<std::string, std::string>>;

struct Corpus {
  // Sorted by page_id.
  std::vector<PageRecord> pages;
  PredictionTable predictions;
  std::set<std::string> systems;
  // Human-readable notes: missing systems per page, predictions for pages
  // without ground truth.
  std::vector<std::string> warnings;

  const PageRecord* Find(std::string_view page_id) const;
  // page_id -> text for one system and condition; empty if none.
  const std::map<std::string, std::string>& For(const std::string& system_id,
                                                const std::string& condition = "") const;
};

struct IngestOptions {
  // Systems every page is expected to have; empty means every system seen.
  std::vector<std::string> systems;
  std::optional<std::filesystem::path> metadata;
};

// Joins ground truth and predictions on page_id. Pages missing a system
// stay in the corpus (and in unpaired summaries) and are listed in
// `warnings`; paired analyses skip them for that system.
Corpus IngestCorpus(const std::filesystem::path& gt_dir,
                    const std::vector<std::filesystem::path>& prediction_files,
                    const IngestOptions& options = {});

// In-memory variant used by tests and the perturbation pipeline.
Corpus BuildCorpus(const std::map<std::string, std::string>& gt,
                   const std::vector<Prediction>& predictions,
                   const std::map<std::string, PageMeta>& metadata = {},
                   const std::vector<std::string>& systems = {});

}  // namespace ocrprobe::harness

#endif  // OCRPROBE_HARNESS_CORPUS_H_
