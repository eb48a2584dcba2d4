#ifndef OCRPROBE_HARNESS_RQ2_H_
#define OCRPROBE_HARNESS_RQ2_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ocrprobe/harness/config.h"
#include "ocrprobe/harness/corpus.h"
#include "ocrprobe/perturb.h"

namespace ocrprobe::harness {

// condition -> doc_id -> text.
using ConditionTexts = std::map<std::string, std::map<std::string, std::string>>;

// Applies the full perturbation suite to every document.
ConditionTexts PerturbCorpus(const std::map<std::string, std::string>& docs,
                             std::uint64_t seed, std::size_t threads = 1);

// Writes <dir>/<condition>/<doc_id>.txt plus manifest.json (seed, the spec
// of every condition, SHA-256 of every file).
void WritePerturbedCorpus(const ConditionTexts& texts, std::uint64_t seed,
                          const std::filesystem::path& dir);

// Reads the layout written above: one subdirectory per condition.
ConditionTexts LoadPerturbedCorpus(const std::filesystem::path& dir);

struct Rq2PageRow {
  std::string system_id;
  std::string condition;
  std::string page_id;
  double cer = 0.0;
};

struct Rq2TableRow {
  std::string system_id;
  std::string condition;
  PerturbSpec spec;
  std::size_t n_pages = 0;
  double median_cer = 0.0;
  double mean_cer = 0.0;
  // Against "original" on the pages both conditions share. Absent for the
  // original row itself.
  std::optional<double> delta_median;
  std::optional<double> delta_mean;
  std::optional<double> p_value;
  std::string stars;
};

struct Rq2Result {
  std::vector<Rq2PageRow> pages;
  std::vector<Rq2TableRow> table;
  // Pages left out by the single-column filter.
  std::vector<std::string> excluded_pages;
};

// Scores each system's prediction for each condition against that
// condition's ground truth under the rq2 profile. Predictions carry the
// condition name; `metadata` supplies layouts (pages flagged two-column
// are dropped). Throws InputError for condition names the suite does not
// define or when "original" is missing.
Rq2Result RunRq2(const ConditionTexts& gt, const std::vector<Prediction>& predictions,
                 const std::map<std::string, PageMeta>& metadata,
                 const RunConfig& config);

// rq2_page_cer.csv, rq2_table.csv, rq2_series.csv, rq2_excluded.txt.
void WriteRq2(const Rq2Result& result, const std::filesystem::path& dir);

}  // namespace ocrprobe::harness

#endif  // OCRPROBE_HARNESS_RQ2_H_
