#ifndef OCRPROBE_HARNESS_RQ3_H_
#define OCRPROBE_HARNESS_RQ3_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ocrprobe/harness/config.h"
#include "ocrprobe/harness/corpus.h"
#include "ocrprobe/stats.h"

namespace ocrprobe::harness {

// Condition name under which corrected predictions are ingested.
inline constexpr const char* kCorrectionCondition = "lm_correct";

struct Rq3PageRow {
  std::string system_id;
  std::string condition;
  std::string page_id;
  double cer = 0.0;
};

struct AbstainPageRow {
  std::string system_id;
  std::string page_id;
  double length_ratio = 0.0;
  bool abstained = false;
  double cer = 0.0;
};

struct AbstainSummary {
  std::string system_id;
  std::string baseline;
  double threshold = 0.0;
  std::size_t n_pages = 0;
  std::size_t n_abstained = 0;
  double abstention_rate = 0.0;
  double median_cer_all = 0.0;
  double mean_cer_all = 0.0;
  // Absent when every page abstained.
  std::optional<double> median_cer_kept;
  std::optional<double> mean_cer_kept;
};

struct Rq3Result {
  std::vector<Rq3PageRow> pages;
  std::vector<DeltaRow> deltas;
  std::vector<AbstainPageRow> abstain_pages;
  std::vector<AbstainSummary> abstain;
};

// For every configured (intervention, baseline) pair and every system that
// has predictions for the intervention: CER under the rq3 profile on the
// pages both conditions cover, and a one-sided test that the intervention
// lowers CER. A system with intervention predictions but no baseline, or
// intervention pages the baseline lacks, is a hard error (InputError).
// With an abstain baseline configured, length abstention is applied to
// that condition's predictions and reported on its kept pages.
Rq3Result RunRq3(const Corpus& corpus, const RunConfig& config);

// rq3_page_cer.csv, rq3_delta.csv, and with abstention
// rq3_abstain.csv plus rq3_abstain_pages.csv.
void WriteRq3(const Rq3Result& result, const std::filesystem::path& dir);

// One JSON line per plain-run prediction of `condition`:
// {system_id, page_id, text, exemplars: [{input, output}, ...]}.
std::string CorrectionRequests(const Corpus& corpus, const std::string& condition,
                               const std::vector<Exemplar>& exemplars);

// Reads corrector output ({system_id, page_id, text}) and tags every line
// with kCorrectionCondition.
std::vector<Prediction> ReadCorrections(const std::filesystem::path& path);

}  // namespace ocrprobe::harness

#endif  // OCRPROBE_HARNESS_RQ3_H_
