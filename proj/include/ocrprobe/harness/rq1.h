#ifndef OCRPROBE_HARNESS_RQ1_H_
#define OCRPROBE_HARNESS_RQ1_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ocrprobe/harness/config.h"
#include "ocrprobe/harness/corpus.h"
#include "ocrprobe/metrics.h"
#include "ocrprobe/taxonomy.h"

namespace ocrprobe::harness {

struct Rq1PageRow {
  std::string system_id;
  std::string page_id;
  double cer_raw = 0.0;
  double wer_raw = 0.0;
  double cer_no_diac = 0.0;
  double wer_no_diac = 0.0;
  std::size_t gt_words = 0;
  std::size_t errors = 0;
};

struct Rq1SystemSummary {
  std::string system_id;
  MetricSummary cer_raw;
  MetricSummary wer_raw;
  MetricSummary cer_no_diac;
  MetricSummary wer_no_diac;
  CategoryShares shares;
};

struct Rq1Result {
  // Ordered by system, then page.
  std::vector<Rq1PageRow> pages;
  std::vector<Rq1SystemSummary> systems;
  std::vector<ErrorRecord> errors;
};

// Scores every plain-run prediction under the raw and no-diac profiles and
// classifies word errors after taxonomy normalization.
Rq1Result RunRq1(const Corpus& corpus, const Lexicon& lexicon,
                 const RunConfig& config);

// rq1_page_metrics.csv, rq1_summary.json, rq1_errors.csv, rq1_shares.csv.
void WriteRq1(const Rq1Result& result, const std::filesystem::path& dir);

}  // namespace ocrprobe::harness

#endif  // OCRPROBE_HARNESS_RQ1_H_
