#ifndef OCRPROBE_METRICS_H_
#define OCRPROBE_METRICS_H_

#include <cstddef>
#include <span>
#include <string_view>

#include "ocrprobe/textnorm.h"

namespace ocrprobe {

// Rates are fractions (0.05 == 5%). Both functions normalize ref and hyp
// with `profile` first and throw std::invalid_argument if the normalized
// reference is empty.
double Cer(std::string_view ref, std::string_view hyp,
           const NormProfile& profile);
double Wer(std::string_view ref, std::string_view hyp,
           const NormProfile& profile);

// Raw counts behind a rate, for reports that want numerators.
struct EditCounts {
  std::size_t edits = 0;
  std::size_t ref_length = 0;
  double rate() const {
    return static_cast<double>(edits) / static_cast<double>(ref_length);
  }
};
EditCounts CharEdits(std::string_view ref, std::string_view hyp,
                     const NormProfile& profile);
EditCounts WordEdits(std::string_view ref, std::string_view hyp,
                     const NormProfile& profile);

struct MetricSummary {
  double mean = 0.0;
  double median = 0.0;
  std::size_t n_pages = 0;
};

// Median of the middle element (odd n) or midpoint of the middle two.
// Throws std::invalid_argument on empty input.
double Median(std::span<const double> values);
MetricSummary Summarize(std::span<const double> per_page);

}  // namespace ocrprobe

#endif  // OCRPROBE_METRICS_H_
