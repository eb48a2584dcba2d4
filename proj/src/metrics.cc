#include "ocrprobe/metrics.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ocrprobe/align.h"
#include "ocrprobe/unicode.h"

namespace ocrprobe {

EditCounts CharEdits(std::string_view ref, std::string_view hyp,
                     const NormProfile& profile) {
  const std::u32string r = unicode::Decode(NormalizePage(ref, profile));
  const std::u32string h = unicode::Decode(NormalizePage(hyp, profile));
  if (r.empty()) {
    throw std::invalid_argument("reference is empty after normalization");
  }
  return {EditDistance(r, h), r.size()};
}

EditCounts WordEdits(std::string_view ref, std::string_view hyp,
                     const NormProfile& profile) {
  const auto r = TokenizeWords(NormalizePage(ref, profile));
  const auto h = TokenizeWords(NormalizePage(hyp, profile));
  if (r.empty()) {
    throw std::invalid_argument("reference has no words after normalization");
  }
  return {EditDistance<std::string>(r, h), r.size()};
}

double Cer(std::string_view ref, std::string_view hyp,
           const NormProfile& profile) {
  return CharEdits(ref, hyp, profile).rate();
}

double Wer(std::string_view ref, std::string_view hyp,
           const NormProfile& profile) {
  return WordEdits(ref, hyp, profile).rate();
}

double Median(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty sequence");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid),
                   v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return lower + (upper - lower) / 2.0;
}

MetricSummary Summarize(std::span<const double> per_page) {
  if (per_page.empty()) {
    throw std::invalid_argument("cannot summarize zero pages");
  }
  MetricSummary s;
  s.n_pages = per_page.size();
  s.mean = std::accumulate(per_page.begin(), per_page.end(), 0.0) /
           static_cast<double>(per_page.size());
  s.median = Median(per_page);
  return s;
}

}  // namespace ocrprobe
