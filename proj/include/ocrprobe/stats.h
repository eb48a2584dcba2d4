#ifndef OCRPROBE_STATS_H_
#define OCRPROBE_STATS_H_

#include <cstddef>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ocrprobe {

struct PairedSample {
  std::string page_id;
  double baseline = 0.0;
  double treated = 0.0;
  double diff() const { return treated - baseline; }
};

enum class Direction { kTreatedGreater, kTreatedLess };

std::string_view DirectionName(Direction d);

// Largest number of nonzero differences handled by exact enumeration.
inline constexpr std::size_t kWilcoxonExactLimit = 12;

// Paired one-sided Wilcoxon signed-rank test. Zero differences are dropped,
// ties share midranks. Exact null distribution up to kWilcoxonExactLimit
// nonzero differences, normal approximation with tie and continuity
// correction above. Throws std::invalid_argument if every difference is 0.
double WilcoxonOneSided(std::span<const PairedSample> samples,
                        Direction direction);

// Same test on raw differences.
double WilcoxonOneSided(std::span<const double> diffs, Direction direction);

// "***" below .001, "**" below .01, "*" below .05, "ns" otherwise.
std::string StarCode(double p);

struct DeltaSummary {
  double delta_median = 0.0;
  double delta_mean = 0.0;
  std::size_t n_help = 0;
  std::size_t n_tie = 0;
  std::size_t n_hurt = 0;
  double p_value = 1.0;
  std::string stars = "ns";
  std::size_t n_pages() const { return n_help + n_tie + n_hurt; }
};

// Differences of medians and means (treated minus baseline), per-page
// help/tie/hurt counts (help = lower treated rate) and a one-sided Wilcoxon
// p. When every page ties the test is undefined and p is reported as 1.
// Throws std::invalid_argument listing pages present on one side only.
DeltaSummary DeltaTable(const std::map<std::string, double>& baseline,
                        const std::map<std::string, double>& treated,
                        Direction direction);

struct DeltaRow {
  std::string system_id;
  std::string intervention;
  DeltaSummary summary;
};

void WriteDeltaCsv(std::ostream& out, std::span<const DeltaRow> rows);

}  // namespace ocrprobe

#endif  // OCRPROBE_STATS_H_
