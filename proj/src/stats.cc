#include "ocrprobe/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ocrprobe/csv.h"
#include "ocrprobe/metrics.h"

namespace ocrprobe {

namespace {

struct RankedDiffs {
  // Twice the rank, so midranks stay integral.
  std::vector<int> doubled_ranks;
  std::vector<bool> positive;
  // Sum over tie groups of t^3 - t.
  double tie_term = 0.0;
};

RankedDiffs Rank(std::span<const double> diffs) {
  std::vector<double> nonzero;
  for (double d : diffs) {
    if (std::isnan(d)) throw std::invalid_argument("difference is NaN");
    if (d != 0.0) nonzero.push_back(d);
  }
  if (nonzero.empty()) {
    throw std::invalid_argument("all differences are zero; test undefined");
  }
  const std::size_t n = nonzero.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(nonzero[a]) < std::abs(nonzero[b]);
  });
  RankedDiffs r;
  r.doubled_ranks.resize(n);
  r.positive.resize(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n &&
           std::abs(nonzero[order[j + 1]]) == std::abs(nonzero[order[i]])) {
      ++j;
    }
    // Ranks i+1..j+1 share their mean; doubled that is i + j + 2.
    for (std::size_t k = i; k <= j; ++k) {
      r.doubled_ranks[order[k]] = static_cast<int>(i + j + 2);
    }
    const double t = static_cast<double>(j - i + 1);
    r.tie_term += t * t * t - t;
    i = j + 1;
  }
  for (std::size_t i = 0; i < n; ++i) r.positive[i] = nonzero[i] > 0;
  return r;
}

double ExactP(const RankedDiffs& r, int observed, Direction direction) {
  const int total = std::accumulate(r.doubled_ranks.begin(),
                                    r.doubled_ranks.end(), 0);
  // counts[s] = number of sign assignments with doubled positive-rank sum s.
  std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
  counts[0] = 1.0;
  int reach = 0;
  for (int rank : r.doubled_ranks) {
    reach += rank;
    for (int s = reach; s >= rank; --s) {
      counts[static_cast<std::size_t>(s)] += counts[static_cast<std::size_t>(s - rank)];
    }
  }
  double tail = 0.0;
  for (int s = 0; s <= total; ++s) {
    const bool in_tail = direction == Direction::kTreatedGreater ? s >= observed
                                                                 : s <= observed;
    if (in_tail) tail += counts[static_cast<std::size_t>(s)];
  }
  return std::ldexp(tail, -static_cast<int>(r.doubled_ranks.size()));
}

double NormalP(const RankedDiffs& r, int observed, Direction direction) {
  const double n = static_cast<double>(r.doubled_ranks.size());
  const double w = observed / 2.0;
  const double mean = n * (n + 1) / 4.0;
  const double var = n * (n + 1) * (2 * n + 1) / 24.0 - r.tie_term / 48.0;
  const double sd = std::sqrt(var);
  if (direction == Direction::kTreatedGreater) {
    const double z = (w - mean - 0.5) / sd;
    return 0.5 * std::erfc(z / std::sqrt(2.0));
  }
  const double z = (w - mean + 0.5) / sd;
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

}  // namespace

std::string_view DirectionName(Direction d) {
  return d == Direction::kTreatedGreater ? "treated_greater" : "treated_less";
}

double WilcoxonOneSided(std::span<const double> diffs, Direction direction) {
  const RankedDiffs r = Rank(diffs);
  int observed = 0;
  for (std::size_t i = 0; i < r.doubled_ranks.size(); ++i) {
    if (r.positive[i]) observed += r.doubled_ranks[i];
  }
  const double p = r.doubled_ranks.size() <= kWilcoxonExactLimit
                       ? ExactP(r, observed, direction)
                       : NormalP(r, observed, direction);
  return std::clamp(p, 0.0, 1.0);
}

double WilcoxonOneSided(std::span<const PairedSample> samples,
                        Direction direction) {
  std::vector<double> diffs;
  diffs.reserve(samples.size());
  for (const auto& s : samples) diffs.push_back(s.diff());
  return WilcoxonOneSided(diffs, direction);
}

std::string StarCode(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "ns";
}

DeltaSummary DeltaTable(const std::map<std::string, double>& baseline,
                        const std::map<std::string, double>& treated,
                        Direction direction) {
  std::vector<std::string> only_baseline, only_treated;
  for (const auto& [page, _] : baseline) {
    if (!treated.contains(page)) only_baseline.push_back(page);
  }
  for (const auto& [page, _] : treated) {
    if (!baseline.contains(page)) only_treated.push_back(page);
  }
  if (!only_baseline.empty() || !only_treated.empty()) {
    std::string msg = "page sets differ;";
    auto list = [&msg](const char* label, const std::vector<std::string>& pages) {
      if (pages.empty()) return;
      msg += std::string(" ") + label + ":";
      for (const auto& p : pages) msg += " " + p;
    };
    list("missing from treated", only_baseline);
    list("missing from baseline", only_treated);
    throw std::invalid_argument(msg);
  }
  if (baseline.empty()) throw std::invalid_argument("no pages to compare");

  std::vector<double> base_values, treated_values, diffs;
  DeltaSummary s;
  for (const auto& [page, b] : baseline) {
    const double t = treated.at(page);
    base_values.push_back(b);
    treated_values.push_back(t);
    diffs.push_back(t - b);
    if (t < b) {
      ++s.n_help;
    } else if (t > b) {
      ++s.n_hurt;
    } else {
      ++s.n_tie;
    }
  }
  const auto base = Summarize(base_values);
  const auto treat = Summarize(treated_values);
  s.delta_median = treat.median - base.median;
  s.delta_mean = treat.mean - base.mean;
  if (s.n_tie == s.n_pages()) {
    s.p_value = 1.0;
  } else {
    s.p_value = WilcoxonOneSided(diffs, direction);
  }
  s.stars = StarCode(s.p_value);
  return s;
}

void WriteDeltaCsv(std::ostream& out, std::span<const DeltaRow> rows) {
  out << "system_id,intervention,delta_median,delta_mean,n_help,n_tie,n_hurt,"
         "p_value,stars\n";
  for (const auto& row : rows) {
    const auto& s = row.summary;
    out << csv::Escape(row.system_id) << ',' << csv::Escape(row.intervention)
        << ',' << csv::FormatDouble(s.delta_median) << ','
        << csv::FormatDouble(s.delta_mean) << ',' << s.n_help << ','
        << s.n_tie << ',' << s.n_hurt << ',' << csv::FormatDouble(s.p_value)
        << ',' << s.stars << '\n';
  }
}

}  // namespace ocrprobe
