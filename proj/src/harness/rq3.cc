#include "ocrprobe/harness/rq3.h"

#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "json.hpp"
#include "ocrprobe/csv.h"
#include "ocrprobe/harness/io.h"
#include "ocrprobe/interventions.h"
#include "ocrprobe/metrics.h"
#include "ocrprobe/unicode.h"

namespace ocrprobe::harness {

using nlohmann::json;

namespace {

std::string ConditionLabel(const std::string& condition) {
  return condition.empty() ? "plain" : condition;
}

}  // namespace

Rq3Result RunRq3(const Corpus& corpus, const RunConfig& config) {
  // Validate pairing before any scoring.
  std::set<std::pair<std::string, std::string>> needed;  // (system, condition)
  std::vector<std::tuple<std::string, std::string, std::string>> cells;
  for (const InterventionPair& pair : config.rq3_pairs) {
    bool any = false;
    for (const std::string& system : corpus.systems) {
      const auto& treated = corpus.For(system, pair.intervention);
      if (treated.empty()) continue;
      any = true;
      const auto& base = corpus.For(system, pair.baseline);
      if (base.empty()) {
        throw InputError("system \"" + system + "\": intervention \"" +
                         pair.intervention + "\" has no matched baseline \"" +
                         ConditionLabel(pair.baseline) + "\"");
      }
      std::vector<std::string> unmatched;
      for (const auto& [page, _] : treated) {
        if (!base.contains(page)) unmatched.push_back(page);
      }
      if (!unmatched.empty()) {
        std::string msg = "system \"" + system + "\": intervention \"" +
                          pair.intervention + "\" pages missing from baseline \"" +
                          ConditionLabel(pair.baseline) + "\":";
        for (const auto& p : unmatched) msg += " " + p;
        throw InputError(msg);
      }
      needed.insert({system, pair.intervention});
      needed.insert({system, pair.baseline});
      cells.emplace_back(system, pair.intervention, pair.baseline);
    }
    if (!any) {
      throw InputError("intervention \"" + pair.intervention +
                       "\" has no predictions for any system");
    }
  }
  if (config.abstain_baseline) {
    bool any = false;
    for (const std::string& system : corpus.systems) {
      if (corpus.For(system, *config.abstain_baseline).empty()) continue;
      needed.insert({system, *config.abstain_baseline});
      any = true;
    }
    if (!any) {
      throw InputError("abstain baseline \"" +
                       ConditionLabel(*config.abstain_baseline) +
                       "\" has no predictions");
    }
  }

  struct Task {
    const std::string* system;
    const std::string* condition;
    const PageRecord* page;
    const std::string* pred;
  };
  std::vector<Task> tasks;
  for (const auto& [system, condition] : needed) {
    for (const auto& [page_id, text] : corpus.For(system, condition)) {
      tasks.push_back({&system, &condition, corpus.Find(page_id), &text});
    }
  }
  const NormProfile profile = NormProfile::Rq3();
  Rq3Result result;
  result.pages.resize(tasks.size());
  std::vector<std::pair<std::size_t, std::size_t>> lengths(tasks.size());
  ParallelFor(tasks.size(), config.threads ? config.threads : DefaultThreads(),
              [&](std::size_t i) {
                const Task& t = tasks[i];
                const std::string ref = NormalizePage(t.page->gt_text, profile);
                const std::string hyp = NormalizePage(*t.pred, profile);
                const std::size_t ref_len = unicode::Length(ref);
                if (ref_len == 0) {
                  throw std::invalid_argument("page " + t.page->page_id +
                                              ": reference is empty after normalization");
                }
                result.pages[i] = {*t.system, *t.condition, t.page->page_id,
                                   Cer(t.page->gt_text, *t.pred, profile)};
                lengths[i] = {unicode::Length(hyp), ref_len};
              });

  std::map<std::pair<std::string, std::string>, std::map<std::string, double>> cer;
  std::map<std::pair<std::string, std::string>,
           std::map<std::string, std::pair<std::size_t, std::size_t>>>
      length;
  for (std::size_t i = 0; i < result.pages.size(); ++i) {
    const auto& row = result.pages[i];
    cer[{row.system_id, row.condition}][row.page_id] = row.cer;
    length[{row.system_id, row.condition}][row.page_id] = lengths[i];
  }

  for (const auto& [system, intervention, baseline] : cells) {
    const auto& treated = cer.at({system, intervention});
    const auto& base_all = cer.at({system, baseline});
    std::map<std::string, double> base;
    for (const auto& [page, _] : treated) base[page] = base_all.at(page);
    result.deltas.push_back(
        {system, intervention, DeltaTable(base, treated, Direction::kTreatedLess)});
  }

  if (config.abstain_baseline) {
    const double threshold = config.interventions.abstain_threshold;
    for (const std::string& system : corpus.systems) {
      auto it = cer.find({system, *config.abstain_baseline});
      if (it == cer.end()) continue;
      const auto& lengths_by_page = length.at({system, *config.abstain_baseline});
      AbstainSummary s;
      s.system_id = system;
      s.baseline = *config.abstain_baseline;
      s.threshold = threshold;
      std::vector<double> all, kept;
      for (const auto& [page, value] : it->second) {
        const auto [pred_len, ref_len] = lengths_by_page.at(page);
        const double r = static_cast<double>(pred_len) / static_cast<double>(ref_len);
        const bool abstain =
            LengthAbstain(pred_len, ref_len, threshold) == AbstainDecision::kAbstain;
        result.abstain_pages.push_back({system, page, r, abstain, value});
        all.push_back(value);
        if (abstain) {
          ++s.n_abstained;
        } else {
          kept.push_back(value);
        }
      }
      s.n_pages = all.size();
      s.abstention_rate = static_cast<double>(s.n_abstained) /
                          static_cast<double>(s.n_pages);
      const MetricSummary all_s = Summarize(all);
      s.median_cer_all = all_s.median;
      s.mean_cer_all = all_s.mean;
      if (!kept.empty()) {
        const MetricSummary kept_s = Summarize(kept);
        s.median_cer_kept = kept_s.median;
        s.mean_cer_kept = kept_s.mean;
      }
      result.abstain.push_back(s);
    }
  }
  return result;
}

void WriteRq3(const Rq3Result& result, const std::filesystem::path& dir) {
  using csv::Escape;
  using csv::FormatDouble;
  std::ostringstream pages;
  pages << "system_id,condition,page_id,cer\n";
  for (const auto& r : result.pages) {
    pages << Escape(r.system_id) << ',' << Escape(ConditionLabel(r.condition))
          << ',' << Escape(r.page_id) << ',' << FormatDouble(r.cer) << '\n';
  }
  WriteFile(dir / "rq3_page_cer.csv", pages.str());

  std::ostringstream deltas;
  WriteDeltaCsv(deltas, result.deltas);
  WriteFile(dir / "rq3_delta.csv", deltas.str());

  if (result.abstain.empty()) return;
  auto opt = [](const std::optional<double>& v) {
    return v ? FormatDouble(*v) : std::string();
  };
  std::ostringstream summary;
  summary << "system_id,baseline,threshold,n_pages,n_abstained,abstention_rate,"
             "median_cer_all,mean_cer_all,median_cer_kept,mean_cer_kept\n";
  for (const auto& s : result.abstain) {
    summary << Escape(s.system_id) << ',' << Escape(ConditionLabel(s.baseline))
            << ',' << FormatDouble(s.threshold) << ',' << s.n_pages << ','
            << s.n_abstained << ',' << FormatDouble(s.abstention_rate) << ','
            << FormatDouble(s.median_cer_all) << ',' << FormatDouble(s.mean_cer_all)
            << ',' << opt(s.median_cer_kept) << ',' << opt(s.mean_cer_kept) << '\n';
  }
  WriteFile(dir / "rq3_abstain.csv", summary.str());

  std::ostringstream per_page;
  per_page << "system_id,page_id,length_ratio,decision,cer\n";
  for (const auto& r : result.abstain_pages) {
    per_page << Escape(r.system_id) << ',' << Escape(r.page_id) << ','
             << FormatDouble(r.length_ratio) << ','
             << (r.abstained ? "abstain" : "keep") << ',' << FormatDouble(r.cer)
             << '\n';
  }
  WriteFile(dir / "rq3_abstain_pages.csv", per_page.str());
}

std::string CorrectionRequests(const Corpus& corpus, const std::string& condition,
                               const std::vector<Exemplar>& exemplars) {
  json shots = json::array();
  for (const Exemplar& e : exemplars) {
    shots.push_back({{"input", e.input}, {"output", e.output}});
  }
  std::string out;
  for (const std::string& system : corpus.systems) {
    for (const auto& [page_id, text] : corpus.For(system, condition)) {
      const json line = {{"system_id", system},
                         {"page_id", page_id},
                         {"text", text},
                         {"exemplars", shots}};
      out += line.dump() + "\n";
    }
  }
  return out;
}

std::vector<Prediction> ReadCorrections(const std::filesystem::path& path) {
  std::vector<Prediction> out = ReadPredictionsJsonl(path);
  for (Prediction& p : out) {
    if (!p.condition.empty() && p.condition != kCorrectionCondition) {
      throw InputError(path.string() + ": correction for page \"" + p.page_id +
                       "\" carries condition \"" + p.condition + "\"");
    }
    p.condition = kCorrectionCondition;
  }
  return out;
}

}  // namespace ocrprobe::harness
