#include "ocrprobe/harness/rq1.h"

#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "ocrprobe/align.h"
#include "ocrprobe/csv.h"
#include "ocrprobe/harness/io.h"

namespace ocrprobe::harness {

using nlohmann::json;

namespace {

struct Task {
  std::string system_id;
  const PageRecord* page = nullptr;
  const std::string* prediction = nullptr;
};

struct TaskResult {
  Rq1PageRow row;
  std::vector<ErrorRecord> errors;
};

TaskResult ScorePage(const Task& task, const Lexicon& lexicon,
                     const TaxonomyConfig& taxonomy) {
  const std::string& gt = task.page->gt_text;
  const std::string& pred = *task.prediction;
  TaskResult out;
  Rq1PageRow& row = out.row;
  row.system_id = task.system_id;
  row.page_id = task.page->page_id;
  try {
    const NormProfile raw = NormProfile::Raw();
    const NormProfile no_diac = NormProfile::NoDiacritics();
    row.cer_raw = Cer(gt, pred, raw);
    row.wer_raw = Wer(gt, pred, raw);
    row.cer_no_diac = Cer(gt, pred, no_diac);
    row.wer_no_diac = Wer(gt, pred, no_diac);
    const NormProfile tax = NormProfile::Taxonomy();
    const auto ref_words = TokenizeWords(NormalizePage(gt, tax));
    const auto hyp_words = TokenizeWords(NormalizePage(pred, tax));
    row.gt_words = ref_words.size();
    const auto ops = AlignWords(ref_words, hyp_words);
    out.errors = ClassifyPage(ops, lexicon, row.page_id, row.system_id, taxonomy);
    row.errors = out.errors.size();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("page " + row.page_id + ", system " +
                                row.system_id + ": " + e.what());
  }
  return out;
}

json SummaryJson(const MetricSummary& s) {
  return {{"mean", s.mean}, {"median", s.median}, {"n_pages", s.n_pages}};
}

}  // namespace

Rq1Result RunRq1(const Corpus& corpus, const Lexicon& lexicon,
                 const RunConfig& config) {
  std::vector<Task> tasks;
  for (const std::string& system : corpus.systems) {
    const auto& by_page = corpus.For(system);
    for (const PageRecord& page : corpus.pages) {
      auto it = by_page.find(page.page_id);
      if (it != by_page.end()) tasks.push_back({system, &page, &it->second});
    }
  }
  std::vector<TaskResult> results(tasks.size());
  ParallelFor(tasks.size(), config.threads ? config.threads : DefaultThreads(),
              [&](std::size_t i) {
                results[i] = ScorePage(tasks[i], lexicon, config.taxonomy);
              });

  Rq1Result out;
  std::size_t i = 0;
  while (i < results.size()) {
    const std::string system = results[i].row.system_id;
    std::vector<double> cr, wr, cn, wn;
    std::vector<ErrorRecord> system_errors;
    std::size_t words = 0;
    for (; i < results.size() && results[i].row.system_id == system; ++i) {
      const Rq1PageRow& row = results[i].row;
      cr.push_back(row.cer_raw);
      wr.push_back(row.wer_raw);
      cn.push_back(row.cer_no_diac);
      wn.push_back(row.wer_no_diac);
      words += row.gt_words;
      out.pages.push_back(row);
      system_errors.insert(system_errors.end(), results[i].errors.begin(),
                           results[i].errors.end());
    }
    Rq1SystemSummary s;
    s.system_id = system;
    s.cer_raw = Summarize(cr);
    s.wer_raw = Summarize(wr);
    s.cer_no_diac = Summarize(cn);
    s.wer_no_diac = Summarize(wn);
    s.shares = ComputeCategoryShares(system_errors, words);
    out.systems.push_back(s);
    out.errors.insert(out.errors.end(), system_errors.begin(), system_errors.end());
  }
  return out;
}

void WriteRq1(const Rq1Result& result, const std::filesystem::path& dir) {
  using csv::Escape;
  using csv::FormatDouble;
  std::ostringstream pages;
  pages << "system_id,page_id,cer_raw,wer_raw,cer_no_diac,wer_no_diac,gt_words,errors\n";
  for (const auto& r : result.pages) {
    pages << Escape(r.system_id) << ',' << Escape(r.page_id) << ','
          << FormatDouble(r.cer_raw) << ',' << FormatDouble(r.wer_raw) << ','
          << FormatDouble(r.cer_no_diac) << ',' << FormatDouble(r.wer_no_diac)
          << ',' << r.gt_words << ',' << r.errors << '\n';
  }
  WriteFile(dir / "rq1_page_metrics.csv", pages.str());

  std::ostringstream errors;
  WriteErrorCsv(errors, result.errors);
  WriteFile(dir / "rq1_errors.csv", errors.str());

  std::ostringstream shares;
  shares << "system_id,category,count,share,rate_per_1000\n";
  json summary = json::object();
  for (const auto& s : result.systems) {
    json cats = json::object();
    for (Category c : kAllCategories) {
      const CategoryShare& share = s.shares[c];
      shares << Escape(s.system_id) << ',' << CategoryName(c) << ','
             << share.count << ',' << FormatDouble(share.share) << ','
             << FormatDouble(share.rate_per_1000) << '\n';
      cats[std::string(CategoryName(c))] = {{"count", share.count},
                                            {"share", share.share},
                                            {"rate_per_1000", share.rate_per_1000}};
    }
    shares << Escape(s.system_id) << ",total," << s.shares.total << ','
           << (s.shares.total ? 1 : 0) << ',' << FormatDouble(s.shares.total_rate_per_1000) << '\n';
    summary[s.system_id] = {
        {"cer_raw", SummaryJson(s.cer_raw)},
        {"wer_raw", SummaryJson(s.wer_raw)},
        {"cer_no_diac", SummaryJson(s.cer_no_diac)},
        {"wer_no_diac", SummaryJson(s.wer_no_diac)},
        {"errors", {{"total", s.shares.total},
                    {"rate_per_1000", s.shares.total_rate_per_1000},
                    {"categories", cats}}},
    };
  }
  WriteFile(dir / "rq1_shares.csv", shares.str());
  WriteFile(dir / "rq1_summary.json", summary.dump(2) + "\n");
}

}  // namespace ocrprobe::harness
