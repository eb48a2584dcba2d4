#include "ocrprobe/harness/rq2.h"

#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "ocrprobe/csv.h"
#include "ocrprobe/harness/io.h"
#include "ocrprobe/metrics.h"
#include "ocrprobe/stats.h"

namespace ocrprobe::harness {

using nlohmann::json;

namespace {

constexpr const char* kOriginal = "original";

PerturbSpec ParseCondition(const std::string& name) {
  auto spec = PerturbSpec::FromConditionName(name, 0);
  if (!spec) throw InputError("unknown perturbation condition \"" + name + "\"");
  return *spec;
}

std::string FormatP(const PerturbSpec& spec) {
  if (spec.variant == Variant::kSwap || spec.variant == Variant::kShuffle ||
      spec.variant == Variant::kOriginal) {
    return csv::FormatDouble(spec.p);
  }
  return "";
}

}  // namespace

ConditionTexts PerturbCorpus(const std::map<std::string, std::string>& docs,
                             std::uint64_t seed, std::size_t threads) {
  std::vector<const std::pair<const std::string, std::string>*> items;
  for (const auto& kv : docs) items.push_back(&kv);
  std::vector<std::map<std::string, std::string>> per_doc(items.size());
  ParallelFor(items.size(), threads, [&](std::size_t i) {
    per_doc[i] = PerturbationSuite(items[i]->second, seed);
  });
  ConditionTexts out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (auto& [condition, text] : per_doc[i]) {
      out[condition][items[i]->first] = std::move(text);
    }
  }
  return out;
}

void WritePerturbedCorpus(const ConditionTexts& texts, std::uint64_t seed,
                          const std::filesystem::path& dir) {
  json manifest;
  manifest["seed"] = seed;
  json conditions = json::array();
  for (const PerturbSpec& spec : SuiteSpecs(seed)) {
    if (texts.find(spec.ConditionName()) == texts.end()) continue;
    conditions.push_back({{"name", spec.ConditionName()},
                          {"axis", AxisName(spec.axis)},
                          {"variant", VariantName(spec.variant)},
                          {"p", spec.p},
                          {"seed", spec.seed}});
  }
  manifest["conditions"] = conditions;
  json files = json::object();
  for (const auto& [condition, docs] : texts) {
    for (const auto& [doc_id, text] : docs) {
      const std::string rel = condition + "/" + doc_id + ".txt";
      WriteFile(dir / condition / (doc_id + ".txt"), text);
      files[rel] = Sha256Hex(text);
    }
  }
  manifest["files"] = files;
  WriteFile(dir / "manifest.json", manifest.dump(2) + "\n");
}

ConditionTexts LoadPerturbedCorpus(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw InputError("perturbed corpus directory not found: " + dir.string());
  }
  const std::filesystem::path manifest = dir / "manifest.json";
  if (std::filesystem::exists(manifest)) {
    json m;
    try {
      m = json::parse(ReadFile(manifest));
      for (const auto& [rel, hash] : m.at("files").items()) {
        const std::filesystem::path file = dir / rel;
        if (!std::filesystem::exists(file)) {
          throw InputError(manifest.string() + ": listed file missing: " + rel);
        }
        if (Sha256Hex(ReadFile(file)) != hash.get<std::string>()) {
          throw InputError(manifest.string() + ": checksum mismatch for " + rel);
        }
      }
    } catch (const json::exception& e) {
      throw InputError(manifest.string() + ": " + e.what());
    }
  }
  ConditionTexts out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_directory()) continue;
    out[entry.path().filename().string()] = LoadGroundTruthDir(entry.path());
  }
  return out;
}

Rq2Result RunRq2(const ConditionTexts& gt, const std::vector<Prediction>& predictions,
                 const std::map<std::string, PageMeta>& metadata,
                 const RunConfig& config) {
  if (gt.find(kOriginal) == gt.end()) {
    throw InputError("perturbed ground truth has no \"original\" condition");
  }
  std::map<std::string, PerturbSpec> specs;
  for (const auto& [condition, _] : gt) specs[condition] = ParseCondition(condition);

  Rq2Result result;
  std::set<std::string> excluded;
  for (const auto& [condition, docs] : gt) {
    for (const auto& [page_id, _] : docs) {
      auto it = metadata.find(page_id);
      if (it != metadata.end() && it->second.layout == Layout::kTwoColumn) {
        excluded.insert(page_id);
      }
    }
  }
  result.excluded_pages.assign(excluded.begin(), excluded.end());

  // (system, condition) -> page -> prediction
  std::map<std::pair<std::string, std::string>, std::map<std::string, const std::string*>>
      preds;
  for (const Prediction& p : predictions) {
    if (specs.find(p.condition) == specs.end()) {
      if (p.condition.empty()) {
        throw InputError("prediction for page \"" + p.page_id + "\" system \"" +
                         p.system_id + "\" has no condition");
      }
      throw InputError("prediction condition \"" + p.condition +
                       "\" has no perturbed ground truth");
    }
    if (excluded.contains(p.page_id)) continue;
    const auto& docs = gt.at(p.condition);
    if (docs.find(p.page_id) == docs.end()) continue;
    if (!preds[{p.system_id, p.condition}].emplace(p.page_id, &p.text).second) {
      throw InputError("duplicate prediction for page \"" + p.page_id +
                       "\" system \"" + p.system_id + "\" condition \"" +
                       p.condition + "\"");
    }
  }

  struct Task {
    const std::string* system;
    const std::string* condition;
    const std::string* page_id;
    const std::string* pred;
  };
  std::vector<Task> tasks;
  for (const auto& [key, by_page] : preds) {
    for (const auto& [page_id, text] : by_page) {
      tasks.push_back({&key.first, &key.second, &page_id, text});
    }
  }
  const NormProfile profile = NormProfile::Rq2();
  result.pages.resize(tasks.size());
  ParallelFor(tasks.size(), config.threads ? config.threads : DefaultThreads(),
              [&](std::size_t i) {
                const Task& t = tasks[i];
                const std::string& ref = gt.at(*t.condition).at(*t.page_id);
                double cer;
                try {
                  cer = Cer(ref, *t.pred, profile);
                } catch (const std::invalid_argument& e) {
                  throw std::invalid_argument("page " + *t.page_id + ", condition " +
                                              *t.condition + ": " + e.what());
                }
                result.pages[i] = {*t.system, *t.condition, *t.page_id, cer};
              });

  // (system, condition) -> page -> cer
  std::map<std::pair<std::string, std::string>, std::map<std::string, double>> cer;
  for (const auto& row : result.pages) {
    cer[{row.system_id, row.condition}][row.page_id] = row.cer;
  }
  // Rows follow the suite's condition order within each system.
  std::vector<std::string> order;
  for (const PerturbSpec& spec : SuiteSpecs(config.seed)) {
    if (gt.contains(spec.ConditionName())) order.push_back(spec.ConditionName());
  }
  std::set<std::string> systems;
  for (const auto& [key, _] : cer) systems.insert(key.first);
  for (const std::string& system : systems) {
    const auto original = cer.find({system, kOriginal});
    for (const std::string& condition : order) {
      auto it = cer.find({system, condition});
      if (it == cer.end()) continue;
      Rq2TableRow row;
      row.system_id = system;
      row.condition = condition;
      row.spec = specs.at(condition);
      std::vector<double> values;
      for (const auto& [_, v] : it->second) values.push_back(v);
      const MetricSummary s = Summarize(values);
      row.n_pages = s.n_pages;
      row.median_cer = s.median;
      row.mean_cer = s.mean;
      if (condition != kOriginal && original != cer.end()) {
        std::map<std::string, double> base, treated;
        for (const auto& [page, v] : it->second) {
          auto o = original->second.find(page);
          if (o == original->second.end()) continue;
          base[page] = o->second;
          treated[page] = v;
        }
        if (!base.empty()) {
          const DeltaSummary d = DeltaTable(base, treated, Direction::kTreatedGreater);
          row.delta_median = d.delta_median;
          row.delta_mean = d.delta_mean;
          row.p_value = d.p_value;
          row.stars = d.stars;
        }
      }
      result.table.push_back(row);
    }
  }
  return result;
}

void WriteRq2(const Rq2Result& result, const std::filesystem::path& dir) {
  using csv::Escape;
  using csv::FormatDouble;
  auto opt = [](const std::optional<double>& v) {
    return v ? FormatDouble(*v) : std::string();
  };
  std::ostringstream pages;
  pages << "system_id,condition,page_id,cer\n";
  for (const auto& r : result.pages) {
    pages << Escape(r.system_id) << ',' << Escape(r.condition) << ','
          << Escape(r.page_id) << ',' << FormatDouble(r.cer) << '\n';
  }
  WriteFile(dir / "rq2_page_cer.csv", pages.str());

  std::ostringstream table;
  table << "system_id,condition,axis,variant,p,n_pages,median_cer,mean_cer,"
           "delta_median,delta_mean,p_value,stars\n";
  std::ostringstream series;
  series << "system_id,axis,variant,p,median_cer,mean_cer,n_pages\n";
  for (const auto& r : result.table) {
    const bool original = r.spec.variant == Variant::kOriginal;
    table << Escape(r.system_id) << ',' << Escape(r.condition) << ','
          << (original ? "" : AxisName(r.spec.axis)) << ','
          << VariantName(r.spec.variant) << ',' << FormatP(r.spec) << ','
          << r.n_pages << ',' << FormatDouble(r.median_cer) << ','
          << FormatDouble(r.mean_cer) << ',' << opt(r.delta_median) << ','
          << opt(r.delta_mean) << ',' << opt(r.p_value) << ',' << r.stars << '\n';
    auto point = [&](Axis axis, Variant variant, const std::string& p) {
      series << Escape(r.system_id) << ',' << AxisName(axis) << ','
             << VariantName(variant) << ',' << p << ','
             << FormatDouble(r.median_cer) << ',' << FormatDouble(r.mean_cer)
             << ',' << r.n_pages << '\n';
    };
    if (original) {
      // The clean condition anchors both proportional curves of each axis.
      for (Axis axis : {Axis::kWord, Axis::kChar}) {
        for (Variant v : {Variant::kSwap, Variant::kShuffle}) point(axis, v, "0");
      }
    } else {
      point(r.spec.axis, r.spec.variant, FormatP(r.spec));
    }
  }
  WriteFile(dir / "rq2_table.csv", table.str());
  WriteFile(dir / "rq2_series.csv", series.str());

  std::string excluded;
  for (const auto& id : result.excluded_pages) excluded += id + "\n";
  WriteFile(dir / "rq2_excluded.txt", excluded);
}

}  // namespace ocrprobe::harness
