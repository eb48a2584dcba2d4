#include "ocrprobe/harness/corpus.h"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "ocrprobe/harness/io.h"
#include "ocrprobe/unicode.h"

namespace ocrprobe::harness {

using nlohmann::json;

namespace {

bool IsBlank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

std::string Where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

// Calls fn(line_number, parsed_object) for every non-blank line.
template <typename Fn>
void ForEachJsonLine(const std::filesystem::path& path, Fn&& fn) {
  const std::string data = ReadFile(path);
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < data.size()) {
    std::size_t end = data.find('\n', start);
    if (end == std::string::npos) end = data.size();
    const std::string_view line(data.data() + start, end - start);
    ++line_no;
    if (!IsBlank(line)) {
      const std::size_t bad = unicode::FindInvalidUtf8(line);
      if (bad != std::string::npos) {
        throw InputError(Where(path, line_no) + ": invalid UTF-8 at byte offset " +
                         std::to_string(start + bad) + " (column " +
                         std::to_string(bad + 1) + ")");
      }
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error& e) {
        throw InputError(Where(path, line_no) + ": malformed JSON: " + e.what());
      }
      if (!j.is_object()) {
        throw InputError(Where(path, line_no) + ": expected a JSON object");
      }
      fn(line_no, j);
    }
    start = end + 1;
  }
}

std::string RequireString(const json& j, const char* key,
                          const std::filesystem::path& path, std::size_t line) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw InputError(Where(path, line) + ": missing string field \"" + key + "\"");
  }
  return j[key].get<std::string>();
}

}  // namespace

std::string_view LayoutName(Layout layout) {
  switch (layout) {
    case Layout::kSingleColumn:
      return "single_column";
    case Layout::kTwoColumn:
      return "two_column";
    case Layout::kUnknown:
      break;
  }
  return "unknown";
}

std::optional<Layout> LayoutFromName(std::string_view name) {
  for (Layout l : {Layout::kSingleColumn, Layout::kTwoColumn, Layout::kUnknown}) {
    if (LayoutName(l) == name) return l;
  }
  return std::nullopt;
}

std::map<std::string, std::string> LoadGroundTruthDir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw InputError("ground-truth directory not found: " + dir.string());
  }
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::string text = ReadUtf8File(entry.path());
    if (IsBlank(text)) {
      throw InputError(entry.path().string() + ": empty ground truth");
    }
    out.emplace(entry.path().stem().string(), std::move(text));
  }
  return out;
}

std::vector<Prediction> ReadPredictionsJsonl(const std::filesystem::path& path) {
  std::vector<Prediction> out;
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> seen;
  ForEachJsonLine(path, [&](std::size_t line, const json& j) {
    Prediction p;
    p.page_id = RequireString(j, "page_id", path, line);
    p.system_id = RequireString(j, "system_id", path, line);
    p.text = RequireString(j, "text", path, line);
    if (j.contains("condition") && !j["condition"].is_null()) {
      p.condition = RequireString(j, "condition", path, line);
    }
    const auto key = std::make_tuple(p.page_id, p.system_id, p.condition);
    if (auto it = seen.find(key); it != seen.end()) {
      throw InputError(Where(path, line) + ": duplicate prediction for page \"" +
                       p.page_id + "\" system \"" + p.system_id +
                       "\" (first on line " + std::to_string(it->second) + ")");
    }
    seen.emplace(key, line);
    out.push_back(std::move(p));
  });
  return out;
}

std::map<std::string, PageMeta> ReadMetadataJsonl(const std::filesystem::path& path) {
  std::map<std::string, PageMeta> out;
  ForEachJsonLine(path, [&](std::size_t line, const json& j) {
    const std::string page_id = RequireString(j, "page_id", path, line);
    PageMeta meta;
    if (j.contains("edition_id")) {
      meta.edition_id = RequireString(j, "edition_id", path, line);
    }
    if (j.contains("layout")) {
      const std::string name = RequireString(j, "layout", path, line);
      auto layout = LayoutFromName(name);
      if (!layout) {
        throw InputError(Where(path, line) + ": unknown layout \"" + name + "\"");
      }
      meta.layout = *layout;
    }
    if (!out.emplace(page_id, meta).second) {
      throw InputError(Where(path, line) + ": duplicate page_id \"" + page_id + "\"");
    }
  });
  return out;
}

const PageRecord* Corpus::Find(std::string_view page_id) const {
  auto it = std::lower_bound(
      pages.begin(), pages.end(), page_id,
      [](const PageRecord& r, std::string_view id) { return r.page_id < id; });
  return it != pages.end() && it->page_id == page_id ? &*it : nullptr;
}

const std::map<std::string, std::string>& Corpus::For(const std::string& system_id,
                                                      const std::string& condition) const {
  static const std::map<std::string, std::string> kEmpty;
  auto it = predictions.find({system_id, condition});
  return it == predictions.end() ? kEmpty : it->second;
}

Corpus BuildCorpus(const std::map<std::string, std::string>& gt,
                   const std::vector<Prediction>& predictions,
                   const std::map<std::string, PageMeta>& metadata,
                   const std::vector<std::string>& systems) {
  Corpus corpus;
  for (const auto& [page_id, text] : gt) {
    if (IsBlank(text)) throw InputError("page " + page_id + ": empty ground truth");
    PageRecord r;
    r.page_id = page_id;
    r.gt_text = text;
    if (auto it = metadata.find(page_id); it != metadata.end()) {
      r.edition_id = it->second.edition_id;
      r.layout = it->second.layout;
    }
    corpus.pages.push_back(std::move(r));
  }
  std::set<std::string> unknown_pages;
  for (const Prediction& p : predictions) {
    if (gt.find(p.page_id) == gt.end()) {
      unknown_pages.insert(p.page_id);
      continue;
    }
    auto& slot = corpus.predictions[{p.system_id, p.condition}];
    if (!slot.emplace(p.page_id, p.text).second) {
      throw InputError("duplicate prediction for page \"" + p.page_id +
                       "\" system \"" + p.system_id + "\"");
    }
    corpus.systems.insert(p.system_id);
  }
  for (PageRecord& r : corpus.pages) {
    for (const std::string& system : corpus.systems) {
      const auto& by_page = corpus.For(system);
      if (auto it = by_page.find(r.page_id); it != by_page.end()) {
        r.predictions.emplace(system, it->second);
      }
    }
  }
  for (const auto& page_id : unknown_pages) {
    corpus.warnings.push_back("predictions for page \"" + page_id +
                              "\" have no ground truth; ignored");
  }
  std::vector<std::string> expected = systems;
  if (expected.empty()) expected.assign(corpus.systems.begin(), corpus.systems.end());
  for (const std::string& system : expected) {
    const auto& by_page = corpus.For(system);
    // Systems seen only under tagged conditions have no plain run to check.
    if (by_page.empty() && systems.empty()) continue;
    std::vector<std::string> missing;
    for (const PageRecord& r : corpus.pages) {
      if (by_page.find(r.page_id) == by_page.end()) missing.push_back(r.page_id);
    }
    if (missing.empty()) continue;
    std::ostringstream msg;
    msg << "system \"" << system << "\" is missing " << missing.size()
        << " page(s), excluded from its paired tests:";
    for (const auto& id : missing) msg << ' ' << id;
    corpus.warnings.push_back(msg.str());
  }
  return corpus;
}

Corpus IngestCorpus(const std::filesystem::path& gt_dir,
                    const std::vector<std::filesystem::path>& prediction_files,
                    const IngestOptions& options) {
  const auto gt = LoadGroundTruthDir(gt_dir);
  std::vector<Prediction> predictions;
  std::map<std::tuple<std::string, std::string, std::string>, std::string> origin;
  for (const auto& path : prediction_files) {
    for (Prediction& p : ReadPredictionsJsonl(path)) {
      const auto key = std::make_tuple(p.page_id, p.system_id, p.condition);
      if (auto it = origin.find(key); it != origin.end()) {
        throw InputError(path.string() + ": duplicate prediction for page \"" +
                         p.page_id + "\" system \"" + p.system_id +
                         "\" (also in " + it->second + ")");
      }
      origin.emplace(key, path.string());
      predictions.push_back(std::move(p));
    }
  }
  std::map<std::string, PageMeta> metadata;
  if (options.metadata) metadata = ReadMetadataJsonl(*options.metadata);
  return BuildCorpus(gt, predictions, metadata, options.systems);
}

}  // namespace ocrprobe::harness
