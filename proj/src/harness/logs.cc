#include "ocrprobe/harness/logs.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ocrprobe/csv.h"
#include "ocrprobe/harness/io.h"
#include "ocrprobe/unicode.h"

namespace ocrprobe::harness {

using nlohmann::json;

namespace {

std::string Where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

template <typename Fn>
void ForEachLine(const std::filesystem::path& path, Fn&& fn) {
  const std::string data = ReadFile(path);
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < data.size()) {
    std::size_t end = data.find('\n', start);
    if (end == std::string::npos) end = data.size();
    const std::string_view line(data.data() + start, end - start);
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      const std::size_t bad = unicode::FindInvalidUtf8(line);
      if (bad != std::string::npos) {
        throw InputError(Where(path, line_no) + ": invalid UTF-8 at byte offset " +
                         std::to_string(start + bad));
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
      try {
        fn(j);
      } catch (const json::exception& e) {
        throw InputError(Where(path, line_no) + ": " + e.what());
      } catch (const InputError& e) {
        throw InputError(Where(path, line_no) + ": " + e.what());
      }
    }
    start = end + 1;
  }
}

double Number(const json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing field \"") + key + "\"");
  const json& v = j[key];
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "nan" || s == "NaN") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf" || s == "Infinity") return std::numeric_limits<double>::infinity();
    if (s == "-inf" || s == "-Infinity") return -std::numeric_limits<double>::infinity();
  }
  throw InputError(std::string("field \"") + key + "\" is not a number");
}

std::vector<float> Floats(const json& j, const char* key) {
  std::vector<float> out;
  if (!j.contains(key) || !j[key].is_array()) {
    throw InputError(std::string("missing array field \"") + key + "\"");
  }
  out.reserve(j[key].size());
  for (const json& v : j[key]) {
    if (v.is_null()) {
      out.push_back(-std::numeric_limits<float>::infinity());
    } else {
      out.push_back(v.get<float>());
    }
  }
  return out;
}

std::string Opt(const std::optional<double>& v) {
  return v ? csv::FormatDouble(*v) : std::string();
}

}  // namespace

std::map<std::string, std::vector<LoggedToken>> ReadTokenLog(
    const std::filesystem::path& path) {
  std::map<std::string, std::vector<LoggedToken>> out;
  std::set<std::pair<std::string, std::size_t>> seen;
  ForEachLine(path, [&](const json& j) {
    LoggedToken t;
    const std::string page_id = j.at("page_id").get<std::string>();
    t.token_index = j.at("token_index").get<std::size_t>();
    t.token_text = j.at("token_text").get<std::string>();
    t.span.begin = j.at("char_start").get<std::size_t>();
    t.span.end = j.at("char_end").get<std::size_t>();
    t.logp_cond = Number(j, "logp_cond");
    t.logp_free = Number(j, "logp_free");
    t.top1_prob = Number(j, "top1_prob");
    t.entropy = Number(j, "entropy");
    if (!seen.insert({page_id, t.token_index}).second) {
      throw InputError("duplicate token_index " + std::to_string(t.token_index) +
                       " on page \"" + page_id + "\"");
    }
    out[page_id].push_back(std::move(t));
  });
  for (auto& [_, tokens] : out) {
    std::sort(tokens.begin(), tokens.end(),
              [](const LoggedToken& a, const LoggedToken& b) {
                return a.token_index < b.token_index;
              });
  }
  return out;
}

GainReport RunGain(const std::map<std::string, std::vector<LoggedToken>>& log,
                   const std::map<std::string, std::string>& gt) {
  GainReport report;
  for (const auto& [page_id, tokens] : log) {
    auto it = gt.find(page_id);
    if (it == gt.end()) {
      report.skipped_pages.push_back(page_id);
      continue;
    }
    try {
      auto records = BuildGainRecords(page_id, it->second, tokens);
      report.records.insert(report.records.end(),
                            std::make_move_iterator(records.begin()),
                            std::make_move_iterator(records.end()));
    } catch (const std::invalid_argument& e) {
      throw InputError("token log page \"" + page_id + "\": " + e.what());
    }
  }
  report.summary = SummarizeGains(report.records);
  return report;
}

void WriteGain(const GainReport& report, const std::filesystem::path& dir) {
  using csv::Escape;
  using csv::FormatDouble;
  std::ostringstream tokens;
  tokens << "page_id,token_index,token_text,gt_span,label,subtype,within_greek,"
            "valid,logp_cond,logp_free,gain,top1_prob,entropy\n";
  for (const auto& r : report.records) {
    tokens << Escape(r.page_id) << ',' << r.token_index << ','
           << Escape(r.token_text) << ',' << Escape(r.gt_span) << ','
           << (r.label ? CharLabelName(*r.label) : "") << ','
           << (r.subtype ? SubtypeName(*r.subtype) : "") << ','
           << (r.within_greek ? 1 : 0) << ',' << (r.valid ? 1 : 0) << ','
           << FormatDouble(r.logp_cond) << ',' << FormatDouble(r.logp_free) << ','
           << FormatDouble(r.gain) << ',' << FormatDouble(r.top1_prob) << ','
           << FormatDouble(r.entropy) << '\n';
  }
  WriteFile(dir / "gain_tokens.csv", tokens.str());

  std::ostringstream summary;
  summary << "class,count,median_gain,median_top1,median_entropy\n";
  for (std::size_t k = 0; k < kNumGainClasses; ++k) {
    const GainClassStats& s = report.summary.by_class[k];
    summary << GainClassName(static_cast<GainClass>(k)) << ',' << s.count << ','
            << Opt(s.median_gain) << ',' << Opt(s.median_top1) << ','
            << Opt(s.median_entropy) << '\n';
  }
  WriteFile(dir / "gain_summary.csv", summary.str());
}

std::vector<VocabEntry> ReadVocab(const std::filesystem::path& path) {
  std::vector<VocabEntry> out;
  std::set<std::int64_t> ids;
  ForEachLine(path, [&](const json& j) {
    VocabEntry e;
    e.token_id = j.at("token_id").get<std::int64_t>();
    e.decoded = j.at("decoded").get<std::string>();
    if (j.contains("is_special")) e.is_special = j["is_special"].get<bool>();
    if (e.token_id < 0) throw InputError("negative token_id");
    if (!ids.insert(e.token_id).second) {
      throw InputError("duplicate token_id " + std::to_string(e.token_id));
    }
    out.push_back(std::move(e));
  });
  return out;
}

VocabMask BuildVocabMask(const std::vector<VocabEntry>& vocab,
                         const std::u32string& punctuation) {
  VocabMask mask;
  std::int64_t max_id = -1;
  for (const auto& e : vocab) max_id = std::max(max_id, e.token_id);
  mask.allowed.assign(static_cast<std::size_t>(max_id + 1), false);
  const std::vector<bool> decisions = BuildScriptMask(vocab, punctuation);
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    mask.allowed[static_cast<std::size_t>(vocab[i].token_id)] = decisions[i];
    if (vocab[i].is_special) ++mask.n_special;
  }
  for (bool b : mask.allowed) (b ? mask.n_allowed : mask.n_masked)++;
  return mask;
}

std::string PackBits(const std::vector<bool>& bits) {
  std::string out((bits.size() + 7) / 8, '\0');
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out[i / 8] = static_cast<char>(out[i / 8] | (1u << (i % 8)));
  }
  return out;
}

std::vector<bool> UnpackBits(std::string_view bytes, std::size_t n) {
  if (bytes.size() * 8 < n) {
    throw InputError("mask holds " + std::to_string(bytes.size() * 8) +
                     " bits, need " + std::to_string(n));
  }
  std::vector<bool> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = (static_cast<unsigned char>(bytes[i / 8]) >> (i % 8)) & 1u;
  }
  return out;
}

std::vector<ReplayStep> ReadReplay(const std::filesystem::path& path) {
  std::vector<ReplayStep> out;
  ForEachLine(path, [&](const json& j) {
    ReplayStep s;
    s.page_id = j.at("page_id").get<std::string>();
    s.step = j.at("step").get<std::size_t>();
    s.logits_a = Floats(j, "logits_a");
    if (j.contains("logits_b")) s.logits_b = Floats(j, "logits_b");
    if (j.contains("history")) {
      s.history = j["history"].get<std::vector<std::int64_t>>();
    }
    out.push_back(std::move(s));
  });
  return out;
}

ReplayChoice Replay(const ReplayStep& step, ReplayMethod method,
                    const ContrastiveParams& params, const std::vector<bool>& mask) {
  std::vector<float> scores;
  switch (method) {
    case ReplayMethod::kVcd:
    case ReplayMethod::kM3id:
      if (step.logits_b.size() != step.logits_a.size()) {
        throw InputError("page \"" + step.page_id + "\" step " +
                         std::to_string(step.step) +
                         ": logits_b missing or of different length");
      }
      scores = method == ReplayMethod::kVcd
                   ? VcdCombine(step.logits_a, step.logits_b, params.alpha, params.beta)
                   : M3idCombine(step.logits_a, step.logits_b, step.step, params,
                                 step.history);
      break;
    case ReplayMethod::kNone:
      scores = step.logits_a;
      break;
  }
  if (!mask.empty()) {
    if (mask.size() > scores.size()) {
      throw InputError("mask covers " + std::to_string(mask.size()) +
                       " tokens but logits have " + std::to_string(scores.size()));
    }
    // Padded logit rows beyond the vocabulary stay masked.
    std::vector<bool> padded = mask;
    padded.resize(scores.size(), false);
    scores = ApplyMask(scores, padded);
  }
  ReplayChoice c{step.page_id, step.step, Argmax(scores), 0.0};
  if (c.token_id >= 0) c.score = scores[static_cast<std::size_t>(c.token_id)];
  return c;
}

}  // namespace ocrprobe::harness
