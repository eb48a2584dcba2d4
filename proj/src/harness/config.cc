#include "ocrprobe/harness/config.h"

#include <set>

#include "ocrprobe/harness/io.h"
#include "ocrprobe/unicode.h"

namespace ocrprobe::harness {

using nlohmann::json;

namespace {

void CheckKeys(const json& j, std::string_view where,
               const std::set<std::string>& allowed) {
  if (!j.is_object()) {
    throw InputError(std::string(where) + ": expected an object");
  }
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) {
      throw InputError(std::string(where) + ": unknown key \"" + key + "\"");
    }
  }
}

template <typename T>
T Get(const json& j, std::string_view where, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string(where) + "." + key + ": " + e.what());
  }
}

std::u32string GetText(const json& j, std::string_view where, const char* key) {
  const auto s = Get<std::string>(j, where, key);
  try {
    return unicode::Decode(s);
  } catch (const EncodingError&) {
    throw InputError(std::string(where) + "." + key + ": invalid UTF-8");
  }
}

ContrastiveParams ParseContrastive(const json& j, std::string_view where,
                                   ContrastiveParams p) {
  CheckKeys(j, where,
            {"alpha", "beta", "gamma", "repetition_penalty", "no_repeat_ngram"});
  if (j.contains("alpha")) p.alpha = Get<double>(j, where, "alpha");
  if (j.contains("beta")) p.beta = Get<double>(j, where, "beta");
  if (j.contains("gamma")) p.gamma = Get<double>(j, where, "gamma");
  if (j.contains("repetition_penalty")) {
    if (j["repetition_penalty"].is_null()) {
      p.repetition_penalty.reset();
    } else {
      p.repetition_penalty = Get<double>(j, where, "repetition_penalty");
    }
  }
  if (j.contains("no_repeat_ngram")) {
    if (j["no_repeat_ngram"].is_null()) {
      p.no_repeat_ngram.reset();
    } else {
      p.no_repeat_ngram = Get<std::size_t>(j, where, "no_repeat_ngram");
    }
  }
  if (p.alpha < 0) throw InputError(std::string(where) + ".alpha must be >= 0");
  if (!(p.beta > 0 && p.beta <= 1)) {
    throw InputError(std::string(where) + ".beta must be in (0, 1]");
  }
  return p;
}

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

NormProfile ParseProfile(const json& j) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    auto preset = NormProfile::FromPreset(name);
    if (!preset) throw InputError("unknown normalization preset \"" + name + "\"");
    return *preset;
  }
  const std::string where = "profile";
  CheckKeys(j, where,
            {"base", "canonical_form", "strip_markup", "rejoin_hyphenation",
             "unify_elision", "isolate_brackets", "split_digit_letter",
             "strip_diacritics", "strip_spaces", "fold_case",
             "final_sigma_to_sigma"});
  NormProfile p = j.contains("base") ? ParseProfile(j["base"]) : NormProfile::Raw();
  if (j.contains("canonical_form")) {
    const auto form = Get<std::string>(j, where, "canonical_form");
    if (form == "NFC") {
      p.canonical_form = CanonicalForm::kNFC;
    } else if (form == "NFKC") {
      p.canonical_form = CanonicalForm::kNFKC;
    } else {
      throw InputError("profile.canonical_form must be NFC or NFKC");
    }
  }
  const std::pair<const char*, bool NormProfile::*> flags[] = {
      {"strip_markup", &NormProfile::strip_markup},
      {"rejoin_hyphenation", &NormProfile::rejoin_hyphenation},
      {"unify_elision", &NormProfile::unify_elision},
      {"isolate_brackets", &NormProfile::isolate_brackets},
      {"split_digit_letter", &NormProfile::split_digit_letter},
      {"strip_diacritics", &NormProfile::strip_diacritics},
      {"strip_spaces", &NormProfile::strip_spaces},
      {"fold_case", &NormProfile::fold_case},
      {"final_sigma_to_sigma", &NormProfile::final_sigma_to_sigma},
  };
  for (const auto& [key, member] : flags) {
    if (j.contains(key)) p.*member = Get<bool>(j, where, key);
  }
  return p;
}

RunConfig ParseConfig(const json& j, const std::filesystem::path& base_dir) {
  CheckKeys(j, "config",
            {"profile", "lexicon", "seed", "output_dir", "threads",
             "interventions", "taxonomy", "rq3", "correction"});
  RunConfig c;
  if (j.contains("profile")) {
    c.profile = ParseProfile(j["profile"]);
    c.profile_name = j["profile"].is_string() ? j["profile"].get<std::string>()
                                              : "custom";
  }
  if (j.contains("lexicon")) {
    c.lexicon = Resolve(base_dir, Get<std::string>(j, "config", "lexicon"));
    if (!std::filesystem::is_regular_file(*c.lexicon)) {
      throw InputError("config.lexicon: no such file " + c.lexicon->string());
    }
  }
  if (j.contains("seed")) c.seed = Get<std::uint64_t>(j, "config", "seed");
  if (j.contains("output_dir")) {
    c.output_dir = Resolve(base_dir, Get<std::string>(j, "config", "output_dir"));
  }
  if (j.contains("threads")) c.threads = Get<std::size_t>(j, "config", "threads");

  if (j.contains("interventions")) {
    const json& iv = j["interventions"];
    CheckKeys(iv, "interventions",
              {"vcd", "m3id", "abstain_threshold", "mask_punctuation"});
    if (iv.contains("vcd")) {
      c.interventions.vcd = ParseContrastive(iv["vcd"], "interventions.vcd",
                                             c.interventions.vcd);
    }
    if (iv.contains("m3id")) {
      c.interventions.m3id = ParseContrastive(iv["m3id"], "interventions.m3id",
                                              c.interventions.m3id);
    }
    if (iv.contains("abstain_threshold")) {
      c.interventions.abstain_threshold =
          Get<double>(iv, "interventions", "abstain_threshold");
      if (!(c.interventions.abstain_threshold > 0)) {
        throw InputError("interventions.abstain_threshold must be > 0");
      }
    }
    if (iv.contains("mask_punctuation")) {
      c.interventions.mask_punctuation =
          GetText(iv, "interventions", "mask_punctuation");
    }
  }

  if (j.contains("taxonomy")) {
    const json& t = j["taxonomy"];
    CheckKeys(t, "taxonomy", {"punctuation", "collapse_run", "max_confusion_edits"});
    if (t.contains("punctuation")) {
      c.taxonomy.punctuation = GetText(t, "taxonomy", "punctuation");
    }
    if (t.contains("collapse_run")) {
      c.taxonomy.collapse_run = Get<std::size_t>(t, "taxonomy", "collapse_run");
    }
    if (t.contains("max_confusion_edits")) {
      c.taxonomy.max_confusion_edits =
          Get<std::size_t>(t, "taxonomy", "max_confusion_edits");
    }
  }

  if (j.contains("rq3")) {
    const json& r = j["rq3"];
    CheckKeys(r, "rq3", {"pairs", "abstain_baseline"});
    if (r.contains("pairs")) {
      if (!r["pairs"].is_array()) throw InputError("rq3.pairs: expected an array");
      for (const json& pair : r["pairs"]) {
        CheckKeys(pair, "rq3.pairs[]", {"intervention", "baseline"});
        c.rq3_pairs.push_back(
            {Get<std::string>(pair, "rq3.pairs[]", "intervention"),
             Get<std::string>(pair, "rq3.pairs[]", "baseline")});
      }
    }
    if (r.contains("abstain_baseline")) {
      c.abstain_baseline = Get<std::string>(r, "rq3", "abstain_baseline");
    }
  }

  if (j.contains("correction")) {
    const json& corr = j["correction"];
    CheckKeys(corr, "correction", {"exemplars"});
    if (corr.contains("exemplars")) {
      if (!corr["exemplars"].is_array()) {
        throw InputError("correction.exemplars: expected an array");
      }
      for (const json& e : corr["exemplars"]) {
        CheckKeys(e, "correction.exemplars[]", {"input", "output"});
        c.correction_exemplars.push_back(
            {Get<std::string>(e, "correction.exemplars[]", "input"),
             Get<std::string>(e, "correction.exemplars[]", "output")});
      }
    }
  }
  return c;
}

RunConfig LoadConfig(const std::filesystem::path& path) {
  const std::string text = ReadUtf8File(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return ParseConfig(j, path.parent_path());
}

}  // namespace ocrprobe::harness
