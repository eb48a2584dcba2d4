// ocrprobe command-line front end.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ocrprobe/align.h"
#include "ocrprobe/csv.h"
#include "ocrprobe/harness/config.h"
#include "ocrprobe/harness/corpus.h"
#include "ocrprobe/harness/io.h"
#include "ocrprobe/harness/logs.h"
#include "ocrprobe/harness/rq1.h"
#include "ocrprobe/harness/rq2.h"
#include "ocrprobe/harness/rq3.h"
#include "ocrprobe/interventions.h"
#include "ocrprobe/metrics.h"
#include "ocrprobe/perturb.h"
#include "ocrprobe/rng.h"
#include "ocrprobe/stats.h"
#include "ocrprobe/taxonomy.h"
#include "ocrprobe/textnorm.h"
#include "ocrprobe/unicode.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ocrprobe;
using namespace ocrprobe::harness;

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string profile;
  std::string out;
  std::size_t threads = 0;
};

RunConfig Resolve(const Globals& g) {
  RunConfig c = g.config_path.empty() ? RunConfig{} : LoadConfig(g.config_path);
  if (g.seed) c.seed = *g.seed;
  if (!g.profile.empty()) {
    c.profile = ParseProfile(json(g.profile));
    c.profile_name = g.profile;
  }
  if (!g.out.empty()) c.output_dir = g.out;
  if (g.threads) c.threads = g.threads;
  return c;
}

Lexicon LoadLexicon(const RunConfig& c, const std::string& override_path) {
  if (!override_path.empty()) return Lexicon::LoadFile(override_path);
  if (c.lexicon) return Lexicon::LoadFile(c.lexicon->string());
  return Lexicon{};
}

std::string ReadInput(const std::string& path) {
  if (path.empty() || path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    std::string s = buf.str();
    const std::size_t bad = unicode::FindInvalidUtf8(s);
    if (bad != std::string::npos) {
      throw InputError("stdin: invalid UTF-8 at byte offset " + std::to_string(bad));
    }
    return s;
  }
  return ReadUtf8File(path);
}

std::vector<Prediction> ReadAllPredictions(const std::vector<std::string>& files) {
  std::vector<Prediction> out;
  for (const auto& f : files) {
    auto part = ReadPredictionsJsonl(f);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

Corpus LoadCorpus(const std::string& gt_dir, const std::vector<std::string>& predictions,
                  const std::string& metadata, const std::vector<std::string>& systems,
                  const std::vector<Prediction>& extra = {}) {
  std::vector<Prediction> all = ReadAllPredictions(predictions);
  all.insert(all.end(), extra.begin(), extra.end());
  std::map<std::string, PageMeta> meta;
  if (!metadata.empty()) meta = ReadMetadataJsonl(metadata);
  Corpus corpus = BuildCorpus(LoadGroundTruthDir(gt_dir), all, meta, systems);
  for (const auto& w : corpus.warnings) std::cerr << "warning: " << w << '\n';
  return corpus;
}

std::map<std::string, double> ReadRateCsv(const std::string& path) {
  std::istringstream in(ReadUtf8File(path));
  std::map<std::string, double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) {
      throw InputError(path + ":" + std::to_string(line_no) + ": expected page_id,rate");
    }
    const std::string id = line.substr(0, comma);
    const std::string value = line.substr(comma + 1);
    if (line_no == 1 && id == "page_id") continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      if (!out.emplace(id, v).second) {
        throw InputError(path + ":" + std::to_string(line_no) + ": duplicate page " + id);
      }
    } catch (const std::logic_error&) {
      throw InputError(path + ":" + std::to_string(line_no) + ": bad rate \"" + value + "\"");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ocrprobe: OCR evaluation and language-prior probes"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "JSON run configuration")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "perturbation seed (overrides config)");
  app.add_option("--profile", g.profile,
                 "normalization preset: raw, no-diac, rq2, taxonomy, rq3");
  app.add_option("--out", g.out, "output directory (overrides config)");
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)");

  // normalize
  auto* normalize = app.add_subcommand("normalize", "normalize a text file to stdout");
  std::string norm_input;
  normalize->add_option("input", norm_input, "file to normalize ('-' for stdin)");

  // score
  auto* score = app.add_subcommand("score", "CER and WER of one hypothesis");
  std::string ref_path, hyp_path;
  score->add_option("--ref", ref_path, "reference text")->required()->check(CLI::ExistingFile);
  score->add_option("--hyp", hyp_path, "hypothesis text")->required()->check(CLI::ExistingFile);

  // classify
  auto* classify = app.add_subcommand("classify", "word-level error taxonomy as CSV");
  std::string lexicon_path;
  std::string page_label = "page", system_label = "system";
  classify->add_option("--ref", ref_path, "reference text")->required()->check(CLI::ExistingFile);
  classify->add_option("--hyp", hyp_path, "hypothesis text")->required()->check(CLI::ExistingFile);
  classify->add_option("--lexicon", lexicon_path, "word list (overrides config)")
      ->check(CLI::ExistingFile);
  classify->add_option("--page-id", page_label, "page id for the CSV rows");
  classify->add_option("--system-id", system_label, "system id for the CSV rows");

  // perturb
  auto* perturb = app.add_subcommand("perturb", "write the perturbation suite of a corpus");
  std::string gt_dir, perturb_input, condition_name;
  perturb->add_option("--gt-dir", gt_dir, "directory of <doc_id>.txt files")
      ->check(CLI::ExistingDirectory);
  perturb->add_option("--input", perturb_input, "single file to perturb to stdout");
  perturb->add_option("--condition", condition_name,
                      "condition for --input, e.g. char_random or word_swap_p10");

  // gain
  auto* gain = app.add_subcommand("gain", "image-gain analysis of a token log");
  std::string token_log;
  gain->add_option("--token-log", token_log, "token log JSONL")->required()->check(CLI::ExistingFile);
  gain->add_option("--gt-dir", gt_dir, "ground-truth directory")->required()->check(CLI::ExistingDirectory);

  // mask
  auto* mask = app.add_subcommand("mask", "build the Greek script mask for a vocabulary");
  std::string vocab_path;
  mask->add_option("--vocab", vocab_path, "vocabulary JSONL")->required()->check(CLI::ExistingFile);

  // abstain
  auto* abstain = app.add_subcommand("abstain", "length abstention report");
  std::vector<std::string> prediction_files;
  std::string condition;
  std::optional<double> threshold, target_rate;
  abstain->add_option("--gt-dir", gt_dir, "ground-truth directory")->required()->check(CLI::ExistingDirectory);
  abstain->add_option("--predictions", prediction_files, "predictions JSONL")->required()->check(CLI::ExistingFile);
  abstain->add_option("--condition", condition, "prediction condition (default: plain run)");
  auto* threshold_opt = abstain->add_option("--threshold", threshold, "length ratio threshold");
  abstain->add_option("--target-rate", target_rate,
                      "calibrate the threshold to this abstention rate")
      ->excludes(threshold_opt);

  // contrast-replay
  auto* replay = app.add_subcommand("contrast-replay", "replay exported logits through a decoder transform");
  std::string replay_path, method = "vcd", mask_path;
  replay->add_option("--replay", replay_path, "replay JSONL")->required()->check(CLI::ExistingFile);
  replay->add_option("--method", method, "vcd, m3id or none")
      ->check(CLI::IsMember({"vcd", "m3id", "none"}));
  replay->add_option("--vocab", vocab_path, "apply the script mask built from this vocabulary")
      ->check(CLI::ExistingFile);

  // stats
  auto* stats = app.add_subcommand("stats", "paired Wilcoxon delta of two page_id,rate CSVs");
  std::string baseline_csv, treated_csv, direction = "less";
  stats->add_option("--baseline", baseline_csv, "baseline rates")->required()->check(CLI::ExistingFile);
  stats->add_option("--treated", treated_csv, "treated rates")->required()->check(CLI::ExistingFile);
  stats->add_option("--direction", direction, "alternative: less or greater")
      ->check(CLI::IsMember({"less", "greater"}));

  // report
  auto* report = app.add_subcommand("report", "run an analysis end to end");
  report->require_subcommand(1);
  std::string metadata_path, perturbed_dir, corrections_path;
  std::vector<std::string> systems;
  auto* rq1 = report->add_subcommand("rq1", "CER/WER and error taxonomy");
  rq1->add_option("--gt-dir", gt_dir)->required()->check(CLI::ExistingDirectory);
  rq1->add_option("--predictions", prediction_files)->required()->check(CLI::ExistingFile);
  rq1->add_option("--metadata", metadata_path)->check(CLI::ExistingFile);
  rq1->add_option("--systems", systems, "systems every page should have");
  rq1->add_option("--lexicon", lexicon_path)->check(CLI::ExistingFile);
  auto* rq2 = report->add_subcommand("rq2", "perturbation probe");
  rq2->add_option("--perturbed", perturbed_dir, "output of `perturb`")->required()
      ->check(CLI::ExistingDirectory);
  rq2->add_option("--predictions", prediction_files)->required()->check(CLI::ExistingFile);
  rq2->add_option("--metadata", metadata_path)->check(CLI::ExistingFile);
  auto* rq3 = report->add_subcommand("rq3", "intervention deltas");
  rq3->add_option("--gt-dir", gt_dir)->required()->check(CLI::ExistingDirectory);
  rq3->add_option("--predictions", prediction_files)->required()->check(CLI::ExistingFile);
  rq3->add_option("--corrections", corrections_path, "corrector output JSONL")
      ->check(CLI::ExistingFile);
  auto* correction = report->add_subcommand("correction-request",
                                            "emit correction requests for an external corrector");
  correction->add_option("--gt-dir", gt_dir)->required()->check(CLI::ExistingDirectory);
  correction->add_option("--predictions", prediction_files)->required()->check(CLI::ExistingFile);
  correction->add_option("--condition", condition, "prediction condition (default: plain run)");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig config = Resolve(g);
    const std::size_t threads = config.threads ? config.threads : DefaultThreads();

    if (*normalize) {
      const auto result = NormalizePageWithWarnings(ReadInput(norm_input), config.profile);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << result.text;
      if (!result.text.empty() && result.text.back() != '\n') std::cout << '\n';
    } else if (*score) {
      const std::string ref = ReadUtf8File(ref_path);
      const std::string hyp = ReadUtf8File(hyp_path);
      const EditCounts c = CharEdits(ref, hyp, config.profile);
      const EditCounts w = WordEdits(ref, hyp, config.profile);
      const json out = {{"profile", config.profile_name},
                        {"cer", c.rate()},
                        {"wer", w.rate()},
                        {"char_edits", c.edits},
                        {"ref_chars", c.ref_length},
                        {"word_edits", w.edits},
                        {"ref_words", w.ref_length}};
      std::cout << out.dump(2) << '\n';
    } else if (*classify) {
      const Lexicon lexicon = LoadLexicon(config, lexicon_path);
      const NormProfile tax = NormProfile::Taxonomy();
      const auto ref = TokenizeWords(NormalizePage(ReadUtf8File(ref_path), tax));
      const auto hyp = TokenizeWords(NormalizePage(ReadUtf8File(hyp_path), tax));
      const auto ops = AlignWords(ref, hyp);
      WriteErrorCsv(std::cout,
                    ClassifyPage(ops, lexicon, page_label, system_label, config.taxonomy));
    } else if (*perturb) {
      if (!perturb_input.empty()) {
        if (condition_name.empty()) throw InputError("--input needs --condition");
        auto spec = PerturbSpec::FromConditionName(
            condition_name, DeriveSeed(config.seed, condition_name));
        if (!spec) throw InputError("unknown condition \"" + condition_name + "\"");
        std::cout << Perturb(ReadInput(perturb_input), *spec);
      } else {
        if (gt_dir.empty()) throw InputError("perturb needs --gt-dir or --input");
        RunLock lock(config.output_dir);
        const auto texts = PerturbCorpus(LoadGroundTruthDir(gt_dir), config.seed, threads);
        WritePerturbedCorpus(texts, config.seed, config.output_dir);
        std::cerr << "wrote " << texts.size() << " conditions to "
                  << config.output_dir.string() << '\n';
      }
    } else if (*gain) {
      RunLock lock(config.output_dir);
      const GainReport r = RunGain(ReadTokenLog(token_log), LoadGroundTruthDir(gt_dir));
      for (const auto& p : r.skipped_pages) {
        std::cerr << "warning: token log page \"" << p << "\" has no ground truth\n";
      }
      WriteGain(r, config.output_dir);
      std::cout << ReadFile(config.output_dir / "gain_summary.csv");
    } else if (*mask) {
      RunLock lock(config.output_dir);
      const VocabMask m =
          BuildVocabMask(ReadVocab(vocab_path), config.interventions.mask_punctuation);
      WriteFile(config.output_dir / "mask.bin", PackBits(m.allowed));
      const json summary = {{"vocab_size", m.allowed.size()},
                            {"allowed", m.n_allowed},
                            {"masked", m.n_masked},
                            {"special", m.n_special}};
      WriteFile(config.output_dir / "mask_summary.json", summary.dump(2) + "\n");
      std::cout << summary.dump(2) << '\n';
    } else if (*abstain) {
      const Corpus corpus = LoadCorpus(gt_dir, prediction_files, "", {});
      if (target_rate) {
        std::vector<double> ratios;
        const NormProfile p = NormProfile::Rq3();
        for (const auto& system : corpus.systems) {
          for (const auto& [page_id, text] : corpus.For(system, condition)) {
            const double ref =
                static_cast<double>(unicode::Length(NormalizePage(corpus.Find(page_id)->gt_text, p)));
            ratios.push_back(static_cast<double>(unicode::Length(NormalizePage(text, p))) / ref);
          }
        }
        config.interventions.abstain_threshold = CalibrateAbstainThreshold(ratios, *target_rate);
        std::cerr << "calibrated threshold " << config.interventions.abstain_threshold << '\n';
      } else if (threshold) {
        config.interventions.abstain_threshold = *threshold;
      }
      config.rq3_pairs.clear();
      config.abstain_baseline = condition;
      RunLock lock(config.output_dir);
      const Rq3Result r = RunRq3(corpus, config);
      WriteRq3(r, config.output_dir);
      std::cout << ReadFile(config.output_dir / "rq3_abstain.csv");
    } else if (*replay) {
      const ReplayMethod m = method == "vcd"    ? ReplayMethod::kVcd
                             : method == "m3id" ? ReplayMethod::kM3id
                                                : ReplayMethod::kNone;
      const ContrastiveParams& params =
          m == ReplayMethod::kVcd ? config.interventions.vcd : config.interventions.m3id;
      std::vector<bool> allowed;
      if (!vocab_path.empty()) {
        allowed = BuildVocabMask(ReadVocab(vocab_path), config.interventions.mask_punctuation)
                      .allowed;
      }
      for (const ReplayStep& step : ReadReplay(replay_path)) {
        const ReplayChoice c = Replay(step, m, params, allowed);
        const json line = {{"page_id", c.page_id},
                           {"step", c.step},
                           {"token_id", c.token_id},
                           {"score", c.score}};
        std::cout << line.dump() << '\n';
      }
    } else if (*stats) {
      const DeltaSummary s =
          DeltaTable(ReadRateCsv(baseline_csv), ReadRateCsv(treated_csv),
                     direction == "less" ? Direction::kTreatedLess : Direction::kTreatedGreater);
      WriteDeltaCsv(std::cout, std::vector<DeltaRow>{{"", "", s}});
    } else if (*rq1) {
      const Corpus corpus = LoadCorpus(gt_dir, prediction_files, metadata_path, systems);
      const Lexicon lexicon = LoadLexicon(config, lexicon_path);
      RunLock lock(config.output_dir);
      WriteRq1(RunRq1(corpus, lexicon, config), config.output_dir);
    } else if (*rq2) {
      std::map<std::string, PageMeta> meta;
      if (!metadata_path.empty()) meta = ReadMetadataJsonl(metadata_path);
      const auto result = RunRq2(LoadPerturbedCorpus(perturbed_dir),
                                 ReadAllPredictions(prediction_files), meta, config);
      RunLock lock(config.output_dir);
      WriteRq2(result, config.output_dir);
    } else if (*rq3) {
      std::vector<Prediction> corrected;
      if (!corrections_path.empty()) corrected = ReadCorrections(corrections_path);
      const Corpus corpus = LoadCorpus(gt_dir, prediction_files, "", {}, corrected);
      RunLock lock(config.output_dir);
      WriteRq3(RunRq3(corpus, config), config.output_dir);
    } else if (*correction) {
      const Corpus corpus = LoadCorpus(gt_dir, prediction_files, "", {});
      RunLock lock(config.output_dir);
      WriteFile(config.output_dir / "correction_requests.jsonl",
                CorrectionRequests(corpus, condition, config.correction_exemplars));
    }
  } catch (const std::exception& e) {
    std::cerr << "ocrprobe: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
