#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include <unistd.h>

#include "json.hpp"
#include "ocrprobe/harness/config.h"
#include "ocrprobe/harness/corpus.h"
#include "ocrprobe/harness/io.h"
#include "ocrprobe/harness/logs.h"
#include "ocrprobe/harness/rq1.h"
#include "ocrprobe/harness/rq2.h"
#include "ocrprobe/harness/rq3.h"
#include "ocrprobe/unicode.h"
#include "oracles.h"
#include "synthetic.h"

namespace ocrprobe::harness {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("ocrprobe_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string ErrorOf(auto&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

RunConfig OneThread() {
  RunConfig c;
  c.threads = 1;
  return c;
}

TEST(IngestTest, JoinsPagesAndPredictions) {
  TempDir dir;
  WriteFile(dir.path() / "gt/a.txt", "λόγος");
  WriteFile(dir.path() / "gt/b.txt", "ἦν");
  WriteFile(dir.path() / "gt/c.txt", "θεός");
  WriteFile(dir.path() / "p.jsonl",
            "{\"page_id\":\"a\",\"system_id\":\"s\",\"text\":\"λογος\"}\n"
            "{\"page_id\":\"b\",\"system_id\":\"s\",\"text\":\"ἦν\"}\n\n"
            "{\"page_id\":\"c\",\"system_id\":\"s\",\"text\":\"θεος\"}\n");
  const Corpus c = IngestCorpus(dir.path() / "gt", {dir.path() / "p.jsonl"});
  ASSERT_EQ(c.pages.size(), 3u);
  EXPECT_EQ(c.pages[0].page_id, "a");
  EXPECT_EQ(c.pages[0].predictions.at("s"), "λογος");
  EXPECT_TRUE(c.warnings.empty());
}

TEST(IngestTest, MissingSystemReportedButPageKept) {
  const Corpus c = BuildCorpus({{"a", "α"}, {"b", "β"}},
                               {{"a", "s1", "α", ""}, {"b", "s1", "β", ""},
                                {"a", "s2", "α", ""}});
  ASSERT_EQ(c.pages.size(), 2u);
  EXPECT_EQ(c.For("s2").size(), 1u);
  ASSERT_EQ(c.warnings.size(), 1u);
  EXPECT_NE(c.warnings[0].find("s2"), std::string::npos);
  EXPECT_NE(c.warnings[0].find(" b"), std::string::npos);
  // Unpaired summaries still see both pages of s1.
  const Rq1Result r = RunRq1(c, Lexicon{}, OneThread());
  ASSERT_EQ(r.systems.size(), 2u);
  EXPECT_EQ(r.systems[0].cer_raw.n_pages, 2u);
  EXPECT_EQ(r.systems[1].cer_raw.n_pages, 1u);
}

TEST(IngestTest, CorruptJsonNamesLine) {
  TempDir dir;
  WriteFile(dir.path() / "p.jsonl",
            "{\"page_id\":\"a\",\"system_id\":\"s\",\"text\":\"x\"}\n"
            "\n"
            "{\"page_id\": oops}\n");
  const std::string msg = ErrorOf([&] { ReadPredictionsJsonl(dir.path() / "p.jsonl"); });
  EXPECT_NE(msg.find("p.jsonl:3"), std::string::npos) << msg;
}

TEST(IngestTest, InvalidUtf8ReportsOffset) {
  TempDir dir;
  WriteFile(dir.path() / "gt/a.txt", std::string("αβ\xC3(", 6));
  const std::string msg = ErrorOf([&] { LoadGroundTruthDir(dir.path() / "gt"); });
  EXPECT_NE(msg.find("offset 4"), std::string::npos) << msg;

  WriteFile(dir.path() / "p.jsonl",
            "{\"page_id\":\"a\",\"system_id\":\"s\",\"text\":\"x\"}\n"
            "{\"page_id\":\"a\",\"system_id\":\"t\",\"text\":\"\xFF\"}\n");
  const std::string msg2 = ErrorOf([&] { ReadPredictionsJsonl(dir.path() / "p.jsonl"); });
  EXPECT_NE(msg2.find("p.jsonl:2"), std::string::npos) << msg2;
  EXPECT_NE(msg2.find("offset"), std::string::npos) << msg2;
}

TEST(IngestTest, DuplicatesAreErrors) {
  TempDir dir;
  WriteFile(dir.path() / "p.jsonl",
            "{\"page_id\":\"a\",\"system_id\":\"s\",\"text\":\"x\"}\n"
            "{\"page_id\":\"a\",\"system_id\":\"s\",\"text\":\"y\"}\n");
  EXPECT_THROW(ReadPredictionsJsonl(dir.path() / "p.jsonl"), InputError);
  WriteFile(dir.path() / "m.jsonl",
            "{\"page_id\":\"a\",\"layout\":\"single_column\"}\n"
            "{\"page_id\":\"a\",\"layout\":\"two_column\"}\n");
  EXPECT_THROW(ReadMetadataJsonl(dir.path() / "m.jsonl"), InputError);
}

TEST(IngestTest, EmptyGroundTruthRejected) {
  TempDir dir;
  WriteFile(dir.path() / "gt/a.txt", " \n");
  EXPECT_THROW(LoadGroundTruthDir(dir.path() / "gt"), InputError);
}

TEST(ConfigTest, ParsesAndResolvesPaths) {
  TempDir dir;
  WriteFile(dir.path() / "lex.txt", "λόγος\n");
  WriteFile(dir.path() / "run.json", R"({
    "profile": {"base": "no-diac", "fold_case": true},
    "lexicon": "lex.txt",
    "seed": 42,
    "output_dir": "out",
    "interventions": {"m3id": {"repetition_penalty": 1.15}, "abstain_threshold": 1.4},
    "rq3": {"pairs": [{"intervention": "mask", "baseline": "base"}]}
  })");
  const RunConfig c = LoadConfig(dir.path() / "run.json");
  EXPECT_TRUE(c.profile.strip_diacritics);
  EXPECT_TRUE(c.profile.fold_case);
  EXPECT_EQ(c.lexicon, dir.path() / "lex.txt");
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.output_dir, dir.path() / "out");
  EXPECT_EQ(c.interventions.m3id.repetition_penalty, 1.15);
  EXPECT_EQ(c.interventions.m3id.alpha, 0.5);
  EXPECT_EQ(c.interventions.abstain_threshold, 1.4);
  ASSERT_EQ(c.rq3_pairs.size(), 1u);
  EXPECT_EQ(c.rq3_pairs[0].baseline, "base");
}

TEST(ConfigTest, RejectsMissingFilesAndUnknownKeys) {
  TempDir dir;
  using nlohmann::json;
  EXPECT_THROW(ParseConfig(json{{"lexicon", "nope.txt"}}, dir.path()), InputError);
  EXPECT_THROW(ParseConfig(json{{"sede", 1}}, dir.path()), InputError);
  EXPECT_THROW(ParseConfig(json{{"profile", "nfd"}}, dir.path()), InputError);
  EXPECT_THROW(ParseConfig(json::parse(R"({"interventions":{"vcd":{"beta":0}}})"),
                           dir.path()),
               InputError);
}

TEST(RunLockTest, SecondLockFails) {
  TempDir dir;
  {
    RunLock lock(dir.path());
    EXPECT_TRUE(fs::exists(dir.path() / RunLock::kFileName));
    EXPECT_THROW(RunLock second(dir.path()), InputError);
  }
  EXPECT_FALSE(fs::exists(dir.path() / RunLock::kFileName));
  RunLock again(dir.path());
}

TEST(ParallelForTest, RethrowsAndCoversAll) {
  std::vector<int> hits(1000, 0);
  ParallelFor(hits.size(), 8, [&](std::size_t i) { hits[i]++; });
  EXPECT_EQ(std::count(hits.begin(), hits.end(), 1), 1000);
  EXPECT_THROW(ParallelFor(100, 4,
                           [](std::size_t i) {
                             if (i == 50) throw std::runtime_error("x");
                           }),
               std::runtime_error);
}

TEST(Sha256Test, KnownDigest) {
  EXPECT_EQ(Sha256Hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Rq1Test, IdenticalPredictionsGiveZeros) {
  const Corpus c = BuildCorpus({{"a", "ὁ λόγος ἦν."}, {"b", "καὶ θεός"}},
                               {{"a", "s", "ὁ λόγος ἦν.", ""}, {"b", "s", "καὶ θεός", ""}});
  const Rq1Result r = RunRq1(c, Lexicon{}, OneThread());
  ASSERT_EQ(r.systems.size(), 1u);
  EXPECT_EQ(r.systems[0].cer_raw.mean, 0.0);
  EXPECT_EQ(r.systems[0].wer_no_diac.median, 0.0);
  EXPECT_TRUE(r.errors.empty());
  EXPECT_EQ(r.systems[0].shares.total, 0u);
}

TEST(Rq1Test, ToyCorpusSharesMatchHandCounts) {
  // Each page carries one worked example; expected categories are hand
  // labels, not computed.
  const std::vector<std::tuple<std::string, std::string, std::string, Category>> pages = {
      {"p1", "τοῖς αὑτοῖς λόγοις", "τοῖς αὐτοῖς λόγοις", Category::kAccentDiacritic},
      {"p2", "ἦν καὶ ἐν", "ἦν χαὶ ἐν", Category::kCharConfusion},
      {"p3", "ὁ Παῦλος ἔφη", "ὁ ΠάULO ἔφη", Category::kCrossScript},
      {"p4", "τὸν μισθός ἔχει", "τὸν ἐκούσιος ἔχει", Category::kWordSubstitution},
      {"p5", "ἦν ἐν ἀρχῇ", "ἦν ἐν ἀρχῇ 141", Category::kPageFurniture},
      {"p6", "ὅτι ζητεῖτε με", "ὅτι με", Category::kOmission},
      {"p7", "καὶ καταφανεῖς· ἦν", "καὶ καταφανεῖς\" ἦν", Category::kPunctuation},
  };
  std::map<std::string, std::string> gt;
  std::vector<Prediction> preds;
  for (const auto& [id, ref, hyp, _] : pages) {
    gt[id] = ref;
    preds.push_back({id, "toy", hyp, ""});
  }
  Lexicon lex;
  for (const char* w : {"μισθός", "ἐκούσιος", "ζητεῖτε", "τὸν", "ἔχει"}) lex.Insert(w);
  const Rq1Result r = RunRq1(BuildCorpus(gt, preds), lex, OneThread());
  ASSERT_EQ(r.errors.size(), pages.size());
  for (std::size_t i = 0; i < pages.size(); ++i) {
    EXPECT_EQ(r.errors[i].page_id, std::get<0>(pages[i]));
    EXPECT_EQ(r.errors[i].category.value, std::get<3>(pages[i])) << std::get<0>(pages[i]);
  }
  const CategoryShares& s = r.systems[0].shares;
  EXPECT_EQ(s.total, 7u);
  // 21 ground-truth words in total.
  EXPECT_EQ(s[Category::kOmission].count, 1u);
  EXPECT_DOUBLE_EQ(s[Category::kOmission].share, 1.0 / 7.0);
  EXPECT_DOUBLE_EQ(s[Category::kOmission].rate_per_1000, 1000.0 / 21.0);
  EXPECT_EQ(s[Category::kOvergeneration].count, 0u);
}

std::map<std::string, std::string> SyntheticDocs(std::size_t n, std::uint64_t seed) {
  std::map<std::string, std::string> docs;
  for (std::size_t i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "doc%02zu", i);
    docs[id] = synthetic::Document(seed + i);
  }
  return docs;
}

std::vector<Prediction> CopyPredictions(const ConditionTexts& texts, const std::string& system) {
  std::vector<Prediction> out;
  for (const auto& [cond, docs] : texts) {
    for (const auto& [id, text] : docs) out.push_back({id, system, text, cond});
  }
  return out;
}

std::vector<Prediction> RepairPredictions(const ConditionTexts& texts,
                                          const std::string& system) {
  std::vector<Prediction> out;
  const auto& original = texts.at("original");
  for (const auto& [cond, docs] : texts) {
    for (const auto& [id, text] : docs) {
      out.push_back({id, system, synthetic::LexicalRepair(text, original.at(id)), cond});
    }
  }
  return out;
}

const Rq2TableRow& Row(const Rq2Result& r, const std::string& system,
                       const std::string& condition) {
  for (const auto& row : r.table) {
    if (row.system_id == system && row.condition == condition) return row;
  }
  throw std::runtime_error("no row " + system + "/" + condition);
}

TEST(Rq2Test, CopyPredictorHasZeroDeltas) {
  const ConditionTexts texts = PerturbCorpus(SyntheticDocs(5, 1), 42);
  const Rq2Result r = RunRq2(texts, CopyPredictions(texts, "copy"), {}, OneThread());
  EXPECT_EQ(r.table.size(), 19u);
  for (const auto& row : r.table) {
    EXPECT_EQ(row.median_cer, 0.0) << row.condition;
    if (row.condition != "original") {
      EXPECT_EQ(row.delta_median, 0.0);
      EXPECT_EQ(row.p_value, 1.0);
      EXPECT_EQ(row.stars, "ns");
    }
  }
}

TEST(Rq2Test, RepairPredictorShowsAxisAsymmetry) {
  const ConditionTexts texts = PerturbCorpus(SyntheticDocs(10, 2), 42);
  const Rq2Result r = RunRq2(texts, RepairPredictions(texts, "repair"), {}, OneThread());
  EXPECT_GT(*Row(r, "repair", "char_random").delta_median, 0.3);
  EXPECT_EQ(*Row(r, "repair", "word_random").delta_median, 0.0);
  EXPECT_LT(*Row(r, "repair", "char_random").p_value, 0.01);
}

TEST(Rq2Test, SingleColumnFilterExcludesExactlyTwoColumnPages) {
  const auto docs = SyntheticDocs(6, 3);
  const ConditionTexts texts = PerturbCorpus(docs, 9);
  std::map<std::string, PageMeta> meta = {{"doc01", {"e", Layout::kTwoColumn}},
                                          {"doc04", {"e", Layout::kTwoColumn}},
                                          {"doc02", {"e", Layout::kSingleColumn}}};
  const Rq2Result r = RunRq2(texts, CopyPredictions(texts, "s"), meta, OneThread());
  EXPECT_EQ(r.excluded_pages, (std::vector<std::string>{"doc01", "doc04"}));
  for (const auto& row : r.pages) {
    EXPECT_NE(row.page_id, "doc01");
    EXPECT_NE(row.page_id, "doc04");
  }
  EXPECT_EQ(Row(r, "s", "original").n_pages, 4u);
}

TEST(Rq2Test, UnknownConditionRejected) {
  ConditionTexts texts = {{"original", {{"a", "α β"}}}, {"word_flip", {{"a", "β α"}}}};
  EXPECT_THROW(RunRq2(texts, {}, {}, OneThread()), InputError);
}

TEST(PerturbedCorpusTest, RoundTripAndManifest) {
  TempDir dir;
  const ConditionTexts texts = PerturbCorpus(SyntheticDocs(3, 4), 11);
  WritePerturbedCorpus(texts, 11, dir.path());
  EXPECT_EQ(LoadPerturbedCorpus(dir.path()), texts);
  const auto manifest = nlohmann::json::parse(ReadFile(dir.path() / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 11);
  EXPECT_EQ(manifest["conditions"].size(), 19u);
  EXPECT_EQ(manifest["files"]["char_random/doc00.txt"],
            Sha256Hex(texts.at("char_random").at("doc00")));

  WriteFile(dir.path() / "char_random" / "doc00.txt", "tampered");
  EXPECT_NE(ErrorOf([&] { LoadPerturbedCorpus(dir.path()); }).find("checksum mismatch"),
            std::string::npos);
}

Corpus Rq3Corpus(std::size_t n, double shift, std::size_t long_pages) {
  std::map<std::string, std::string> gt;
  std::vector<Prediction> preds;
  const std::string ref = "αβγδεζηθικλμνξοπρστυφχψωαβγδεζηθικλμνξοπρστυφχψωαβ";  // 50
  for (std::size_t i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "p%03zu", i);
    gt[id] = ref;
    // Baseline with i % 10 + 1 substitutions at the end of the page.
    const std::size_t errs = i % 10 + 1;
    std::u32string hyp = unicode::Decode(ref);
    for (std::size_t k = 0; k < errs; ++k) hyp[hyp.size() - 1 - k] = U'x';
    std::string base = unicode::Encode(hyp);
    if (i < long_pages) base += std::string(60, 'y');  // ratio 2.2
    preds.push_back({id, "s", base, "base"});
    if (shift > 0) {
      // Treated repairs a fixed number of characters.
      std::u32string fixed = hyp;
      const std::size_t repaired = std::min<std::size_t>(errs, static_cast<std::size_t>(shift));
      for (std::size_t k = 0; k < repaired; ++k) {
        fixed[fixed.size() - 1 - k] = unicode::Decode(ref)[fixed.size() - 1 - k];
      }
      std::string treated = unicode::Encode(fixed);
      if (i < long_pages) treated += std::string(60, 'y');
      preds.push_back({id, "s", treated, "mask"});
    } else {
      preds.push_back({id, "s", base, "mask"});
    }
  }
  return BuildCorpus(gt, preds);
}

TEST(Rq3Test, TreatedEqualsBaselineIsAllNs) {
  RunConfig config = OneThread();
  config.rq3_pairs = {{"mask", "base"}};
  const Rq3Result r = RunRq3(Rq3Corpus(20, 0, 0), config);
  ASSERT_EQ(r.deltas.size(), 1u);
  EXPECT_EQ(r.deltas[0].summary.delta_median, 0.0);
  EXPECT_EQ(r.deltas[0].summary.n_tie, 20u);
  EXPECT_EQ(r.deltas[0].summary.stars, "ns");
}

TEST(Rq3Test, ConstantImprovementIsHighlySignificantAtNinety) {
  RunConfig config = OneThread();
  config.rq3_pairs = {{"mask", "base"}};
  const Rq3Result r = RunRq3(Rq3Corpus(90, 1, 0), config);
  const DeltaSummary& s = r.deltas[0].summary;
  EXPECT_EQ(s.n_help, 90u);
  EXPECT_LT(s.delta_median, 0.0);
  EXPECT_LT(s.p_value, 0.001);
  EXPECT_EQ(s.stars, "***");
}

TEST(Rq3Test, UnmatchedBaselineIsHardError) {
  RunConfig config = OneThread();
  config.rq3_pairs = {{"mask", "greedy"}};
  EXPECT_THROW(RunRq3(Rq3Corpus(5, 1, 0), config), InputError);

  auto corpus = BuildCorpus({{"a", "α"}, {"b", "β"}},
                            {{"a", "s", "α", "base"}, {"a", "s", "α", "mask"},
                             {"b", "s", "β", "mask"}});
  config.rq3_pairs = {{"mask", "base"}};
  const std::string msg = ErrorOf([&] { RunRq3(corpus, config); });
  EXPECT_NE(msg.find("b"), std::string::npos);
}

TEST(Rq3Test, LengthAbstentionOnTwelvePercentLongPages) {
  RunConfig config = OneThread();
  config.abstain_baseline = "base";
  const Rq3Result r = RunRq3(Rq3Corpus(50, 0, 6), config);
  ASSERT_EQ(r.abstain.size(), 1u);
  const AbstainSummary& s = r.abstain[0];
  EXPECT_EQ(s.threshold, 1.5);
  EXPECT_EQ(s.n_abstained, 6u);
  EXPECT_DOUBLE_EQ(s.abstention_rate, 0.12);
  std::vector<double> kept;
  for (const auto& row : r.abstain_pages) {
    if (!row.abstained) kept.push_back(row.cer);
  }
  EXPECT_EQ(s.median_cer_kept, oracle::Median(kept));
}

TEST(CorrectionTest, RequestsAndIngestion) {
  TempDir dir;
  const Corpus c = BuildCorpus({{"a", "α"}}, {{"a", "s", "ά", ""}});
  const std::string req = CorrectionRequests(c, "", {{"in", "out"}});
  const auto j = nlohmann::json::parse(req.substr(0, req.find('\n')));
  EXPECT_EQ(j["system_id"], "s");
  EXPECT_EQ(j["text"], "ά");
  EXPECT_EQ(j["exemplars"][0]["output"], "out");
  WriteFile(dir.path() / "c.jsonl", "{\"page_id\":\"a\",\"system_id\":\"s\",\"text\":\"α\"}\n");
  const auto corrected = ReadCorrections(dir.path() / "c.jsonl");
  EXPECT_EQ(corrected[0].condition, kCorrectionCondition);
}

TEST(DeterminismTest, ReportsAreByteIdenticalAcrossThreadCounts) {
  TempDir a, b;
  const auto docs = SyntheticDocs(8, 6);
  const ConditionTexts texts = PerturbCorpus(docs, 3, 1);
  EXPECT_EQ(PerturbCorpus(docs, 3, 4), texts);
  std::vector<Prediction> preds = RepairPredictions(texts, "r");
  const auto copies = CopyPredictions(texts, "c");
  preds.insert(preds.end(), copies.begin(), copies.end());
  for (auto [dir, threads] : {std::pair{a.path(), 1}, std::pair{b.path(), 6}}) {
    RunConfig config;
    config.threads = threads;
    WriteRq2(RunRq2(texts, preds, {}, config), dir);
    std::vector<Prediction> plain;
    for (const auto& p : preds) {
      if (p.condition == "char_random") plain.push_back({p.page_id, p.system_id, p.text, ""});
    }
    WriteRq1(RunRq1(BuildCorpus(docs, plain), Lexicon{}, config), dir);
  }
  for (const char* f : {"rq1_page_metrics.csv", "rq1_errors.csv", "rq1_shares.csv",
                        "rq1_summary.json", "rq2_page_cer.csv", "rq2_table.csv",
                        "rq2_series.csv"}) {
    EXPECT_EQ(ReadFile(a.path() / f), ReadFile(b.path() / f)) << f;
  }
}

TEST(LogsTest, TokenLogNonFiniteAndGainReport) {
  TempDir dir;
  WriteFile(dir.path() / "log.jsonl",
            "{\"page_id\":\"p\",\"token_index\":1,\"token_text\":\"β\",\"char_start\":1,"
            "\"char_end\":2,\"logp_cond\":null,\"logp_free\":-1,\"top1_prob\":0.5,\"entropy\":1}\n"
            "{\"page_id\":\"p\",\"token_index\":0,\"token_text\":\"α\",\"char_start\":0,"
            "\"char_end\":1,\"logp_cond\":-0.5,\"logp_free\":\"-inf\",\"top1_prob\":0.9,"
            "\"entropy\":0.1}\n");
  const auto log = ReadTokenLog(dir.path() / "log.jsonl");
  ASSERT_EQ(log.at("p").size(), 2u);
  EXPECT_EQ(log.at("p")[0].token_text, "α");
  EXPECT_TRUE(std::isnan(log.at("p")[1].logp_cond));
  EXPECT_TRUE(std::isinf(log.at("p")[0].logp_free));
  const GainReport r = RunGain(log, {{"p", "αβ"}});
  EXPECT_FALSE(r.records[0].valid);
  EXPECT_FALSE(r.records[1].valid);
  EXPECT_EQ(r.summary[GainClass::kCorrect].count, 0u);
}

TEST(LogsTest, MaskBitsRoundTrip) {
  std::vector<VocabEntry> vocab = {{0, "α", false}, {2, "a", false}, {3, "<s>", true},
                                   {9, "ὁ ", false}};
  const VocabMask m = BuildVocabMask(vocab, DefaultMaskPunctuation());
  EXPECT_EQ(m.allowed.size(), 10u);
  EXPECT_EQ(m.n_allowed, 3u);
  EXPECT_EQ(m.n_masked, 7u);
  EXPECT_EQ(m.n_special, 1u);
  const std::string packed = PackBits(m.allowed);
  ASSERT_EQ(packed.size(), 2u);
  EXPECT_EQ(static_cast<unsigned char>(packed[0]), 0b00001001);
  EXPECT_EQ(static_cast<unsigned char>(packed[1]), 0b00000010);
  EXPECT_EQ(UnpackBits(packed, 10), m.allowed);
  EXPECT_THROW(UnpackBits(packed, 17), InputError);
}

TEST(LogsTest, ReplayMatchesDirectTransforms) {
  ReplayStep step{"p", 0, {1.0f, 3.0f, 2.0f}, {0.0f, 5.0f, 0.0f}, {}};
  // VCD: token 1 is plausible but penalized; token 2 wins.
  const ReplayChoice v = Replay(step, ReplayMethod::kVcd, ContrastiveParams::Vcd(), {});
  EXPECT_EQ(v.token_id, 2);
  // M3ID at step 0 has zero weight, so it picks the plain argmax.
  EXPECT_EQ(Replay(step, ReplayMethod::kM3id, ContrastiveParams::M3id(), {}).token_id, 1);
  EXPECT_EQ(Replay(step, ReplayMethod::kNone, {}, {true, false}).token_id, 0);
  step.logits_b.pop_back();
  EXPECT_THROW(Replay(step, ReplayMethod::kVcd, ContrastiveParams::Vcd(), {}), InputError);
}

}  // namespace
}  // namespace ocrprobe::harness
