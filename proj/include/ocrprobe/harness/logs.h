#ifndef OCRPROBE_HARNESS_LOGS_H_
#define OCRPROBE_HARNESS_LOGS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ocrprobe/grounding.h"
#include "ocrprobe/interventions.h"

namespace ocrprobe::harness {

// page_id -> tokens in token_index order. Each line is
// {page_id, token_index, token_text, char_start, char_end, logp_cond,
// logp_free, top1_prob, entropy}; numeric fields accept null, "nan",
// "inf" and "-inf" for non-finite values.
std::map<std::string, std::vector<LoggedToken>> ReadTokenLog(
    const std::filesystem::path& path);

struct GainReport {
  std::vector<TokenGainRecord> records;
  GainSummary summary;
  // Pages in the log without ground truth.
  std::vector<std::string> skipped_pages;
};

GainReport RunGain(const std::map<std::string, std::vector<LoggedToken>>& log,
                   const std::map<std::string, std::string>& gt);

// gain_tokens.csv and gain_summary.csv.
void WriteGain(const GainReport& report, const std::filesystem::path& dir);

// Line-delimited {token_id, decoded, is_special?}.
std::vector<VocabEntry> ReadVocab(const std::filesystem::path& path);

struct VocabMask {
  // Indexed by token_id; ids absent from the vocabulary are masked.
  std::vector<bool> allowed;
  std::size_t n_allowed = 0;
  std::size_t n_masked = 0;
  std::size_t n_special = 0;
};

VocabMask BuildVocabMask(const std::vector<VocabEntry>& vocab,
                         const std::u32string& punctuation);

// Bit i of the output is allowed[i]; bytes are filled LSB first.
std::string PackBits(const std::vector<bool>& bits);
// Throws InputError if `bytes` is too short for n bits.
std::vector<bool> UnpackBits(std::string_view bytes, std::size_t n);

enum class ReplayMethod { kVcd, kM3id, kNone };

// One decoding step of an exported run. For VCD, logits_a are the clean
// logits and logits_b the noised ones; for M3ID, image-conditioned and
// text-only. Method kNone uses logits_a alone.
struct ReplayStep {
  std::string page_id;
  std::size_t step = 0;
  std::vector<float> logits_a;
  std::vector<float> logits_b;
  std::vector<std::int64_t> history;
};

struct ReplayChoice {
  std::string page_id;
  std::size_t step = 0;
  std::int64_t token_id = -1;
  double score = 0.0;
};

// Line-delimited {page_id, step, logits_a, logits_b?, history?}.
std::vector<ReplayStep> ReadReplay(const std::filesystem::path& path);

// Combines the step's logits with the chosen method, applies `mask` when
// non-empty, and takes the argmax.
ReplayChoice Replay(const ReplayStep& step, ReplayMethod method,
                    const ContrastiveParams& params, const std::vector<bool>& mask);

}  // namespace ocrprobe::harness

#endif  // OCRPROBE_HARNESS_LOGS_H_
