#ifndef OCRPROBE_HARNESS_CONFIG_H_
#define OCRPROBE_HARNESS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ocrprobe/interventions.h"
#include "ocrprobe/taxonomy.h"
#include "ocrprobe/textnorm.h"

namespace ocrprobe::harness {

struct InterventionParams {
  ContrastiveParams vcd = ContrastiveParams::Vcd();
  ContrastiveParams m3id = ContrastiveParams::M3id();
  double abstain_threshold = 1.5;
  std::u32string mask_punctuation = DefaultMaskPunctuation();
};

// One RQ3 comparison: an intervention condition scored against the
// baseline condition it was run alongside.
struct InterventionPair {
  std::string intervention;
  std::string baseline;
};

struct Exemplar {
  std::string input;
  std::string output;
};

struct RunConfig {
  NormProfile profile = NormProfile::Raw();
  std::string profile_name = "raw";
  std::optional<std::filesystem::path> lexicon;
  std::uint64_t seed = 0;
  InterventionParams interventions;
  TaxonomyConfig taxonomy;
  std::vector<InterventionPair> rq3_pairs;
  // Baseline condition that length abstention is applied to; none disables it.
  std::optional<std::string> abstain_baseline;
  std::vector<Exemplar> correction_exemplars;
  std::filesystem::path output_dir = "ocrprobe-out";
  std::size_t threads = 0;
};

// A preset name or an object of NormProfile switches (canonical_form is
// "NFC" or "NFKC"). Throws InputError on unknown names or keys.
NormProfile ParseProfile(const nlohmann::json& j);

// Relative paths resolve against `base_dir`. Throws InputError for unknown
// keys, bad values, or referenced files that do not exist.
RunConfig ParseConfig(const nlohmann::json& j,
                      const std::filesystem::path& base_dir);
RunConfig LoadConfig(const std::filesystem::path& path);

}  // namespace ocrprobe::harness

#endif  // OCRPROBE_HARNESS_CONFIG_H_
