#pragma once

// Adaptive robust embedding.
//
// Costs and dither distances are computed once per cover. The embedder then
// walks the schedule (E_n, t) = (1,1), (1,2), ..., (1,12), (2,1), ...,
// (6,12): RS-encode with capability t, STC-embed into domain E_n, push the
// candidate stego through the simulated channel, extract, and accept the
// first candidate whose message error rate is at most the threshold. If no
// candidate qualifies the lowest-error one is returned and the report is
// marked exhausted.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stegarmor/bits.hpp"
#include "stegarmor/channel_sim.hpp"
#include "stegarmor/cost_model.hpp"
#include "stegarmor/jpeg_codec.hpp"
#include "stegarmor/stc_codec.hpp"

namespace stegarmor {

inline constexpr double kDefaultThreshold = 1e-4;
inline constexpr int kCrcBits = 32;

struct EmbedConfig {
  double alpha = kDefaultAlpha;
  double threshold = kDefaultThreshold;
  int h = kDefaultConstraintHeight;
  ChannelModel channel;
  // false: the loop checks extraction without any channel (lossless).
  bool simulate_channel = true;
  std::uint64_t stc_seed = 0;
  // Prefix the message with a CRC-32 so auto_extract() can find (E_n, t).
  bool crc = false;
};

struct StegoRecipe {
  int e_n = 1;
  int t = 1;
  std::size_t n_m = 0;
  int h = kDefaultConstraintHeight;
  std::uint64_t stc_seed = 0;
  std::optional<int> cover_qf;
  QuantTable cover_table;
  bool crc = false;

  bool operator==(const StegoRecipe&) const = default;
};

struct Attempt {
  int e_n = 1;
  int t = 1;
  double r_e = 1.0;
  bool fits = true;  // false: encoded message longer than the cover sequence
  std::size_t changes = 0;

  bool operator==(const Attempt&) const = default;
};

struct RobustnessReport {
  std::vector<Attempt> attempts;
  StegoRecipe final;
  double final_r_e = 1.0;
  bool exhausted = false;
  int channel_quality = 0;  // 0 when no channel was simulated
};

struct EmbedResult {
  CoeffImage stego;
  StegoRecipe recipe;
  RobustnessReport report;
};

// Payload size for a relative payload p in bits per nonzero AC coefficient.
std::size_t message_length_for_payload(const CoeffImage& cover, double payload);

EmbedResult embed(const CoeffImage& cover, const Bits& message, const EmbedConfig& cfg);

// One fixed (E_n, t) setting, evaluated exactly as a single loop attempt.
// `analysis` may be reused across calls for the same cover and alpha.
EmbedResult embed_fixed(const CoeffImage& cover, const CoverAnalysis& analysis,
                        const Bits& message, const EmbedConfig& cfg, int e_n, int t);

struct ExtractResult {
  Bits message;
  bool ok = false;  // RS decoding succeeded (and CRC matched, if used)
  bool crc_ok = false;
};

ExtractResult extract(const CoeffImage& stego, const StegoRecipe& recipe);

struct AutoExtractResult {
  Bits message;
  int e_n = 0;
  int t = 0;
};

std::optional<AutoExtractResult> auto_extract(const CoeffImage& stego, std::size_t n_m,
                                              int h, std::uint64_t stc_seed,
                                              const QuantTable& cover_table);

// Fraction of differing bits; sizes must match.
double bit_error_rate(const Bits& truth, const Bits& got);

std::uint32_t crc32_bits(const Bits& bits);

// Sidecar and report serialization (JSON).
std::string recipe_to_json(const StegoRecipe& recipe);
StegoRecipe recipe_from_json(const std::string& text);
std::string report_to_json(const RobustnessReport& report);

}  // namespace stegarmor
