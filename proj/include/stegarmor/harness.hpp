#pragma once

// Batch experiments: robustness sweeps, threshold studies and ablations over
// a set of covers, reported as CSV.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stegarmor/bits.hpp"
#include "stegarmor/jpeg_codec.hpp"

namespace stegarmor {

struct ExperimentSpec {
  // Covers: a directory of .jpg/.jpeg (used as is) and .pgm (compressed at
  // q_cover). Empty: a seeded synthetic corpus.
  std::string images_dir;
  int corpus_size = 20;
  int corpus_dim = 256;
  std::uint64_t corpus_seed = 1;

  int q_cover = 75;
  std::optional<int> q_channel;  // nullopt: use each cover's own quality
  std::vector<double> payloads = {0.05, 0.10};
  std::vector<double> thresholds = {1e-4};
  double alpha = 0.7;
  int h = 10;
  std::uint64_t message_seed = 7;
  std::uint64_t stc_seed = 0;
  int repetitions = 1;
  bool timing = true;  // false: wall_ms column is written as 0
  int workers = 0;     // 0: STEGARMOR_WORKERS or hardware concurrency
};

ExperimentSpec spec_from_json(const std::string& text);

struct NamedCover {
  std::string name;
  CoeffImage image;
};

SpatialImage synthetic_image(std::uint64_t seed, int width, int height);
std::vector<NamedCover> load_covers(const ExperimentSpec& spec);

SpatialImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const SpatialImage& img);

// Deterministic pseudo-random message bits.
Bits random_bits(std::size_t n, std::uint64_t seed);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

struct MetricsRow {
  std::string image;
  int rep = 0;
  double payload_nominal = 0;
  double payload = 0;  // n_m / n_nzac
  std::size_t n_m = 0;
  std::size_t n_nzac = 0;
  int q_cover = 0;
  int q_channel = 0;
  double threshold = 0;
  int e_n = 0;
  int t = 0;
  double r_error = 1.0;
  bool exhausted = false;
  int attempts = 0;
  double wall_ms = 0;
  std::string status = "ok";
};

struct SummaryRow {
  double payload_nominal = 0;
  double threshold = 0;
  std::size_t rows = 0;
  double mean_payload = 0;
  double mean_r_error = 0;
  double mean_e_n = 0;
  double mean_t = 0;
  std::size_t exhausted = 0;
};

struct BenchResult {
  std::vector<MetricsRow> rows;
  std::vector<SummaryRow> summary;
};

using ProgressFn = std::function<void(const std::string&)>;

BenchResult run_bench(const ExperimentSpec& spec, const ProgressFn& progress = {});
std::string bench_csv(const BenchResult& r);

enum class AblationMode { kDomain, kCapability };

struct AblationRow {
  std::string image;
  std::string setting;  // "E1".."E6", "t1".."t12", or "adaptive"
  int e_n = 0;
  int t = 0;
  double payload = 0;
  std::size_t n_m = 0;
  double r_error = 1.0;
  bool exhausted = false;
  std::size_t changes = 0;
  double wall_ms = 0;
  std::string status = "ok";
};

struct AblationMean {
  std::string setting;
  std::size_t rows = 0;
  double mean_r_error = 0;
};

struct AblationResult {
  AblationMode mode = AblationMode::kDomain;
  double payload_nominal = 0;
  int q_cover = 0;
  int q_channel = 0;
  std::vector<AblationRow> rows;
  std::vector<AblationMean> means;  // fixed settings in sweep order, then adaptive
};

// Domain mode fixes t = fixed_t and sweeps E_n = 1..6; capability mode fixes
// E_n = 1 and sweeps t = 1..12. Both add the adaptive scheme. Uses
// spec.payloads[0] and spec.thresholds[0].
AblationResult run_ablation(const ExperimentSpec& spec, AblationMode mode, int fixed_t = 8,
                            const ProgressFn& progress = {});
std::string ablation_csv(const AblationResult& r);

int resolve_workers(int requested);

}  // namespace stegarmor
