// stegarmor: command-line front end.
//
//   embed     cover JPEG -> stego JPEG + recipe sidecar + robustness report
//   extract   stego JPEG (+ recipe, or --auto with a CRC payload) -> bits
//   simulate  recompress a JPEG through the lossy channel
//   bench     robustness sweep over a corpus, CSV
//   ablate    fixed-domain / fixed-capability ablations, CSV

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "stegarmor/channel_sim.hpp"
#include "stegarmor/cost_model.hpp"
#include "stegarmor/errors.hpp"
#include "stegarmor/harness.hpp"
#include "stegarmor/jpeg_codec.hpp"
#include "stegarmor/robust_embedder.hpp"

namespace sa = stegarmor;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitFailed = 2;  // exhausted embed, failed extract
constexpr int kExitUsage = 64;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sa::Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sa::Error("cannot write " + path);
  out << text;
}

// Message files hold ASCII '0'/'1'; whitespace is ignored.
sa::Bits read_bits(const std::string& path) {
  sa::Bits bits;
  for (char c : slurp(path)) {
    if (c == '0' || c == '1') {
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      throw sa::InvalidPayload("message file " + path + " contains characters other than 0/1");
    }
  }
  return bits;
}

void write_bits(const std::string& path, const sa::Bits& bits) {
  std::string s;
  s.reserve(bits.size() + 1);
  for (auto b : bits) s.push_back(b ? '1' : '0');
  s.push_back('\n');
  spit(path, s);
}

sa::CoeffImage load_jpeg(const std::string& path) { return sa::parse_jpeg(sa::read_file(path)); }

struct EmbedOpts {
  std::string cover;
  std::string message_file;
  std::string out = "stego";
  std::string dump_costs;
  double payload = 0;
  std::optional<int> q_channel;
  double alpha = sa::kDefaultAlpha;
  double threshold = sa::kDefaultThreshold;
  int h = sa::kDefaultConstraintHeight;
  std::uint64_t seed = 7;
  std::uint64_t stc_seed = 0;
  bool crc = false;
  bool lossless = false;
};

int cmd_embed(const EmbedOpts& o) {
  const sa::CoeffImage cover = load_jpeg(o.cover);
  sa::Bits message;
  if (!o.message_file.empty()) {
    message = read_bits(o.message_file);
    if (message.empty()) throw sa::InvalidPayload("message file is empty");
  } else {
    message = sa::random_bits(sa::message_length_for_payload(cover, o.payload), o.seed);
  }
  sa::EmbedConfig cfg;
  cfg.alpha = o.alpha;
  cfg.threshold = o.threshold;
  cfg.h = o.h;
  cfg.channel.quality = o.q_channel;
  cfg.simulate_channel = !o.lossless;
  cfg.stc_seed = o.stc_seed;
  cfg.crc = o.crc;

  if (!o.dump_costs.empty()) {
    sa::dump_cost_maps(o.dump_costs, cover, sa::analyze_cover(cover, cfg.alpha));
  }
  const auto res = sa::embed(cover, message, cfg);
  sa::write_file(o.out + ".jpg", sa::serialize_jpeg(res.stego));
  spit(o.out + ".recipe.json", sa::recipe_to_json(res.recipe));
  spit(o.out + ".report.json", sa::report_to_json(res.report));
  write_bits(o.out + ".message.bits", message);

  std::printf("n_m=%zu E%d t=%d R_e=%.6g attempts=%zu%s\n", message.size(), res.recipe.e_n,
              res.recipe.t, res.report.final_r_e, res.report.attempts.size(),
              res.report.exhausted ? " EXHAUSTED" : "");
  return res.report.exhausted ? kExitFailed : kExitOk;
}

struct ExtractOpts {
  std::string stego;
  std::string recipe;
  std::string out = "extracted.bits";
  std::string truth;
  bool automatic = false;
  std::size_t n_m = 0;
  int h = sa::kDefaultConstraintHeight;
  std::uint64_t stc_seed = 0;
  std::optional<int> q_cover;
};

int cmd_extract(const ExtractOpts& o) {
  const sa::CoeffImage stego = load_jpeg(o.stego);
  sa::Bits message;
  bool ok = false;
  if (!o.recipe.empty()) {
    const auto recipe = sa::recipe_from_json(slurp(o.recipe));
    auto r = sa::extract(stego, recipe);
    message = std::move(r.message);
    ok = r.ok;
    if (!ok) std::fprintf(stderr, "extract: decoding reported errors (best-effort bits written)\n");
  } else {
    if (o.n_m == 0) throw sa::InvalidArgument("--auto needs --n-m");
    const sa::QuantTable table = o.q_cover ? sa::ijg_quant_table(*o.q_cover) : stego.table();
    auto r = sa::auto_extract(stego, o.n_m, o.h, o.stc_seed, table);
    if (!r) {
      std::fprintf(stderr, "extract: NotFound: no schedule setting yields a valid CRC\n");
      return kExitFailed;
    }
    std::printf("found E%d t=%d\n", r->e_n, r->t);
    message = std::move(r->message);
    ok = true;
  }
  write_bits(o.out, message);
  if (!o.truth.empty()) {
    std::printf("R_error=%.10g\n", sa::bit_error_rate(read_bits(o.truth), message));
  }
  return ok ? kExitOk : kExitFailed;
}

struct SimulateOpts {
  std::string in;
  std::string out = "received.jpg";
  std::optional<int> q_channel;
  int iterations = 1;
};

int cmd_simulate(const SimulateOpts& o) {
  const sa::CoeffImage img = load_jpeg(o.in);
  const sa::ChannelModel channel{o.q_channel};
  const int q = channel.effective_quality(img);
  sa::CoeffImage cur = img;
  for (int i = 0; i < o.iterations; ++i) {
    sa::CoeffImage next = sa::recompress(cur, q);
    std::printf("pass %d: q=%d changed_coefficients=%zu\n", i + 1, q,
                sa::coefficient_diff(cur, next).count);
    cur = std::move(next);
  }
  sa::write_file(o.out, sa::serialize_jpeg(cur));
  return kExitOk;
}

struct BatchOpts {
  std::string config;
  std::string images;
  std::string out;
  std::optional<int> q_cover;
  std::optional<int> q_channel;
  std::vector<double> payloads;
  std::vector<double> thresholds;
  std::optional<double> alpha;
  std::optional<int> h;
  std::optional<std::uint64_t> seed;
  std::optional<int> corpus_size;
  std::optional<int> corpus_dim;
  std::optional<int> workers;
  bool no_timing = false;
  bool quiet = false;
  std::string mode = "domain";
  int fixed_t = 8;
};

sa::ExperimentSpec build_spec(const BatchOpts& o) {
  sa::ExperimentSpec s = o.config.empty() ? sa::ExperimentSpec{} : sa::spec_from_json(slurp(o.config));
  if (!o.images.empty()) s.images_dir = o.images;
  if (o.q_cover) s.q_cover = *o.q_cover;
  if (o.q_channel) s.q_channel = *o.q_channel;
  if (!o.payloads.empty()) s.payloads = o.payloads;
  if (!o.thresholds.empty()) s.thresholds = o.thresholds;
  if (o.alpha) s.alpha = *o.alpha;
  if (o.h) s.h = *o.h;
  if (o.seed) s.message_seed = *o.seed;
  if (o.corpus_size) s.corpus_size = *o.corpus_size;
  if (o.corpus_dim) s.corpus_dim = *o.corpus_dim;
  if (o.workers) s.workers = *o.workers;
  if (o.no_timing) s.timing = false;
  for (double p : s.payloads) {
    if (!(p > 0)) throw sa::InvalidPayload("payloads must be positive");
  }
  return s;
}

void emit_csv(const std::string& out, const std::string& csv) {
  if (out.empty() || out == "-") {
    std::cout << csv;
  } else {
    spit(out, csv);
  }
}

sa::ProgressFn progress_for(const BatchOpts& o) {
  if (o.quiet) return {};
  return [](const std::string& line) { std::fprintf(stderr, "%s\n", line.c_str()); };
}

int cmd_bench(const BatchOpts& o) {
  const auto r = sa::run_bench(build_spec(o), progress_for(o));
  emit_csv(o.out, sa::bench_csv(r));
  return kExitOk;
}

int cmd_ablate(const BatchOpts& o) {
  sa::AblationMode mode;
  if (o.mode == "domain") {
    mode = sa::AblationMode::kDomain;
  } else if (o.mode == "capability") {
    mode = sa::AblationMode::kCapability;
  } else {
    throw sa::InvalidArgument("--mode must be domain or capability");
  }
  const auto r = sa::run_ablation(build_spec(o), mode, o.fixed_t, progress_for(o));
  emit_csv(o.out, sa::ablation_csv(r));
  return kExitOk;
}

void add_batch_flags(CLI::App* cmd, BatchOpts& o) {
  cmd->add_option("--config", o.config, "JSON experiment spec");
  cmd->add_option("--images", o.images, "Directory of .jpg/.jpeg/.pgm covers (default: synthetic corpus)");
  cmd->add_option("--out", o.out, "CSV output path (default: stdout)");
  cmd->add_option("--q-cover", o.q_cover, "Quality for synthetic / PGM covers")->check(CLI::Range(1, 100));
  cmd->add_option("--q-channel", o.q_channel, "Channel quality (default: each cover's own)")
      ->check(CLI::Range(1, 100));
  cmd->add_option("--payloads", o.payloads, "Payload grid in bpnzac")->delimiter(',');
  cmd->add_option("--thresholds", o.thresholds, "Robustness thresholds T_r")->delimiter(',');
  cmd->add_option("--alpha", o.alpha, "Asymmetry factor")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--h", o.h, "STC constraint height")->check(CLI::Range(2, 14));
  cmd->add_option("--seed", o.seed, "Message seed");
  cmd->add_option("--corpus-size", o.corpus_size, "Synthetic corpus size");
  cmd->add_option("--corpus-dim", o.corpus_dim, "Synthetic image side length");
  cmd->add_option("--workers", o.workers, "Worker threads (default: STEGARMOR_WORKERS or all cores)");
  cmd->add_flag("--no-timing", o.no_timing, "Write wall_ms as 0 for byte-identical output");
  cmd->add_flag("--quiet", o.quiet, "No progress on stderr");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust JPEG steganography: embed, extract, simulate, bench, ablate"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  EmbedOpts eo;
  auto* embed = app.add_subcommand("embed", "Embed a message into a cover JPEG");
  embed->add_option("--cover", eo.cover, "Cover JPEG")->required()->check(CLI::ExistingFile);
  auto* payload_opt = embed->add_option("--payload", eo.payload, "Relative payload in bpnzac");
  auto* message_opt = embed->add_option("--message", eo.message_file, "Message file of ASCII 0/1")
                          ->check(CLI::ExistingFile);
  payload_opt->excludes(message_opt);
  embed->add_option("--out", eo.out, "Output stem (writes STEM.jpg, STEM.recipe.json, ...)");
  embed->add_option("--q-channel", eo.q_channel, "Channel quality (default: cover quality)")
      ->check(CLI::Range(1, 100));
  embed->add_option("--alpha", eo.alpha, "Asymmetry factor")->capture_default_str();
  embed->add_option("--threshold", eo.threshold, "Robustness threshold T_r")->capture_default_str();
  embed->add_option("--h", eo.h, "STC constraint height")->capture_default_str();
  embed->add_option("--seed", eo.seed, "Message seed for --payload")->capture_default_str();
  embed->add_option("--stc-seed", eo.stc_seed, "STC matrix seed")->capture_default_str();
  embed->add_flag("--crc", eo.crc, "Prefix a CRC-32 so extract --auto can locate the setting");
  embed->add_flag("--lossless", eo.lossless, "Verify extraction without a channel");
  embed->add_option("--dump-costs", eo.dump_costs, "Write cost maps to PREFIX.json / PREFIX.*.f64");

  ExtractOpts xo;
  auto* extract = app.add_subcommand("extract", "Recover a message from a stego JPEG");
  extract->add_option("--stego", xo.stego, "Stego (or received) JPEG")->required()->check(CLI::ExistingFile);
  auto* recipe_opt = extract->add_option("--recipe", xo.recipe, "Recipe sidecar")->check(CLI::ExistingFile);
  auto* auto_opt = extract->add_flag("--auto", xo.automatic, "Search the schedule (needs --crc at embed)");
  recipe_opt->excludes(auto_opt);
  extract->add_option("--out", xo.out, "Output message file")->capture_default_str();
  extract->add_option("--truth", xo.truth, "Reference message; prints R_error")->check(CLI::ExistingFile);
  extract->add_option("--n-m", xo.n_m, "Message length for --auto");
  extract->add_option("--h", xo.h, "STC constraint height for --auto")->capture_default_str();
  extract->add_option("--stc-seed", xo.stc_seed, "STC seed for --auto")->capture_default_str();
  extract->add_option("--q-cover", xo.q_cover, "Cover quality for --auto (default: stego's table)")
      ->check(CLI::Range(1, 100));

  SimulateOpts so;
  auto* simulate = app.add_subcommand("simulate", "Recompress a JPEG through the channel");
  simulate->add_option("--stego,--in", so.in, "Input JPEG")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", so.out, "Output JPEG")->capture_default_str();
  simulate->add_option("--q-channel", so.q_channel, "Channel quality (default: input quality)")
      ->check(CLI::Range(1, 100));
  simulate->add_option("--iterations", so.iterations, "Repeated recompressions")
      ->check(CLI::PositiveNumber);

  BatchOpts bo;
  auto* bench = app.add_subcommand("bench", "Robustness sweep over a corpus (CSV)");
  add_batch_flags(bench, bo);
  auto* ablate = app.add_subcommand("ablate", "Domain or capability ablation (CSV)");
  add_batch_flags(ablate, bo);
  ablate->add_option("--mode", bo.mode, "domain | capability")->capture_default_str();
  ablate->add_option("--fixed-t", bo.fixed_t, "t used by the domain ablation")
      ->check(CLI::Range(1, 12))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*embed) {
      if (payload_opt->count() == 0 && message_opt->count() == 0) {
        std::fprintf(stderr, "embed: one of --payload or --message is required\n");
        return kExitUsage;
      }
      return cmd_embed(eo);
    }
    if (*extract) {
      if (xo.recipe.empty() && !xo.automatic) {
        std::fprintf(stderr, "extract: --recipe is required unless --auto is given\n");
        return kExitUsage;
      }
      return cmd_extract(xo);
    }
    if (*simulate) return cmd_simulate(so);
    if (*bench) return cmd_bench(bo);
    if (*ablate) return cmd_ablate(bo);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
