#include "stegarmor/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "stegarmor/channel_sim.hpp"
#include "stegarmor/errors.hpp"
#include "stegarmor/robust_embedder.hpp"

namespace stegarmor {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Spec

ExperimentSpec spec_from_json(const std::string& text) {
  ExperimentSpec s;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("experiment spec is not valid JSON: ") + e.what());
  }
  try {
    s.images_dir = j.value("images_dir", s.images_dir);
    s.corpus_size = j.value("corpus_size", s.corpus_size);
    s.corpus_dim = j.value("corpus_dim", s.corpus_dim);
    s.corpus_seed = j.value("corpus_seed", s.corpus_seed);
    s.q_cover = j.value("q_cover", s.q_cover);
    if (j.contains("q_channel") && !j["q_channel"].is_null()) {
      s.q_channel = j["q_channel"].get<int>();
    }
    s.payloads = j.value("payloads", s.payloads);
    s.thresholds = j.value("thresholds", s.thresholds);
    s.alpha = j.value("alpha", s.alpha);
    s.h = j.value("h", s.h);
    s.message_seed = j.value("message_seed", s.message_seed);
    s.stc_seed = j.value("stc_seed", s.stc_seed);
    s.repetitions = j.value("repetitions", s.repetitions);
    s.timing = j.value("timing", s.timing);
    s.workers = j.value("workers", s.workers);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed experiment spec: ") + e.what());
  }
  for (double p : s.payloads) {
    if (!(p > 0)) throw InvalidPayload("payloads must be positive");
  }
  if (s.payloads.empty()) throw InvalidPayload("payload grid is empty");
  if (s.thresholds.empty()) throw InvalidArgument("threshold list is empty");
  if (s.repetitions < 1) throw InvalidArgument("repetitions must be >= 1");
  return s;
}

// ---------------------------------------------------------------------------
// Randomness

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over a combined state
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Bits random_bits(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Bits out(n);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 64 == 0) word = rng();
    out[i] = static_cast<std::uint8_t>(word >> (i % 64) & 1U);
  }
  return out;
}

namespace {

// Uniform [0,1) from raw engine output, identical on every platform.
double unit(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

}  // namespace

SpatialImage synthetic_image(std::uint64_t seed, int width, int height) {
  std::mt19937_64 rng(seed);
  const double base = 70 + 110 * unit(rng);
  const double gx = (unit(rng) - 0.5) * 80.0 / width;
  const double gy = (unit(rng) - 0.5) * 80.0 / height;

  struct Wave {
    double fx, fy, phase, amp;
  };
  std::vector<Wave> waves(3);
  for (auto& w : waves) {
    const double f = 0.01 + 0.2 * unit(rng) * unit(rng);
    const double theta = std::numbers::pi * unit(rng);
    w = {f * std::cos(theta), f * std::sin(theta), 2 * std::numbers::pi * unit(rng),
         3 + 20 * unit(rng)};
  }

  // Bilinear value noise at a random cell size, modulated by a smooth blob so
  // that each image mixes flat and textured regions.
  const int cells[] = {2, 4, 8, 16, 32};
  const int cell = cells[rng() % 5];
  const double noise_amp = 40 * unit(rng);
  const int gw = width / cell + 2;
  const int gh = height / cell + 2;
  std::vector<double> grid(static_cast<std::size_t>(gw) * gh);
  for (double& g : grid) g = unit(rng) * 2 - 1;
  const double cx = width * unit(rng);
  const double cy = height * unit(rng);
  const double radius = (0.2 + 0.5 * unit(rng)) * std::max(width, height);
  const double grain = 6 * unit(rng);
  // Some images are pushed into saturation, as bright skies and deep shadows are.
  const double contrast = 0.7 + 1.6 * unit(rng);

  SpatialImage img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double v = base + gx * (x - width / 2.0) + gy * (y - height / 2.0);
      for (const auto& w : waves) v += w.amp * std::sin(2 * std::numbers::pi * (w.fx * x + w.fy * y) + w.phase);
      const double fx = double(x) / cell;
      const double fy = double(y) / cell;
      const int ix = static_cast<int>(fx);
      const int iy = static_cast<int>(fy);
      const double tx = fx - ix;
      const double ty = fy - iy;
      auto g = [&](int a, int b) { return grid[static_cast<std::size_t>(b) * gw + a]; };
      const double n = (g(ix, iy) * (1 - tx) + g(ix + 1, iy) * tx) * (1 - ty) +
                       (g(ix, iy + 1) * (1 - tx) + g(ix + 1, iy + 1) * tx) * ty;
      const double d = std::hypot(x - cx, y - cy) / radius;
      const double mask = 1.0 / (1.0 + std::exp(8 * (d - 1)));
      v += noise_amp * mask * n;
      v += grain * (unit(rng) + unit(rng) - 1);
      v = base + contrast * (v - base);
      img.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
    }
  }
  return img;
}

// ---------------------------------------------------------------------------
// PGM

SpatialImage read_pgm(const std::string& path) {
  const auto bytes = read_file(path);
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&] {
    skip_ws();
    int v = 0;
    bool any = false;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      any = true;
    }
    if (!any) throw MalformedStream("bad PGM header in " + path);
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw UnsupportedFeature("only binary PGM (P5) is supported: " + path);
  }
  pos = 2;
  const int w = number();
  const int h = number();
  const int maxval = number();
  if (maxval != 255) throw UnsupportedFeature("PGM maxval must be 255");
  ++pos;  // single whitespace after maxval
  const std::size_t need = static_cast<std::size_t>(w) * h;
  if (w <= 0 || h <= 0 || bytes.size() < pos + need) throw MalformedStream("truncated PGM " + path);
  SpatialImage img(w, h);
  std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(pos), need, img.pixels.begin());
  return img;
}

void write_pgm(const std::string& path, const SpatialImage& img) {
  std::string header = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  write_file(path, out);
}

std::vector<NamedCover> load_covers(const ExperimentSpec& spec) {
  std::vector<NamedCover> covers;
  if (spec.images_dir.empty()) {
    for (int i = 0; i < spec.corpus_size; ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "synthetic_%03d", i);
      const auto px = synthetic_image(mix_seed(spec.corpus_seed, std::uint64_t(i)), spec.corpus_dim,
                                      spec.corpus_dim);
      covers.push_back({name, compress(px, spec.q_cover)});
    }
    return covers;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(spec.images_dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".jpg" || ext == ".jpeg" || ext == ".pgm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    auto ext = f.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".pgm") {
      covers.push_back({f.filename().string(), compress(read_pgm(f.string()), spec.q_cover)});
    } else {
      covers.push_back({f.filename().string(), parse_jpeg(read_file(f.string()))});
    }
  }
  if (covers.empty()) throw InvalidArgument("no .jpg/.jpeg/.pgm images in " + spec.images_dir);
  return covers;
}

// ---------------------------------------------------------------------------
// Execution

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("STEGARMOR_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

namespace {

// Runs job(i) for i in [0, count) on a bounded pool.
template <typename Job>
void parallel_for(std::size_t count, int workers, Job job) {
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  std::vector<std::thread> pool;
  for (int w = 1; w < n; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <typename... Fields>
std::string csv_line(const Fields&... fields) {
  std::string line;
  bool first = true;
  auto add = [&](const std::string& f) {
    if (!first) line += ',';
    line += csv_field(f);
    first = false;
  };
  (add(fields), ...);
  return line + "\n";
}

std::uint64_t message_seed_for(const ExperimentSpec& spec, std::size_t image, int rep) {
  return mix_seed(mix_seed(spec.message_seed, image), static_cast<std::uint64_t>(rep));
}

EmbedConfig config_for(const ExperimentSpec& spec, double threshold) {
  EmbedConfig cfg;
  cfg.alpha = spec.alpha;
  cfg.threshold = threshold;
  cfg.h = spec.h;
  cfg.channel.quality = spec.q_channel;
  cfg.stc_seed = spec.stc_seed;
  return cfg;
}

// Independent check of a stego: simulate the channel and extract.
double evaluate_through_channel(const CoeffImage& stego, const StegoRecipe& recipe,
                                const Bits& message, int channel_q) {
  const auto received = recompress(stego, channel_q);
  return bit_error_rate(message, extract(received, recipe).message);
}

}  // namespace

BenchResult run_bench(const ExperimentSpec& spec, const ProgressFn& progress) {
  const auto covers = load_covers(spec);
  std::vector<std::vector<MetricsRow>> per_image(covers.size());
  std::mutex progress_mutex;

  parallel_for(covers.size(), resolve_workers(spec.workers), [&](std::size_t idx) {
    const auto& cover = covers[idx];
    const std::size_t nzac = count_nzac(cover.image);
    for (int rep = 0; rep < spec.repetitions; ++rep) {
      for (double p : spec.payloads) {
        for (double thr : spec.thresholds) {
          MetricsRow row;
          row.image = cover.name;
          row.rep = rep;
          row.payload_nominal = p;
          row.n_nzac = nzac;
          row.q_cover = cover.image.quality().value_or(0);
          row.threshold = thr;
          const auto start = std::chrono::steady_clock::now();
          try {
            const EmbedConfig cfg = config_for(spec, thr);
            row.q_channel = cfg.channel.effective_quality(cover.image);
            row.n_m = message_length_for_payload(cover.image, p);
            row.payload = double(row.n_m) / double(nzac);
            const Bits msg = random_bits(row.n_m, message_seed_for(spec, idx, rep));
            const auto res = embed(cover.image, msg, cfg);
            row.e_n = res.recipe.e_n;
            row.t = res.recipe.t;
            row.exhausted = res.report.exhausted;
            row.attempts = static_cast<int>(res.report.attempts.size());
            row.r_error = evaluate_through_channel(res.stego, res.recipe, msg, row.q_channel);
          } catch (const std::exception& e) {
            row.status = std::string("error: ") + e.what();
          }
          row.wall_ms = spec.timing ? elapsed_ms(start) : 0.0;
          if (progress) {
            std::lock_guard lock(progress_mutex);
            progress(row.image + " p=" + fmt(p) + " T_r=" + fmt(thr) + " R_error=" + fmt(row.r_error) +
                     " E" + std::to_string(row.e_n) + " t=" + std::to_string(row.t));
          }
          per_image[idx].push_back(std::move(row));
        }
      }
    }
  });

  BenchResult result;
  for (auto& rows : per_image) {
    for (auto& r : rows) result.rows.push_back(std::move(r));
  }
  for (double p : spec.payloads) {
    for (double thr : spec.thresholds) {
      SummaryRow s;
      s.payload_nominal = p;
      s.threshold = thr;
      for (const auto& r : result.rows) {
        if (r.payload_nominal != p || r.threshold != thr || r.status != "ok") continue;
        ++s.rows;
        s.mean_payload += r.payload;
        s.mean_r_error += r.r_error;
        s.mean_e_n += r.e_n;
        s.mean_t += r.t;
        s.exhausted += r.exhausted ? 1 : 0;
      }
      if (s.rows) {
        const double n = double(s.rows);
        s.mean_payload /= n;
        s.mean_r_error /= n;
        s.mean_e_n /= n;
        s.mean_t /= n;
      }
      result.summary.push_back(s);
    }
  }
  return result;
}

std::string bench_csv(const BenchResult& r) {
  std::string out = csv_line(std::string("row_type"), std::string("image"), std::string("rep"),
                             std::string("payload_nominal"), std::string("payload"), std::string("n_m"),
                             std::string("n_nzac"), std::string("q_cover"), std::string("q_channel"),
                             std::string("threshold"), std::string("e_n"), std::string("t"),
                             std::string("r_error"), std::string("exhausted"), std::string("attempts"),
                             std::string("wall_ms"), std::string("status"));
  for (const auto& row : r.rows) {
    out += csv_line(std::string("image"), row.image, std::to_string(row.rep), fmt(row.payload_nominal),
                    fmt(row.payload), std::to_string(row.n_m), std::to_string(row.n_nzac),
                    std::to_string(row.q_cover), std::to_string(row.q_channel), fmt(row.threshold),
                    std::to_string(row.e_n), std::to_string(row.t), fmt(row.r_error),
                    std::string(row.exhausted ? "1" : "0"), std::to_string(row.attempts),
                    fmt(std::round(row.wall_ms * 1000) / 1000), row.status);
  }
  for (const auto& s : r.summary) {
    out += csv_line(std::string("mean"), std::string("*"), std::to_string(s.rows), fmt(s.payload_nominal),
                    fmt(s.mean_payload), std::string(), std::string(), std::string(), std::string(),
                    fmt(s.threshold), fmt(s.mean_e_n), fmt(s.mean_t), fmt(s.mean_r_error),
                    std::to_string(s.exhausted), std::string(), std::string(), std::string("ok"));
  }
  return out;
}

AblationResult run_ablation(const ExperimentSpec& spec, AblationMode mode, int fixed_t,
                            const ProgressFn& progress) {
  const auto covers = load_covers(spec);
  const double p = spec.payloads.at(0);
  const double thr = spec.thresholds.at(0);

  struct Setting {
    std::string name;
    int e_n;
    int t;
  };
  std::vector<Setting> settings;
  if (mode == AblationMode::kDomain) {
    for (int e = 1; e <= 6; ++e) settings.push_back({"E" + std::to_string(e), e, fixed_t});
  } else {
    for (int t = 1; t <= 12; ++t) settings.push_back({"t" + std::to_string(t), 1, t});
  }

  AblationResult result;
  result.mode = mode;
  result.payload_nominal = p;
  result.q_cover = spec.q_cover;
  std::vector<std::vector<AblationRow>> per_image(covers.size());
  std::mutex progress_mutex;
  std::atomic<int> channel_q{0};

  parallel_for(covers.size(), resolve_workers(spec.workers), [&](std::size_t idx) {
    const auto& cover = covers[idx];
    const EmbedConfig cfg = config_for(spec, thr);
    const int q = cfg.channel.effective_quality(cover.image);
    channel_q = q;
    const std::size_t n_m = message_length_for_payload(cover.image, p);
    const double actual_p = double(n_m) / double(count_nzac(cover.image));
    const Bits msg = random_bits(n_m, message_seed_for(spec, idx, 0));
    const CoverAnalysis analysis = analyze_cover(cover.image, cfg.alpha);

    auto record = [&](AblationRow row) {
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(row.image + " " + row.setting + " R_error=" + fmt(row.r_error));
      }
      per_image[idx].push_back(std::move(row));
    };

    for (const auto& s : settings) {
      AblationRow row{cover.name, s.name, s.e_n, s.t, actual_p, n_m};
      const auto start = std::chrono::steady_clock::now();
      try {
        const auto res = embed_fixed(cover.image, analysis, msg, cfg, s.e_n, s.t);
        row.r_error = evaluate_through_channel(res.stego, res.recipe, msg, q);
        row.exhausted = row.r_error > thr;
        row.changes = res.report.attempts.front().changes;
      } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
      }
      row.wall_ms = spec.timing ? elapsed_ms(start) : 0.0;
      record(std::move(row));
    }

    AblationRow row{cover.name, "adaptive", 0, 0, actual_p, n_m};
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto res = embed(cover.image, msg, cfg);
      row.e_n = res.recipe.e_n;
      row.t = res.recipe.t;
      row.r_error = evaluate_through_channel(res.stego, res.recipe, msg, q);
      row.exhausted = res.report.exhausted;
      for (const auto& a : res.report.attempts) {
        if (a.e_n == res.recipe.e_n && a.t == res.recipe.t) row.changes = a.changes;
      }
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
    row.wall_ms = spec.timing ? elapsed_ms(start) : 0.0;
    record(std::move(row));
  });
  result.q_channel = channel_q;

  for (auto& rows : per_image) {
    for (auto& r : rows) result.rows.push_back(std::move(r));
  }
  settings.push_back({"adaptive", 0, 0});
  for (const auto& s : settings) {
    AblationMean m{s.name, 0, 0.0};
    for (const auto& r : result.rows) {
      if (r.setting != s.name || r.status != "ok") continue;
      ++m.rows;
      m.mean_r_error += r.r_error;
    }
    if (m.rows) m.mean_r_error /= double(m.rows);
    result.means.push_back(m);
  }
  return result;
}

std::string ablation_csv(const AblationResult& r) {
  const std::string mode = r.mode == AblationMode::kDomain ? "domain" : "capability";
  std::string out = csv_line(std::string("row_type"), std::string("mode"), std::string("image"),
                             std::string("setting"), std::string("e_n"), std::string("t"),
                             std::string("payload"), std::string("n_m"), std::string("q_cover"),
                             std::string("q_channel"), std::string("r_error"), std::string("exhausted"),
                             std::string("changes"), std::string("wall_ms"), std::string("status"));
  for (const auto& row : r.rows) {
    out += csv_line(std::string("image"), mode, row.image, row.setting, std::to_string(row.e_n),
                    std::to_string(row.t), fmt(row.payload), std::to_string(row.n_m),
                    std::to_string(r.q_cover), std::to_string(r.q_channel), fmt(row.r_error),
                    std::string(row.exhausted ? "1" : "0"), std::to_string(row.changes),
                    fmt(std::round(row.wall_ms * 1000) / 1000), row.status);
  }
  for (const auto& m : r.means) {
    out += csv_line(std::string("mean"), mode, std::string("*"), m.setting, std::string(), std::string(),
                    fmt(r.payload_nominal), std::to_string(m.rows), std::to_string(r.q_cover),
                    std::to_string(r.q_channel), fmt(m.mean_r_error), std::string(), std::string(),
                    std::string(), std::string("ok"));
  }
  return out;
}

}  // namespace stegarmor
