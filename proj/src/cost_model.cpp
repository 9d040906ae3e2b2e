#include "stegarmor/cost_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"

#include "stegarmor/errors.hpp"

namespace stegarmor {

namespace juniward {

const std::array<double, kTaps> kHighPass = {
    -0.0544158422, 0.3128715909,  -0.6756307363, 0.5853546837,
    0.0158291053,  -0.2840155430, -0.0004724846, 0.1287474266,
    0.0173693010,  -0.0440882539, -0.0139810279, 0.0087460940,
    0.0048703530,  -0.0003917404, -0.0006754494, -0.0001174768};

std::array<double, kTaps> low_pass() {
  std::array<double, kTaps> lp{};
  for (int n = 0; n < kTaps; ++n) {
    lp[n] = (n % 2 ? -1.0 : 1.0) * kHighPass[kTaps - 1 - n];
  }
  return lp;
}

namespace {

// Taps are applied to samples i-7 .. i+8.
constexpr int kTapOffset = 7;

int reflect(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

struct FilterPair {
  std::array<double, kTaps> rows;  // applied along y
  std::array<double, kTaps> cols;  // applied along x
};

FilterPair filter_pair(int k) {
  const auto lp = low_pass();
  switch (k) {
    case 0: return {lp, kHighPass};
    case 1: return {kHighPass, lp};
    case 2: return {kHighPass, kHighPass};
    default: throw InvalidArgument("residual index must be 0..2");
  }
}

}  // namespace

std::vector<double> residual(const std::vector<double>& raster, int width,
                             int height, int k) {
  const FilterPair f = filter_pair(k);
  std::vector<double> horiz(raster.size());
  for (int y = 0; y < height; ++y) {
    const double* row = raster.data() + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      double s = 0;
      for (int b = 0; b < kTaps; ++b) s += f.cols[b] * row[reflect(x + b - kTapOffset, width)];
      horiz[static_cast<std::size_t>(y) * width + x] = s;
    }
  }
  std::vector<double> out(raster.size());
  for (int y = 0; y < height; ++y) {
    double* dst = out.data() + static_cast<std::size_t>(y) * width;
    for (int a = 0; a < kTaps; ++a) {
      const double w = f.rows[a];
      const double* src =
          horiz.data() + static_cast<std::size_t>(reflect(y + a - kTapOffset, height)) * width;
      for (int x = 0; x < width; ++x) dst[x] += w * src[x];
    }
  }
  return out;
}

namespace {

// A unit change of DCT frequency `freq` in the block starting at `origin`
// perturbs samples origin..origin+7 by basis(freq, i). Its filtered response
// is nonzero only for outputs origin-8 .. origin+15; symmetric extension can
// fold the perturbation back in for border blocks, which this accounts for.
inline constexpr int kWindow = 24;

using Impact = std::array<double, kWindow>;  // |response| at origin-8+i

Impact axis_impact(const std::array<double, kTaps>& taps, int freq, int origin,
                   int extent) {
  Impact imp{};
  for (int i = 0; i < kWindow; ++i) {
    const int out = origin - 8 + i;
    if (out < 0 || out >= extent) continue;
    double s = 0;
    for (int a = 0; a < kTaps; ++a) {
      const int src = reflect(out + a - kTapOffset, extent) - origin;
      if (src >= 0 && src < kBlockSize) s += taps[a] * dct::basis(freq, src);
    }
    imp[i] = std::abs(s);
  }
  return imp;
}

}  // namespace

}  // namespace juniward

std::vector<double> juniward_costs(const CoeffImage& cover) {
  using namespace juniward;
  const int width = cover.blocks_wide() * kBlockSize;
  const int height = cover.blocks_high() * kBlockSize;
  const auto raster = decompress_unrounded(cover);

  // 1 / (sigma + |residual|) for each direction.
  std::array<std::vector<double>, 3> inv;
  for (int k = 0; k < 3; ++k) {
    inv[k] = residual(raster, width, height, k);
    for (double& v : inv[k]) v = 1.0 / (kSigma + std::abs(v));
  }

  const auto lp = low_pass();
  auto taps_of = [&](bool high) -> const std::array<double, kTaps>& {
    return high ? kHighPass : lp;
  };
  // impacts[high][block index along axis][freq]
  auto axis_table = [&](int blocks, int extent) {
    std::array<std::vector<std::array<Impact, kBlockSize>>, 2> t;
    for (int high = 0; high < 2; ++high) {
      t[high].resize(static_cast<std::size_t>(blocks));
      for (int bi = 0; bi < blocks; ++bi) {
        for (int f = 0; f < kBlockSize; ++f) {
          t[high][bi][f] = axis_impact(taps_of(high), f, bi * kBlockSize, extent);
        }
      }
    }
    return t;
  };
  const auto row_imp = axis_table(cover.blocks_high(), height);
  const auto col_imp = axis_table(cover.blocks_wide(), width);
  // (row filter is high-pass, col filter is high-pass) per direction
  constexpr bool kRowHigh[3] = {false, true, true};
  constexpr bool kColHigh[3] = {true, false, true};

  std::vector<double> rho(cover.coeffs().size(), 0.0);
  for (int by = 0; by < cover.blocks_high(); ++by) {
    for (int bx = 0; bx < cover.blocks_wide(); ++bx) {
      const int b = by * cover.blocks_wide() + bx;
      const int y0 = by * kBlockSize - 8;
      const int x0 = bx * kBlockSize - 8;
      std::array<double, kBlockArea> acc{};
      for (int k = 0; k < 3; ++k) {
        const auto& rimp = row_imp[kRowHigh[k]][by];
        const auto& cimp = col_imp[kColHigh[k]][bx];
        // t[y][v] = sum_x |col impact_v(x)| * inv(y, x)
        double t[kWindow][kBlockSize] = {};
        for (int i = 0; i < kWindow; ++i) {
          const int y = y0 + i;
          if (y < 0 || y >= height) continue;
          const double* inv_row = inv[k].data() + static_cast<std::size_t>(y) * width;
          for (int v = 0; v < kBlockSize; ++v) {
            double s = 0;
            for (int j = 0; j < kWindow; ++j) {
              const int x = x0 + j;
              if (x < 0 || x >= width) continue;
              s += cimp[v][j] * inv_row[x];
            }
            t[i][v] = s;
          }
        }
        for (int u = 0; u < kBlockSize; ++u) {
          for (int v = 0; v < kBlockSize; ++v) {
            double s = 0;
            for (int i = 0; i < kWindow; ++i) s += rimp[u][i] * t[i][v];
            acc[u * 8 + v] += s;
          }
        }
      }
      for (int i = 0; i < kBlockArea; ++i) {
        rho[static_cast<std::size_t>(b) * kBlockArea + i] = acc[i] * cover.table()[i];
      }
    }
  }
  return rho;
}

CostMaps asymmetric_costs(const std::vector<double>& rho,
                          const CoeffImage& cover,
                          const std::vector<double>& dequant_real,
                          double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw InvalidAlpha("alpha must lie in [0,1]");
  }
  if (rho.size() != cover.coeffs().size() || dequant_real.size() != rho.size()) {
    throw LengthMismatch("cost map size does not match cover");
  }
  CostMaps m;
  m.alpha = alpha;
  m.rho = rho;
  m.rho_plus = rho;
  m.rho_minus = rho;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double real = dequant_real[i] / cover.table()[i % kBlockArea];
    const double x = cover.coeffs()[i];
    if (x < real) {
      m.rho_plus[i] = alpha * rho[i];
    } else if (x > real) {
      m.rho_minus[i] = alpha * rho[i];
    }
  }
  return m;
}

DitherInfo modification_distances(const CoeffImage& cover) {
  DitherInfo d;
  d.dequant_real = dequantized_real(cover);
  const std::size_t n = d.dequant_real.size();
  d.interval.resize(n);
  d.cover_bit.resize(n);
  d.d_plus.resize(n);
  d.d_minus.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double q = cover.table()[i % kBlockArea];
    const double real = d.dequant_real[i];
    const auto k = static_cast<std::int32_t>(round_half_away(real / q));
    d.interval[i] = k;
    d.cover_bit[i] = static_cast<std::uint8_t>(k & 1);
    d.d_plus[i] = (k + 1) * q - real;
    d.d_minus[i] = real - (k - 1) * q;
  }
  return d;
}

ModifyingCosts modifying_costs(const std::vector<double>& rho_plus,
                               const std::vector<double>& rho_minus,
                               const std::vector<double>& d_plus,
                               const std::vector<double>& d_minus,
                               const QuantTable& table) {
  const std::size_t n = rho_plus.size();
  if (rho_minus.size() != n || d_plus.size() != n || d_minus.size() != n) {
    throw LengthMismatch("modifying_costs inputs are not aligned");
  }
  ModifyingCosts out;
  out.xi_plus.resize(n);
  out.xi_minus.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double q = table[i % kBlockArea];
    out.xi_plus[i] = rho_plus[i] / q * d_plus[i];
    out.xi_minus[i] = rho_minus[i] / q * d_minus[i];
  }
  return out;
}

CoverAnalysis analyze_cover(const CoeffImage& cover, double alpha) {
  CoverAnalysis a;
  a.dither = modification_distances(cover);
  a.costs = asymmetric_costs(juniward_costs(cover), cover, a.dither.dequant_real, alpha);
  auto xi = modifying_costs(a.costs.rho_plus, a.costs.rho_minus, a.dither.d_plus,
                            a.dither.d_minus, cover.table());
  a.dither.xi_plus = std::move(xi.xi_plus);
  a.dither.xi_minus = std::move(xi.xi_minus);
  return a;
}

namespace {

void write_f64(const std::string& path, const std::vector<double>& v) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  for (double x : v) {
    auto bits = std::bit_cast<std::uint64_t>(x);
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
  }
}

}  // namespace

void dump_cost_maps(const std::string& prefix, const CoeffImage& cover,
                    const CoverAnalysis& a) {
  const std::vector<std::pair<std::string, const std::vector<double>*>> maps = {
      {"rho", &a.costs.rho},           {"rho_plus", &a.costs.rho_plus},
      {"rho_minus", &a.costs.rho_minus}, {"d_plus", &a.dither.d_plus},
      {"d_minus", &a.dither.d_minus},   {"xi_plus", &a.dither.xi_plus},
      {"xi_minus", &a.dither.xi_minus}, {"dequant_real", &a.dither.dequant_real}};
  nlohmann::json header;
  header["width"] = cover.width();
  header["height"] = cover.height();
  header["blocks_wide"] = cover.blocks_wide();
  header["blocks_high"] = cover.blocks_high();
  header["alpha"] = a.costs.alpha;
  header["layout"] = "block-major, row-major within 8x8 block, float64 little-endian";
  for (const auto& [name, data] : maps) {
    write_f64(prefix + "." + name + ".f64", *data);
    header["maps"].push_back(name);
  }
  std::ofstream out(prefix + ".json");
  if (!out) throw Error("cannot write " + prefix + ".json");
  out << header.dump(2) << '\n';
}

}  // namespace stegarmor
