#pragma once

// Reference implementations used by the test suites. Everything here is
// written from first principles and shares no code path with the library
// beyond public types.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "stegarmor/harness.hpp"
#include "stegarmor/jpeg_codec.hpp"
#include "stegarmor/stc_codec.hpp"

namespace oracle {

using stegarmor::CoeffImage;
using stegarmor::QuantTable;

// JPEG Annex K, table K.1, row-major.
inline constexpr std::array<int, 64> kAnnexK = {
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99};

// IJG jcparam.c quality scaling.
inline std::array<int, 64> ijg_table(int quality) {
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  std::array<int, 64> out{};
  for (int i = 0; i < 64; ++i) {
    long v = (static_cast<long>(kAnnexK[i]) * scale + 50) / 100;
    out[i] = static_cast<int>(std::clamp(v, 1L, 255L));
  }
  return out;
}

// Daubechies-8 decomposition high-pass filter (16 taps).
inline constexpr std::array<double, 16> kDb8High = {
    -0.0544158422, 0.3128715909,  -0.6756307363, 0.5853546837,
    0.0158291053,  -0.2840155430, -0.0004724846, 0.1287474266,
    0.0173693010,  -0.0440882539, -0.0139810279, 0.0087460940,
    0.0048703530,  -0.0003917404, -0.0006754494, -0.0001174768};

inline std::array<double, 16> db8_low() {
  std::array<double, 16> lp{};
  for (int n = 0; n < 16; ++n) lp[n] = ((n & 1) ? -1.0 : 1.0) * kDb8High[15 - n];
  return lp;
}

inline double dct_c(int u, int i) {
  const double a = u == 0 ? std::sqrt(1.0 / 8) : std::sqrt(2.0 / 8);
  return a * std::cos((2 * i + 1) * u * std::numbers::pi / 16);
}

// Dequantized inverse DCT over the full block grid, level shift included.
inline std::vector<double> idct_raster(const CoeffImage& img) {
  const int w = img.blocks_wide() * 8;
  const int h = img.blocks_high() * 8;
  std::vector<double> px(static_cast<std::size_t>(w) * h, 0.0);
  for (int by = 0; by < img.blocks_high(); ++by) {
    for (int bx = 0; bx < img.blocks_wide(); ++bx) {
      const int b = by * img.blocks_wide() + bx;
      for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
          double s = 128.0;
          for (int u = 0; u < 8; ++u) {
            for (int v = 0; v < 8; ++v) {
              s += img.at(b, u * 8 + v) * img.table()[u * 8 + v] * dct_c(u, y) * dct_c(v, x);
            }
          }
          px[static_cast<std::size_t>(by * 8 + y) * w + bx * 8 + x] = s;
        }
      }
    }
  }
  return px;
}

// Half-sample symmetric extension, any distance from the border.
inline int mirror(int i, int n) {
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

// Direct (non-separable) 2-D correlation with filter pair k.
inline std::vector<double> wavelet_residual(const std::vector<double>& px, int w, int h, int k) {
  const auto lp = db8_low();
  const auto& hp = kDb8High;
  const auto& rows = k == 0 ? lp : hp;
  const auto& cols = k == 1 ? lp : hp;
  std::vector<double> out(px.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0;
      for (int a = 0; a < 16; ++a) {
        for (int b = 0; b < 16; ++b) {
          s += rows[a] * cols[b] * px[static_cast<std::size_t>(mirror(y + a - 7, h)) * w + mirror(x + b - 7, w)];
        }
      }
      out[static_cast<std::size_t>(y) * w + x] = s;
    }
  }
  return out;
}

// Brute-force J-UNIWARD: re-decompress and re-filter the whole image for
// every single-coefficient change.
inline std::vector<double> juniward_brute(const CoeffImage& cover) {
  constexpr double sigma = 1.0 / 64;
  const int w = cover.blocks_wide() * 8;
  const int h = cover.blocks_high() * 8;
  const auto base_px = idct_raster(cover);
  std::array<std::vector<double>, 3> base;
  for (int k = 0; k < 3; ++k) base[k] = wavelet_residual(base_px, w, h, k);

  std::vector<double> rho(cover.coeffs().size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    CoeffImage changed = cover;
    changed.coeffs()[i] += 1;
    const auto px = idct_raster(changed);
    double total = 0;
    for (int k = 0; k < 3; ++k) {
      const auto r = wavelet_residual(px, w, h, k);
      for (std::size_t p = 0; p < r.size(); ++p) {
        total += std::abs(r[p] - base[k][p]) / (sigma + std::abs(base[k][p]));
      }
    }
    rho[i] = total;
  }
  return rho;
}

// Encoded RS length from the framing rule, pure arithmetic.
inline std::size_t rs_length(std::size_t message_bits, int t) {
  const std::size_t symbols = (message_bits + 4) / 5;
  const std::size_t k = 31 - 2 * static_cast<std::size_t>(t);
  const std::size_t full = symbols / k;
  const std::size_t rem = symbols % k;
  return 5 * (full * 31 + (rem ? rem + 2 * static_cast<std::size_t>(t) : 0));
}

// Dense columns of H as bit masks over the m message rows (m <= 32).
inline std::vector<std::uint32_t> dense_columns(const stegarmor::StcCode& code) {
  std::vector<std::uint32_t> cols(code.cover_len(), 0);
  for (std::size_t j = 0; j < code.cover_len(); ++j) {
    for (int r = 0; r < code.height(); ++r) {
      const std::size_t row = code.first_row(j) + static_cast<std::size_t>(r);
      if (row < code.message_len() && (code.pattern(j) >> r & 1U)) cols[j] |= 1U << row;
    }
  }
  return cols;
}

inline std::uint32_t pack_mask(const stegarmor::Bits& bits) {
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) v |= static_cast<std::uint32_t>(bits[i] & 1) << i;
  return v;
}

// Minimum total flip cost over every y with H y = m, by Gray-code walk over
// all 2^n flip patterns. Returns +inf when no y satisfies the syndrome.
inline double stc_exhaustive(const stegarmor::StcCode& code, const stegarmor::Bits& cover,
                             const std::vector<double>& costs, const stegarmor::Bits& message) {
  const std::size_t n = code.cover_len();
  const auto cols = dense_columns(code);
  std::uint32_t syn = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (cover[j] & 1) syn ^= cols[j];
  }
  const std::uint32_t target = pack_mask(message);
  double best = std::numeric_limits<double>::infinity();
  double cost = 0;
  std::vector<std::uint8_t> flipped(n, 0);
  if (syn == target) best = 0;
  const std::uint64_t total = 1ULL << n;
  for (std::uint64_t g = 1; g < total; ++g) {
    const int j = std::countr_zero(g);
    flipped[j] ^= 1;
    cost += flipped[j] ? costs[j] : -costs[j];
    syn ^= cols[j];
    if (syn == target) best = std::min(best, cost);
  }
  return best;
}

// Random coefficients inside the baseline Huffman range.
inline CoeffImage random_coeff_image(std::mt19937_64& rng, int w, int h, const QuantTable& table) {
  CoeffImage img(w, h, table);
  std::geometric_distribution<int> mag(0.35);
  for (int b = 0; b < img.block_count(); ++b) {
    img.at(b, 0) = static_cast<std::int32_t>(rng() % 2001) - 1000;
    for (int p = 1; p < 64; ++p) {
      if (rng() % 3 == 0) continue;
      int v = std::min(mag(rng), 1023);
      if (rng() & 1) v = -v;
      img.at(b, p) = v;
    }
    if (rng() % 16 == 0) img.at(b, 1 + static_cast<int>(rng() % 63)) = (rng() & 1) ? 1023 : -1023;
  }
  return img;
}

// Synthetic cover compressed with the in-repo codec.
inline CoeffImage cover(std::uint64_t seed, int dim = 128, int quality = 75) {
  return stegarmor::compress(stegarmor::synthetic_image(seed, dim, dim), quality);
}

}  // namespace oracle
