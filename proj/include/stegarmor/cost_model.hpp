#pragma once

// Embedding costs for dither-modulation steganography in the JPEG domain.
//
// Pipeline for one cover:
//   rho        symmetric J-UNIWARD cost of a +-1 change of each coefficient
//   rho+/rho-  asymmetric costs, cheaper in the direction the cover's
//              real-valued DCT coefficient was rounded away from
//   d+/d-      distance (dequantized domain) from the real coefficient to the
//              centre of the next / previous quantization interval
//   xi+/xi-    modifying cost = (rho+- / q) * d+-
//
// All maps share CoeffImage's layout: index b*64 + row*8 + col.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "stegarmor/jpeg_codec.hpp"

namespace stegarmor {

inline constexpr double kDefaultAlpha = 0.7;

namespace juniward {

inline constexpr double kSigma = 1.0 / 64.0;
inline constexpr int kTaps = 16;

// Daubechies-8 decomposition high-pass filter.
extern const std::array<double, kTaps> kHighPass;
// Matching low-pass filter, lp[n] = (-1)^n hp[15-n].
std::array<double, kTaps> low_pass();

// Directional residual k in {0,1,2} of a real-valued raster (row-major,
// width x height) with half-sample symmetric extension. Output has the same
// size. Filter k is (lp rows, hp cols), (hp rows, lp cols), (hp, hp).
std::vector<double> residual(const std::vector<double>& raster, int width,
                             int height, int k);

}  // namespace juniward

struct CostMaps {
  std::vector<double> rho;
  std::vector<double> rho_plus;
  std::vector<double> rho_minus;
  double alpha = 1.0;
};

struct DitherInfo {
  std::vector<double> dequant_real;   // real DCT coefficient of J^-1(X)
  std::vector<std::int32_t> interval;  // round(dequant_real / q)
  std::vector<std::uint8_t> cover_bit;  // parity of interval
  std::vector<double> d_plus;
  std::vector<double> d_minus;
  std::vector<double> xi_plus;
  std::vector<double> xi_minus;
};

// Symmetric J-UNIWARD costs computed with the local-support fast path.
std::vector<double> juniward_costs(const CoeffImage& cover);

// rho+ = alpha*rho where the quantized value lies below the real one, rho- =
// alpha*rho where it lies above. `dequant_real` is the real DCT of the
// decompressed cover, in the coefficient layout.
CostMaps asymmetric_costs(const std::vector<double>& rho,
                          const CoeffImage& cover,
                          const std::vector<double>& dequant_real,
                          double alpha);

// Fills dequant_real, interval, cover_bit, d_plus, d_minus.
DitherInfo modification_distances(const CoeffImage& cover);

struct ModifyingCosts {
  std::vector<double> xi_plus;
  std::vector<double> xi_minus;
};

ModifyingCosts modifying_costs(const std::vector<double>& rho_plus,
                               const std::vector<double>& rho_minus,
                               const std::vector<double>& d_plus,
                               const std::vector<double>& d_minus,
                               const QuantTable& table);

// Everything the embedder needs for one cover, computed once.
struct CoverAnalysis {
  CostMaps costs;
  DitherInfo dither;  // xi_plus / xi_minus filled in
};

CoverAnalysis analyze_cover(const CoeffImage& cover, double alpha);

// Debug dump: <prefix>.json header plus one little-endian float64 file per
// map (<prefix>.<name>.f64).
void dump_cost_maps(const std::string& prefix, const CoeffImage& cover,
                    const CoverAnalysis& analysis);

}  // namespace stegarmor
