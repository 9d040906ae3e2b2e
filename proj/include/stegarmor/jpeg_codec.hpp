#pragma once

// Baseline grayscale JPEG at the quantized-coefficient level.
//
// Coefficients are kept exactly as the entropy coder stores them (no
// dequantization). Pixel <-> coefficient conversion uses a floating-point
// orthonormal 8x8 DCT with round-half-away-from-zero, so every robustness
// figure produced by this project is relative to this codec.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stegarmor {

inline constexpr int kBlockSize = 8;
inline constexpr int kBlockArea = 64;

// 64 quantization steps, row-major within the 8x8 block (not zigzag).
class QuantTable {
 public:
  QuantTable();  // all ones
  explicit QuantTable(const std::array<int, kBlockArea>& steps);

  int operator[](std::size_t i) const { return steps_[i]; }
  int at(int row, int col) const { return steps_[row * kBlockSize + col]; }
  const std::array<int, kBlockArea>& steps() const { return steps_; }

  bool operator==(const QuantTable&) const = default;

 private:
  std::array<int, kBlockArea> steps_;
};

// Quantized DCT coefficients of a single-component image. Block b occupies
// coeffs[b*64 .. b*64+63] in natural row-major order; blocks are in raster
// order over a ceil(width/8) x ceil(height/8) grid.
class CoeffImage {
 public:
  CoeffImage() = default;
  CoeffImage(int width, int height, QuantTable table,
             std::optional<int> quality = std::nullopt);

  int width() const { return width_; }
  int height() const { return height_; }
  int blocks_wide() const { return blocks_wide_; }
  int blocks_high() const { return blocks_high_; }
  int block_count() const { return blocks_wide_ * blocks_high_; }

  const QuantTable& table() const { return table_; }
  std::optional<int> quality() const { return quality_; }

  std::span<std::int32_t> block(int b) {
    return {coeffs_.data() + static_cast<std::size_t>(b) * kBlockArea,
            kBlockArea};
  }
  std::span<const std::int32_t> block(int b) const {
    return {coeffs_.data() + static_cast<std::size_t>(b) * kBlockArea,
            kBlockArea};
  }
  std::int32_t& at(int b, int pos) {
    return coeffs_[static_cast<std::size_t>(b) * kBlockArea + pos];
  }
  std::int32_t at(int b, int pos) const {
    return coeffs_[static_cast<std::size_t>(b) * kBlockArea + pos];
  }

  std::vector<std::int32_t>& coeffs() { return coeffs_; }
  const std::vector<std::int32_t>& coeffs() const { return coeffs_; }

  // Equality covers dimensions, table and coefficients. The quality tag is
  // derived metadata and is not compared.
  bool operator==(const CoeffImage& o) const {
    return width_ == o.width_ && height_ == o.height_ && table_ == o.table_ &&
           coeffs_ == o.coeffs_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  int blocks_wide_ = 0;
  int blocks_high_ = 0;
  QuantTable table_;
  std::optional<int> quality_;
  std::vector<std::int32_t> coeffs_;
};

struct SpatialImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  SpatialImage() = default;
  SpatialImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& at(int x, int y) {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  bool operator==(const SpatialImage&) const = default;
};

// Natural-order index of the i-th coefficient in zigzag order.
extern const std::array<int, kBlockArea> kZigzag;
// JPEG Annex K luminance table, row-major.
extern const std::array<int, kBlockArea> kAnnexKLuminance;

QuantTable ijg_quant_table(int quality);
// Quality factor whose IJG table equals `table`, if any.
std::optional<int> match_ijg_quality(const QuantTable& table);

CoeffImage parse_jpeg(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_jpeg(const CoeffImage& img);

SpatialImage decompress(const CoeffImage& img);
CoeffImage compress(const SpatialImage& img, int quality);

std::size_t count_nzac(const CoeffImage& img);

// Floating-point building blocks shared with the cost model.
namespace dct {

// Orthonormal 8x8 type-II DCT of a row-major block.
void forward(std::span<const double, kBlockArea> in,
             std::span<double, kBlockArea> out);
// Inverse of forward().
void inverse(std::span<const double, kBlockArea> in,
             std::span<double, kBlockArea> out);
// Basis value c_u(i) such that the 2-D basis is c_u(i) * c_v(j).
double basis(int freq, int sample);

}  // namespace dct

// Dequantized, inverse-transformed pixels without rounding, clamping or the
// +128 level shift; size blocks_high*8 x blocks_wide*8.
std::vector<double> decompress_unrounded(const CoeffImage& img);

// Real-valued DCT of the (rounded, clamped) decompressed image, one value per
// coefficient in the same layout as CoeffImage::coeffs().
std::vector<double> dequantized_real(const CoeffImage& img);

double round_half_away(double v);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> data);

}  // namespace stegarmor
