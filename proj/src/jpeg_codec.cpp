#include "stegarmor/jpeg_codec.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <string>

#include "stegarmor/errors.hpp"

namespace stegarmor {

const std::array<int, kBlockArea> kZigzag = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

const std::array<int, kBlockArea> kAnnexKLuminance = {
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99};

QuantTable::QuantTable() { steps_.fill(1); }

QuantTable::QuantTable(const std::array<int, kBlockArea>& steps)
    : steps_(steps) {
  for (int s : steps_) {
    if (s < 1 || s > 255) {
      throw InvalidArgument("quantization step " + std::to_string(s) +
                            " outside [1,255]");
    }
  }
}

CoeffImage::CoeffImage(int width, int height, QuantTable table,
                       std::optional<int> quality)
    : width_(width),
      height_(height),
      blocks_wide_((width + kBlockSize - 1) / kBlockSize),
      blocks_high_((height + kBlockSize - 1) / kBlockSize),
      table_(table),
      quality_(quality) {
  if (width <= 0 || height <= 0 || width > 65535 || height > 65535) {
    throw InvalidArgument("image dimensions out of range");
  }
  coeffs_.assign(static_cast<std::size_t>(block_count()) * kBlockArea, 0);
}

double round_half_away(double v) { return std::round(v); }

QuantTable ijg_quant_table(int quality) {
  if (quality < 1 || quality > 100) {
    throw InvalidQuality("quality " + std::to_string(quality) +
                         " outside [1,100]");
  }
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  std::array<int, kBlockArea> steps{};
  for (int i = 0; i < kBlockArea; ++i) {
    steps[i] = std::clamp((kAnnexKLuminance[i] * scale + 50) / 100, 1, 255);
  }
  return QuantTable(steps);
}

std::optional<int> match_ijg_quality(const QuantTable& table) {
  for (int q = 1; q <= 100; ++q) {
    if (ijg_quant_table(q) == table) return q;
  }
  return std::nullopt;
}

std::size_t count_nzac(const CoeffImage& img) {
  std::size_t n = 0;
  for (int b = 0; b < img.block_count(); ++b) {
    auto blk = img.block(b);
    n += static_cast<std::size_t>(
        std::count_if(blk.begin() + 1, blk.end(), [](auto c) { return c != 0; }));
  }
  return n;
}

// ---------------------------------------------------------------------------
// DCT

namespace dct {
namespace {

struct CosTable {
  double c[kBlockSize][kBlockSize];  // c[freq][sample]
  CosTable() {
    for (int u = 0; u < kBlockSize; ++u) {
      const double norm = u == 0 ? std::sqrt(1.0 / 8.0) : 0.5;
      for (int x = 0; x < kBlockSize; ++x) {
        c[u][x] = norm * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
      }
    }
  }
};

const CosTable& cos_table() {
  static const CosTable t;
  return t;
}

}  // namespace

double basis(int freq, int sample) { return cos_table().c[freq][sample]; }

void forward(std::span<const double, kBlockArea> in,
             std::span<double, kBlockArea> out) {
  const auto& c = cos_table().c;
  double tmp[kBlockArea];
  // rows: tmp[y][v] = sum_x in[y][x] c[v][x]
  for (int y = 0; y < kBlockSize; ++y) {
    for (int v = 0; v < kBlockSize; ++v) {
      double s = 0;
      for (int x = 0; x < kBlockSize; ++x) s += in[y * 8 + x] * c[v][x];
      tmp[y * 8 + v] = s;
    }
  }
  for (int u = 0; u < kBlockSize; ++u) {
    for (int v = 0; v < kBlockSize; ++v) {
      double s = 0;
      for (int y = 0; y < kBlockSize; ++y) s += tmp[y * 8 + v] * c[u][y];
      out[u * 8 + v] = s;
    }
  }
}

void inverse(std::span<const double, kBlockArea> in,
             std::span<double, kBlockArea> out) {
  const auto& c = cos_table().c;
  double tmp[kBlockArea];
  // tmp[y][v] = sum_u c[u][y] in[u][v]
  for (int y = 0; y < kBlockSize; ++y) {
    for (int v = 0; v < kBlockSize; ++v) {
      double s = 0;
      for (int u = 0; u < kBlockSize; ++u) s += c[u][y] * in[u * 8 + v];
      tmp[y * 8 + v] = s;
    }
  }
  for (int y = 0; y < kBlockSize; ++y) {
    for (int x = 0; x < kBlockSize; ++x) {
      double s = 0;
      for (int v = 0; v < kBlockSize; ++v) s += tmp[y * 8 + v] * c[v][x];
      out[y * 8 + x] = s;
    }
  }
}

}  // namespace dct

std::vector<double> decompress_unrounded(const CoeffImage& img) {
  const int full_w = img.blocks_wide() * kBlockSize;
  const int full_h = img.blocks_high() * kBlockSize;
  std::vector<double> out(static_cast<std::size_t>(full_w) * full_h);
  std::array<double, kBlockArea> deq{};
  std::array<double, kBlockArea> px{};
  for (int b = 0; b < img.block_count(); ++b) {
    auto blk = img.block(b);
    for (int i = 0; i < kBlockArea; ++i) deq[i] = double(blk[i]) * img.table()[i];
    dct::inverse(deq, px);
    const int bx = (b % img.blocks_wide()) * kBlockSize;
    const int by = (b / img.blocks_wide()) * kBlockSize;
    for (int y = 0; y < kBlockSize; ++y) {
      for (int x = 0; x < kBlockSize; ++x) {
        out[static_cast<std::size_t>(by + y) * full_w + bx + x] = px[y * 8 + x];
      }
    }
  }
  return out;
}

SpatialImage decompress(const CoeffImage& img) {
  const int full_w = img.blocks_wide() * kBlockSize;
  const auto raw = decompress_unrounded(img);
  SpatialImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double v = round_half_away(raw[static_cast<std::size_t>(y) * full_w + x] + 128.0);
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
  }
  return out;
}

namespace {

// Forward DCT of a level-shifted raster, edge-replicated to whole blocks.
std::vector<double> forward_real(const SpatialImage& img) {
  const int bw = (img.width + kBlockSize - 1) / kBlockSize;
  const int bh = (img.height + kBlockSize - 1) / kBlockSize;
  std::vector<double> out(static_cast<std::size_t>(bw) * bh * kBlockArea);
  std::array<double, kBlockArea> px{};
  std::array<double, kBlockArea> freq{};
  for (int by = 0; by < bh; ++by) {
    for (int bx = 0; bx < bw; ++bx) {
      for (int y = 0; y < kBlockSize; ++y) {
        const int sy = std::min(by * kBlockSize + y, img.height - 1);
        for (int x = 0; x < kBlockSize; ++x) {
          const int sx = std::min(bx * kBlockSize + x, img.width - 1);
          px[y * 8 + x] = double(img.at(sx, sy)) - 128.0;
        }
      }
      dct::forward(px, freq);
      std::copy(freq.begin(), freq.end(),
                out.begin() + (static_cast<std::ptrdiff_t>(by) * bw + bx) * kBlockArea);
    }
  }
  return out;
}

}  // namespace

std::vector<double> dequantized_real(const CoeffImage& img) {
  return forward_real(decompress(img));
}

CoeffImage compress(const SpatialImage& img, int quality) {
  const QuantTable table = ijg_quant_table(quality);
  if (img.width <= 0 || img.height <= 0) {
    throw InvalidArgument("empty image");
  }
  CoeffImage out(img.width, img.height, table, quality);
  const auto real = forward_real(img);
  auto& c = out.coeffs();
  for (std::size_t i = 0; i < real.size(); ++i) {
    c[i] = static_cast<std::int32_t>(
        round_half_away(real[i] / table[i % kBlockArea]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Entropy coding

namespace {

constexpr std::uint8_t kDcBits[16] = {0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
constexpr std::uint8_t kDcVals[12] = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
constexpr std::uint8_t kAcBits[16] = {0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 125};
constexpr std::uint8_t kAcVals[162] = {
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06,
    0x13, 0x51, 0x61, 0x07, 0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xA1, 0x08,
    0x23, 0x42, 0xB1, 0xC1, 0x15, 0x52, 0xD1, 0xF0, 0x24, 0x33, 0x62, 0x72,
    0x82, 0x09, 0x0A, 0x16, 0x17, 0x18, 0x19, 0x1A, 0x25, 0x26, 0x27, 0x28,
    0x29, 0x2A, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3A, 0x43, 0x44, 0x45,
    0x46, 0x47, 0x48, 0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59,
    0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6A, 0x73, 0x74, 0x75,
    0x76, 0x77, 0x78, 0x79, 0x7A, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
    0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A, 0xA2, 0xA3,
    0xA4, 0xA5, 0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6,
    0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5, 0xC6, 0xC7, 0xC8, 0xC9,
    0xCA, 0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA, 0xE1, 0xE2,
    0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA, 0xF1, 0xF2, 0xF3, 0xF4,
    0xF5, 0xF6, 0xF7, 0xF8, 0xF9, 0xFA};

struct HuffCode {
  std::uint16_t code = 0;
  std::uint8_t length = 0;
};

// Canonical code assignment (JPEG Annex C).
std::array<HuffCode, 256> build_encoder(const std::uint8_t* bits,
                                        const std::uint8_t* vals) {
  std::array<HuffCode, 256> table{};
  std::uint16_t code = 0;
  int k = 0;
  for (int len = 1; len <= 16; ++len) {
    for (int i = 0; i < bits[len - 1]; ++i) {
      table[vals[k++]] = {code, static_cast<std::uint8_t>(len)};
      ++code;
    }
    code <<= 1;
  }
  return table;
}

struct HuffDecoder {
  bool defined = false;
  std::int32_t maxcode[18]{};
  std::int32_t valptr[17]{};
  std::int32_t mincode[17]{};
  std::vector<std::uint8_t> vals;

  void build(const std::uint8_t* bits, std::vector<std::uint8_t> values) {
    vals = std::move(values);
    std::int32_t code = 0;
    int k = 0;
    for (int len = 1; len <= 16; ++len) {
      const int n = bits[len - 1];
      if (n == 0) {
        maxcode[len] = -1;
      } else {
        valptr[len] = k;
        mincode[len] = code;
        code += n;
        k += n;
        maxcode[len] = code - 1;
      }
      code <<= 1;
    }
    maxcode[17] = 0x7fffffff;
    defined = true;
  }
};

class BitWriter {
 public:
  explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  void put(std::uint32_t value, int length) {
    for (int i = length - 1; i >= 0; --i) {
      acc_ = static_cast<std::uint8_t>((acc_ << 1) | ((value >> i) & 1U));
      if (++nbits_ == 8) flush_byte();
    }
  }
  void finish() {
    while (nbits_ != 0) put(1, 1);
  }

 private:
  void flush_byte() {
    out_.push_back(acc_);
    if (acc_ == 0xFF) out_.push_back(0x00);
    acc_ = 0;
    nbits_ = 0;
  }
  std::vector<std::uint8_t>& out_;
  std::uint8_t acc_ = 0;
  int nbits_ = 0;
};

class BitReader {
 public:
  BitReader(std::span<const std::uint8_t> data, std::size_t pos)
      : data_(data), pos_(pos) {}

  int bit() {
    if (nbits_ == 0) fill();
    --nbits_;
    return (acc_ >> nbits_) & 1;
  }
  std::int32_t bits(int n) {
    std::int32_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 1) | bit();
    return v;
  }
  // Discard partial byte and consume an expected RSTn marker.
  void restart(int expected) {
    nbits_ = 0;
    if (pos_ + 1 >= data_.size() || data_[pos_] != 0xFF ||
        data_[pos_ + 1] != 0xD0 + expected) {
      throw MalformedStream("expected RST" + std::to_string(expected) + " marker");
    }
    pos_ += 2;
  }
  // Position just past the entropy-coded segment.
  std::size_t end_position() const { return pos_; }

 private:
  void fill() {
    if (pos_ >= data_.size()) throw MalformedStream("truncated entropy-coded data");
    std::uint8_t b = data_[pos_];
    if (b == 0xFF) {
      if (pos_ + 1 >= data_.size()) throw MalformedStream("truncated entropy-coded data");
      const std::uint8_t next = data_[pos_ + 1];
      if (next == 0x00) {
        pos_ += 2;
      } else {
        throw MalformedStream("unexpected marker inside entropy-coded data");
      }
    } else {
      ++pos_;
    }
    acc_ = b;
    nbits_ = 8;
  }
  std::span<const std::uint8_t> data_;
  std::size_t pos_;
  std::uint32_t acc_ = 0;
  int nbits_ = 0;
};

int magnitude_category(std::int32_t v) {
  std::uint32_t a = static_cast<std::uint32_t>(v < 0 ? -v : v);
  int n = 0;
  while (a) {
    ++n;
    a >>= 1;
  }
  return n;
}

std::uint32_t magnitude_bits(std::int32_t v, int category) {
  if (v >= 0) return static_cast<std::uint32_t>(v);
  return static_cast<std::uint32_t>(v + (1 << category) - 1);
}

std::int32_t extend(std::int32_t v, int category) {
  return v < (1 << (category - 1)) ? v - (1 << category) + 1 : v;
}

int decode_symbol(BitReader& br, const HuffDecoder& h) {
  std::int32_t code = br.bit();
  int len = 1;
  while (len <= 16 && code > h.maxcode[len]) {
    code = (code << 1) | br.bit();
    ++len;
  }
  if (len > 16) throw MalformedStream("invalid Huffman code");
  const std::size_t idx =
      static_cast<std::size_t>(h.valptr[len] + code - h.mincode[len]);
  if (idx >= h.vals.size()) throw MalformedStream("invalid Huffman code");
  return h.vals[idx];
}

void put_u16(std::vector<std::uint8_t>& out, int v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

class ByteCursor {
 public:
  explicit ByteCursor(std::span<const std::uint8_t> d) : d_(d) {}
  std::uint8_t u8() {
    if (pos_ >= d_.size()) throw MalformedStream("unexpected end of stream");
    return d_[pos_++];
  }
  int u16() {
    const int hi = u8();
    return (hi << 8) | u8();
  }
  std::size_t pos() const { return pos_; }
  void seek(std::size_t p) {
    if (p > d_.size()) throw MalformedStream("segment length past end of stream");
    pos_ = p;
  }
  std::size_t size() const { return d_.size(); }

 private:
  std::span<const std::uint8_t> d_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_jpeg(const CoeffImage& img) {
  // Validate before emitting anything.
  {
    std::int32_t prev_dc = 0;
    for (int b = 0; b < img.block_count(); ++b) {
      auto blk = img.block(b);
      const std::int32_t diff = blk[0] - prev_dc;
      prev_dc = blk[0];
      if (diff < -2047 || diff > 2047) {
        throw CoefficientOverflow("DC difference " + std::to_string(diff) +
                                  " in block " + std::to_string(b));
      }
      for (int i = 1; i < kBlockArea; ++i) {
        if (blk[i] < -1023 || blk[i] > 1023) {
          throw CoefficientOverflow("AC coefficient " + std::to_string(blk[i]) +
                                    " in block " + std::to_string(b));
        }
      }
    }
  }

  std::vector<std::uint8_t> out;
  out.reserve(1024 + img.coeffs().size() / 2);
  auto marker = [&](std::uint8_t m) {
    out.push_back(0xFF);
    out.push_back(m);
  };

  marker(0xD8);  // SOI

  marker(0xE0);  // APP0 / JFIF 1.01, no thumbnail
  put_u16(out, 16);
  for (char ch : {'J', 'F', 'I', 'F', '\0'}) out.push_back(static_cast<std::uint8_t>(ch));
  out.push_back(1);
  out.push_back(1);
  out.push_back(0);
  put_u16(out, 1);
  put_u16(out, 1);
  out.push_back(0);
  out.push_back(0);

  marker(0xDB);  // DQT, 8-bit, table 0, zigzag order
  put_u16(out, 2 + 1 + 64);
  out.push_back(0x00);
  for (int i = 0; i < kBlockArea; ++i) {
    out.push_back(static_cast<std::uint8_t>(img.table()[kZigzag[i]]));
  }

  marker(0xC0);  // SOF0
  put_u16(out, 8 + 3);
  out.push_back(8);
  put_u16(out, img.height());
  put_u16(out, img.width());
  out.push_back(1);
  out.push_back(1);     // component id
  out.push_back(0x11);  // 1x1 sampling
  out.push_back(0);     // table 0

  marker(0xC4);  // DHT: DC0 then AC0
  put_u16(out, 2 + (1 + 16 + 12) + (1 + 16 + 162));
  out.push_back(0x00);
  out.insert(out.end(), std::begin(kDcBits), std::end(kDcBits));
  out.insert(out.end(), std::begin(kDcVals), std::end(kDcVals));
  out.push_back(0x10);
  out.insert(out.end(), std::begin(kAcBits), std::end(kAcBits));
  out.insert(out.end(), std::begin(kAcVals), std::end(kAcVals));

  marker(0xDA);  // SOS
  put_u16(out, 6 + 2);
  out.push_back(1);
  out.push_back(1);
  out.push_back(0x00);
  out.push_back(0);
  out.push_back(63);
  out.push_back(0);

  static const auto dc_codes = build_encoder(kDcBits, kDcVals);
  static const auto ac_codes = build_encoder(kAcBits, kAcVals);
  BitWriter bw(out);
  std::int32_t prev_dc = 0;
  for (int b = 0; b < img.block_count(); ++b) {
    auto blk = img.block(b);
    const std::int32_t diff = blk[0] - prev_dc;
    prev_dc = blk[0];
    const int dc_cat = magnitude_category(diff);
    bw.put(dc_codes[dc_cat].code, dc_codes[dc_cat].length);
    if (dc_cat) bw.put(magnitude_bits(diff, dc_cat), dc_cat);

    int run = 0;
    for (int k = 1; k < kBlockArea; ++k) {
      const std::int32_t v = blk[kZigzag[k]];
      if (v == 0) {
        ++run;
        continue;
      }
      while (run > 15) {
        bw.put(ac_codes[0xF0].code, ac_codes[0xF0].length);
        run -= 16;
      }
      const int cat = magnitude_category(v);
      const int sym = (run << 4) | cat;
      bw.put(ac_codes[sym].code, ac_codes[sym].length);
      bw.put(magnitude_bits(v, cat), cat);
      run = 0;
    }
    if (run > 0) bw.put(ac_codes[0x00].code, ac_codes[0x00].length);
  }
  bw.finish();

  marker(0xD9);  // EOI
  return out;
}

CoeffImage parse_jpeg(std::span<const std::uint8_t> bytes) {
  ByteCursor cur(bytes);
  if (cur.u8() != 0xFF || cur.u8() != 0xD8) throw MalformedStream("missing SOI");

  std::array<std::optional<std::array<int, kBlockArea>>, 4> qtables;
  std::array<HuffDecoder, 4> dc_tables;
  std::array<HuffDecoder, 4> ac_tables;
  int restart_interval = 0;
  int width = 0;
  int height = 0;
  int frame_component = -1;
  int frame_qtable = -1;
  bool have_frame = false;
  std::optional<CoeffImage> image;

  for (;;) {
    std::uint8_t b = cur.u8();
    if (b != 0xFF) throw MalformedStream("expected marker");
    std::uint8_t m = cur.u8();
    while (m == 0xFF) m = cur.u8();  // fill bytes

    if (m == 0xD9) break;  // EOI
    if (m == 0xD8 || (m >= 0xD0 && m <= 0xD7) || m == 0x01) {
      throw MalformedStream("unexpected standalone marker");
    }

    const std::size_t seg_start = cur.pos();
    const int len = cur.u16();
    if (len < 2) throw MalformedStream("bad segment length");
    const std::size_t seg_end = seg_start + static_cast<std::size_t>(len);
    if (seg_end > cur.size()) throw MalformedStream("segment length past end of stream");

    switch (m) {
      case 0xC0:
      case 0xC1: {
        if (have_frame) throw MalformedStream("multiple frames");
        const int precision = cur.u8();
        if (precision != 8) throw UnsupportedFeature("sample precision " + std::to_string(precision));
        height = cur.u16();
        width = cur.u16();
        const int ncomp = cur.u8();
        if (ncomp != 1) {
          throw UnsupportedFeature(std::to_string(ncomp) + " components (grayscale only)");
        }
        frame_component = cur.u8();
        cur.u8();  // sampling factors are irrelevant for a single component
        frame_qtable = cur.u8();
        if (frame_qtable > 3) throw MalformedStream("bad quantization table id");
        if (height == 0) throw UnsupportedFeature("DNL-defined height");
        if (width == 0) throw MalformedStream("zero width");
        have_frame = true;
        break;
      }
      case 0xC2:
      case 0xC6:
      case 0xCA:
      case 0xCE:
        throw UnsupportedFeature("progressive JPEG");
      case 0xC3:
      case 0xC5:
      case 0xC7:
      case 0xCB:
      case 0xCD:
      case 0xCF:
        throw UnsupportedFeature("lossless or hierarchical JPEG");
      case 0xC9:
        throw UnsupportedFeature("arithmetic coding");
      case 0xCC:
        throw UnsupportedFeature("arithmetic coding conditioning");
      case 0xDB: {
        while (cur.pos() < seg_end) {
          const int pq_tq = cur.u8();
          const int pq = pq_tq >> 4;
          const int tq = pq_tq & 0x0F;
          if (tq > 3 || pq > 1) throw MalformedStream("bad DQT header");
          std::array<int, kBlockArea> steps{};
          for (int i = 0; i < kBlockArea; ++i) {
            steps[kZigzag[i]] = pq ? cur.u16() : cur.u8();
          }
          for (int s : steps) {
            if (s < 1 || s > 255) {
              throw UnsupportedFeature("quantization step " + std::to_string(s));
            }
          }
          qtables[tq] = steps;
        }
        break;
      }
      case 0xC4: {
        while (cur.pos() < seg_end) {
          const int tc_th = cur.u8();
          const int tc = tc_th >> 4;
          const int th = tc_th & 0x0F;
          if (tc > 1 || th > 3) throw MalformedStream("bad DHT header");
          std::uint8_t counts[16];
          int total = 0;
          for (auto& c : counts) {
            c = cur.u8();
            total += c;
          }
          if (total > 256) throw MalformedStream("bad DHT code counts");
          std::vector<std::uint8_t> vals(static_cast<std::size_t>(total));
          for (auto& v : vals) v = cur.u8();
          (tc == 0 ? dc_tables : ac_tables)[th].build(counts, std::move(vals));
        }
        break;
      }
      case 0xDD:
        restart_interval = cur.u16();
        break;
      case 0xDA: {
        if (!have_frame) throw MalformedStream("SOS before SOF");
        const int ns = cur.u8();
        if (ns != 1) throw UnsupportedFeature("multi-component scan");
        const int cs = cur.u8();
        if (cs != frame_component) throw MalformedStream("scan component not in frame");
        const int td_ta = cur.u8();
        const int ss = cur.u8();
        const int se = cur.u8();
        const int ah_al = cur.u8();
        if (ss != 0 || se != 63 || ah_al != 0) throw UnsupportedFeature("non-sequential scan");
        if (image) throw UnsupportedFeature("multiple scans");
        const HuffDecoder& dc = dc_tables[td_ta >> 4 & 3];
        const HuffDecoder& ac = ac_tables[td_ta & 3];
        if (!dc.defined || !ac.defined) throw MalformedStream("scan references undefined Huffman table");
        if (!qtables[frame_qtable]) throw MalformedStream("frame references undefined quantization table");
        cur.seek(seg_end);

        CoeffImage img(width, height, QuantTable(*qtables[frame_qtable]));
        BitReader br(bytes, cur.pos());
        std::int32_t prev_dc = 0;
        int next_rst = 0;
        for (int blk = 0; blk < img.block_count(); ++blk) {
          if (restart_interval && blk > 0 && blk % restart_interval == 0) {
            br.restart(next_rst);
            next_rst = (next_rst + 1) & 7;
            prev_dc = 0;
          }
          auto out = img.block(blk);
          const int dc_cat = decode_symbol(br, dc);
          if (dc_cat > 11) throw MalformedStream("DC category out of range");
          const std::int32_t diff = dc_cat ? extend(br.bits(dc_cat), dc_cat) : 0;
          prev_dc += diff;
          out[0] = prev_dc;
          for (int k = 1; k < kBlockArea;) {
            const int sym = decode_symbol(br, ac);
            const int run = sym >> 4;
            const int cat = sym & 0x0F;
            if (cat == 0) {
              if (run == 15) {
                k += 16;
                continue;
              }
              if (run != 0) throw MalformedStream("bad AC symbol");
              break;  // EOB
            }
            k += run;
            if (k > 63 || cat > 10) throw MalformedStream("AC coefficient index overflow");
            out[kZigzag[k]] = extend(br.bits(cat), cat);
            ++k;
          }
        }
        // Skip to the next marker (padding bits / trailing data).
        std::size_t p = br.end_position();
        while (p + 1 < bytes.size() &&
               !(bytes[p] == 0xFF && bytes[p + 1] != 0x00 &&
                 !(bytes[p + 1] >= 0xD0 && bytes[p + 1] <= 0xD7))) {
          ++p;
        }
        cur.seek(p);
        image = std::move(img);
        continue;
      }
      default:
        if ((m >= 0xE0 && m <= 0xEF) || m == 0xFE || m == 0xDC || m == 0xDE ||
            m == 0xDF || (m >= 0xF0 && m <= 0xFD)) {
          break;  // application data, comments, and other skippable segments
        }
        throw MalformedStream("unknown marker");
    }
    cur.seek(seg_end);
  }

  if (!image) throw MalformedStream("no scan data");
  CoeffImage tagged(image->width(), image->height(), image->table(),
                    match_ijg_quality(image->table()));
  tagged.coeffs() = std::move(image->coeffs());
  return tagged;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) throw Error("write failed for " + path);
}

}  // namespace stegarmor
