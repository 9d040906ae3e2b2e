#pragma once

// Embedding domains and the cover-element scan shared by embedder and
// extractor.
//
// Domain 1 is the whole 8x8 block (DC included). Domain n >= 2 is the union
// of the anti-diagonals r+c = n-1 .. 7, i.e. the diagonals holding n..8
// coefficients. Sizes are 64, 35, 33, 30, 26, 21.
//
// Scan order: blocks in raster order; within a block, zigzag order
// restricted to the domain's positions.

#include <cstdint>
#include <vector>

#include "stegarmor/bits.hpp"
#include "stegarmor/cost_model.hpp"
#include "stegarmor/jpeg_codec.hpp"

namespace stegarmor {

inline constexpr int kDomainCount = 6;

class EmbeddingDomain {
 public:
  explicit EmbeddingDomain(int index);

  int index() const { return index_; }
  // Natural-order (row*8+col) positions in scan order.
  const std::vector<int>& positions() const { return positions_; }
  std::size_t size() const { return positions_.size(); }
  bool contains(int pos) const;

 private:
  int index_;
  std::vector<int> positions_;
};

std::vector<int> domain_positions(int index);

struct CoverElement {
  int block = 0;
  int position = 0;  // natural order within the block
  std::uint8_t cover_bit = 0;
  std::int32_t interval = 0;  // quantization interval index k
  double xi_plus = 0;
  double xi_minus = 0;
  double d_plus = 0;
  double d_minus = 0;
};

using CoverSequence = std::vector<CoverElement>;

CoverSequence build_cover_sequence(const CoeffImage& cover,
                                   const DitherInfo& dither,
                                   const EmbeddingDomain& domain);

Bits cover_bits(const CoverSequence& seq);

enum class Direction : std::int8_t { kMinus = -1, kPlus = 1 };

// Cheaper direction for flipping an element; ties go to +1.
Direction cheaper_direction(const CoverElement& e);

// Writes the stego sequence into a copy of `cover`. Every domain coefficient
// is set to its interval index k when its bit is kept and to k +- 1 when its
// bit flips; coefficients outside the domain are copied unchanged.
// `directions` may be empty, in which case cheaper_direction() is used.
CoeffImage apply_stego_sequence(const CoeffImage& cover,
                                const CoverSequence& seq,
                                const Bits& stego_bits,
                                const std::vector<Direction>& directions = {});

// Parity of each domain coefficient, rescaled to the embed-time table.
Bits read_stego_bits(const CoeffImage& received, const EmbeddingDomain& domain,
                     const QuantTable& cover_table);

}  // namespace stegarmor
