#pragma once

// Syndrome-trellis codes.
//
// The parity-check matrix H (m x n) is built from an h-row submatrix whose
// columns come from a seeded PRNG and always have their top and bottom bits
// set. Message bit i owns a run of widths[i] consecutive cover positions
// (widths are floor((i+1)n/m) - floor(i n/m), so each is w or w+1 with
// w = floor(n/m)); column j of that run places submatrix column j on rows
// i .. i+h-1, truncated at row m.
//
// stc_embed() runs a Viterbi search over the 2^h syndrome states and returns
// the minimum-cost vector y with H y = message.

#include <cstdint>
#include <vector>

#include "stegarmor/bits.hpp"
#include "stegarmor/dm_domain.hpp"

namespace stegarmor {

inline constexpr int kDefaultConstraintHeight = 10;
inline constexpr double kWetCost = 1e13;

struct StcParams {
  int h = kDefaultConstraintHeight;
  std::uint64_t seed = 0;
};

class StcCode {
 public:
  StcCode(std::size_t cover_len, std::size_t message_len, const StcParams& params);

  std::size_t cover_len() const { return n_; }
  std::size_t message_len() const { return m_; }
  int height() const { return h_; }

  // Row of H where column j's pattern starts, and the pattern itself (bit r
  // is row first_row(j)+r; rows >= message_len() are outside H).
  std::size_t first_row(std::size_t j) const { return row_of_[j]; }
  std::uint32_t pattern(std::size_t j) const { return column_[j]; }

  std::size_t width(std::size_t i) const { return widths_[i]; }

  Bits syndrome(const Bits& y) const;

 private:
  std::size_t n_;
  std::size_t m_;
  int h_;
  std::vector<std::size_t> widths_;
  std::vector<std::uint32_t> submatrix_;
  std::vector<std::uint32_t> column_;
  std::vector<std::size_t> row_of_;
};

struct StcEmbedResult {
  Bits stego;
  double cost = 0;
};

StcEmbedResult stc_embed(const Bits& cover, const std::vector<double>& flip_costs,
                         const Bits& message, const StcParams& params);

Bits stc_extract(const Bits& stego, std::size_t message_len, const StcParams& params);

struct TernaryEmbedResult {
  Bits stego;
  std::vector<Direction> directions;  // meaningful where stego != cover
  double cost = 0;
  std::size_t changes = 0;
};

// Binary trellis on parity with cost min(xi+, xi-), direction picked per
// flipped element (ties to +1). Both +-1 moves flip parity identically, so
// this is the ternary minimum.
TernaryEmbedResult ternary_embed(const CoverSequence& elements, const Bits& message,
                                 const StcParams& params);

}  // namespace stegarmor
