#include "stegarmor/dm_domain.hpp"

#include <algorithm>
#include <string>

#include "stegarmor/errors.hpp"

namespace stegarmor {

std::vector<int> domain_positions(int index) {
  if (index < 1 || index > kDomainCount) {
    throw InvalidDomainIndex("embedding domain must be 1..6, got " +
                             std::to_string(index));
  }
  std::vector<int> out;
  for (int pos : kZigzag) {
    const int diag = pos / kBlockSize + pos % kBlockSize;
    if (index == 1 || (diag >= index - 1 && diag <= 7)) out.push_back(pos);
  }
  return out;
}

EmbeddingDomain::EmbeddingDomain(int index)
    : index_(index), positions_(domain_positions(index)) {}

bool EmbeddingDomain::contains(int pos) const {
  return std::find(positions_.begin(), positions_.end(), pos) != positions_.end();
}

CoverSequence build_cover_sequence(const CoeffImage& cover,
                                   const DitherInfo& dither,
                                   const EmbeddingDomain& domain) {
  const std::size_t n = cover.coeffs().size();
  if (dither.cover_bit.size() != n || dither.xi_plus.size() != n ||
      dither.xi_minus.size() != n) {
    throw LengthMismatch("dither info does not match cover");
  }
  CoverSequence seq;
  seq.reserve(static_cast<std::size_t>(cover.block_count()) * domain.size());
  for (int b = 0; b < cover.block_count(); ++b) {
    for (int pos : domain.positions()) {
      const std::size_t i = static_cast<std::size_t>(b) * kBlockArea + pos;
      seq.push_back({b, pos, dither.cover_bit[i], dither.interval[i],
                     dither.xi_plus[i], dither.xi_minus[i], dither.d_plus[i],
                     dither.d_minus[i]});
    }
  }
  return seq;
}

Bits cover_bits(const CoverSequence& seq) {
  Bits out(seq.size());
  std::transform(seq.begin(), seq.end(), out.begin(),
                 [](const CoverElement& e) { return e.cover_bit; });
  return out;
}

Direction cheaper_direction(const CoverElement& e) {
  return e.xi_minus < e.xi_plus ? Direction::kMinus : Direction::kPlus;
}

CoeffImage apply_stego_sequence(const CoeffImage& cover,
                                const CoverSequence& seq,
                                const Bits& stego_bits,
                                const std::vector<Direction>& directions) {
  if (stego_bits.size() != seq.size()) {
    throw LengthMismatch("stego bits (" + std::to_string(stego_bits.size()) +
                         ") vs cover sequence (" + std::to_string(seq.size()) + ")");
  }
  if (!directions.empty() && directions.size() != seq.size()) {
    throw LengthMismatch("direction list does not match cover sequence");
  }
  CoeffImage out = cover;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const CoverElement& e = seq[i];
    std::int32_t value = e.interval;
    if (stego_bits[i] != e.cover_bit) {
      const Direction dir = directions.empty() ? cheaper_direction(e) : directions[i];
      value += static_cast<std::int32_t>(dir);
    }
    out.at(e.block, e.position) = value;
  }
  return out;
}

Bits read_stego_bits(const CoeffImage& received, const EmbeddingDomain& domain,
                     const QuantTable& cover_table) {
  Bits out;
  out.reserve(static_cast<std::size_t>(received.block_count()) * domain.size());
  const bool same_table = received.table() == cover_table;
  for (int b = 0; b < received.block_count(); ++b) {
    for (int pos : domain.positions()) {
      std::int64_t k = received.at(b, pos);
      if (!same_table) {
        const double dequant = double(k) * received.table()[pos];
        k = static_cast<std::int64_t>(round_half_away(dequant / cover_table[pos]));
      }
      out.push_back(static_cast<std::uint8_t>(k & 1));
    }
  }
  return out;
}

}  // namespace stegarmor
