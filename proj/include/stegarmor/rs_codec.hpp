#pragma once

// Reed-Solomon RS(31, 31-2t) over GF(2^5), primitive polynomial x^5+x^2+1,
// narrow-sense generator with roots alpha^1 .. alpha^2t, systematic layout
// (data symbols first, parity last).
//
// Framing: message bits are packed MSB-first into 5-bit symbols (final
// symbol zero-padded) and split into blocks of k = 31-2t data symbols. A
// short final block is sent as a shortened code: only its real data symbols
// plus the 2t parity symbols.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stegarmor/bits.hpp"

namespace stegarmor {

inline constexpr int kRsSymbolBits = 5;
inline constexpr int kRsCodeLength = 31;
inline constexpr int kRsMaxCapability = 12;

struct RsParams {
  int t = 1;
  int n() const { return kRsCodeLength; }
  int k() const { return kRsCodeLength - 2 * t; }
  int parity() const { return 2 * t; }
};

// Throws InvalidCapability unless 1 <= t <= 12.
RsParams rs_params(int t);

std::size_t rs_encoded_bits(std::size_t message_bits, int t);

Bits rs_encode(const Bits& message, int t);

struct RsDecodeResult {
  Bits message;  // best effort: uncorrectable blocks are passed through
  bool ok = true;
  int failed_blocks = 0;
  int corrected_symbols = 0;
};

RsDecodeResult rs_decode(const Bits& code, int t, std::size_t message_bits);

// Symbol-level API, exposed for tests and tooling.
namespace gf32 {
std::uint8_t mul(std::uint8_t a, std::uint8_t b);
std::uint8_t inv(std::uint8_t a);
std::uint8_t pow_alpha(int e);
}  // namespace gf32

// Encode `data` (at most k symbols) into data ++ parity.
std::vector<std::uint8_t> rs_encode_block(const std::vector<std::uint8_t>& data, int t);

struct RsBlockResult {
  bool ok = false;
  int corrected = 0;
};
// Corrects `block` (data ++ parity, length <= 31) in place.
RsBlockResult rs_decode_block(std::vector<std::uint8_t>& block, int t);

std::vector<std::uint8_t> pack_symbols(const Bits& bits);
Bits unpack_symbols(const std::vector<std::uint8_t>& symbols, std::size_t bit_count);

}  // namespace stegarmor
