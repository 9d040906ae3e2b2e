#include "stegarmor/rs_codec.hpp"

#include <array>
#include <string>

#include "stegarmor/errors.hpp"

namespace stegarmor {

namespace gf32 {
namespace {

constexpr unsigned kPrimitive = 0x25;  // x^5 + x^2 + 1
constexpr int kOrder = 31;

struct Tables {
  std::array<std::uint8_t, 2 * kOrder> exp{};
  std::array<int, 32> log{};
  Tables() {
    unsigned x = 1;
    for (int i = 0; i < kOrder; ++i) {
      exp[i] = static_cast<std::uint8_t>(x);
      log[x] = i;
      x <<= 1;
      if (x & 0x20) x ^= kPrimitive;
    }
    for (int i = kOrder; i < 2 * kOrder; ++i) exp[i] = exp[i - kOrder];
    log[0] = -1;
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

}  // namespace

std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
  if (a == 0 || b == 0) return 0;
  const auto& t = tables();
  return t.exp[t.log[a] + t.log[b]];
}

std::uint8_t inv(std::uint8_t a) {
  if (a == 0) throw InvalidArgument("zero has no inverse in GF(32)");
  const auto& t = tables();
  return t.exp[(kOrder - t.log[a]) % kOrder];
}

std::uint8_t pow_alpha(int e) {
  e %= kOrder;
  if (e < 0) e += kOrder;
  return tables().exp[e];
}

}  // namespace gf32

namespace {

using Poly = std::vector<std::uint8_t>;  // coefficient of x^i at index i

std::uint8_t eval(const Poly& p, std::uint8_t x) {
  std::uint8_t acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = gf32::mul(acc, x) ^ *it;
  return acc;
}

Poly generator(int t) {
  Poly g = {1};
  for (int i = 1; i <= 2 * t; ++i) {
    const std::uint8_t root = gf32::pow_alpha(i);
    Poly next(g.size() + 1, 0);
    for (std::size_t j = 0; j < g.size(); ++j) {
      next[j + 1] ^= g[j];
      next[j] ^= gf32::mul(g[j], root);
    }
    g = std::move(next);
  }
  return g;
}

const Poly& cached_generator(int t) {
  static const auto all = [] {
    std::array<Poly, kRsMaxCapability + 1> a;
    for (int i = 1; i <= kRsMaxCapability; ++i) a[i] = generator(i);
    return a;
  }();
  return all[t];
}

// Received word value at the position of x^degree; block element j holds
// degree len-1-j.
std::vector<std::uint8_t> syndromes(const std::vector<std::uint8_t>& block, int t) {
  std::vector<std::uint8_t> s(static_cast<std::size_t>(2 * t));
  for (int i = 1; i <= 2 * t; ++i) {
    const std::uint8_t a = gf32::pow_alpha(i);
    std::uint8_t acc = 0;
    for (std::uint8_t sym : block) acc = gf32::mul(acc, a) ^ sym;  // Horner, highest degree first
    s[i - 1] = acc;
  }
  return s;
}

}  // namespace

RsParams rs_params(int t) {
  if (t < 1 || t > kRsMaxCapability) {
    throw InvalidCapability("error-correction capability must be 1..12, got " +
                            std::to_string(t));
  }
  return RsParams{t};
}

std::size_t rs_encoded_bits(std::size_t message_bits, int t) {
  const RsParams p = rs_params(t);
  const std::size_t symbols = (message_bits + kRsSymbolBits - 1) / kRsSymbolBits;
  const std::size_t k = static_cast<std::size_t>(p.k());
  const std::size_t full = symbols / k;
  const std::size_t rem = symbols % k;
  const std::size_t total = full * kRsCodeLength + (rem ? rem + p.parity() : 0);
  return total * kRsSymbolBits;
}

std::vector<std::uint8_t> pack_symbols(const Bits& bits) {
  std::vector<std::uint8_t> out((bits.size() + kRsSymbolBits - 1) / kRsSymbolBits, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    out[i / kRsSymbolBits] |= static_cast<std::uint8_t>(
        (bits[i] & 1) << (kRsSymbolBits - 1 - i % kRsSymbolBits));
  }
  return out;
}

Bits unpack_symbols(const std::vector<std::uint8_t>& symbols, std::size_t bit_count) {
  if (bit_count > symbols.size() * kRsSymbolBits) {
    throw FramingError("not enough symbols for requested bit count");
  }
  Bits out(bit_count);
  for (std::size_t i = 0; i < bit_count; ++i) {
    out[i] = (symbols[i / kRsSymbolBits] >> (kRsSymbolBits - 1 - i % kRsSymbolBits)) & 1;
  }
  return out;
}

std::vector<std::uint8_t> rs_encode_block(const std::vector<std::uint8_t>& data, int t) {
  const RsParams p = rs_params(t);
  if (data.empty() || data.size() > static_cast<std::size_t>(p.k())) {
    throw FramingError("block must hold 1..k data symbols");
  }
  const Poly& g = cached_generator(t);
  const int nparity = p.parity();
  // LFSR division of data(x) * x^2t by g(x); reg[i] holds coefficient of x^i.
  std::vector<std::uint8_t> reg(static_cast<std::size_t>(nparity), 0);
  for (std::uint8_t sym : data) {
    const std::uint8_t feedback = (sym & 0x1F) ^ reg[nparity - 1];
    for (int i = nparity - 1; i > 0; --i) reg[i] = reg[i - 1] ^ gf32::mul(feedback, g[i]);
    reg[0] = gf32::mul(feedback, g[0]);
  }
  std::vector<std::uint8_t> out(data.begin(), data.end());
  for (int i = nparity - 1; i >= 0; --i) out.push_back(reg[i]);
  return out;
}

RsBlockResult rs_decode_block(std::vector<std::uint8_t>& block, int t) {
  rs_params(t);
  const int len = static_cast<int>(block.size());
  if (len <= 2 * t || len > kRsCodeLength) throw FramingError("bad block length");

  const auto s = syndromes(block, t);
  bool clean = true;
  for (auto v : s) clean = clean && v == 0;
  if (clean) return {true, 0};

  // Berlekamp-Massey.
  Poly lambda = {1};
  Poly prev = {1};
  int errors = 0;
  int shift = 1;
  std::uint8_t prev_disc = 1;
  for (int r = 0; r < 2 * t; ++r) {
    std::uint8_t disc = s[r];
    for (int i = 1; i <= errors && i < static_cast<int>(lambda.size()); ++i) {
      disc ^= gf32::mul(lambda[i], s[r - i]);
    }
    if (disc == 0) {
      ++shift;
      continue;
    }
    const std::uint8_t scale = gf32::mul(disc, gf32::inv(prev_disc));
    Poly next = lambda;
    if (next.size() < prev.size() + shift) next.resize(prev.size() + shift, 0);
    for (std::size_t i = 0; i < prev.size(); ++i) next[i + shift] ^= gf32::mul(scale, prev[i]);
    if (2 * errors <= r) {
      prev = lambda;
      errors = r + 1 - errors;
      prev_disc = disc;
      shift = 1;
    } else {
      ++shift;
    }
    lambda = std::move(next);
  }
  while (lambda.size() > 1 && lambda.back() == 0) lambda.pop_back();
  const int degree = static_cast<int>(lambda.size()) - 1;
  if (degree > t || degree != errors) return {false, 0};

  // Chien search over the transmitted positions only.
  std::vector<int> positions;  // indices into block
  for (int j = 0; j < len; ++j) {
    const int deg = len - 1 - j;
    if (eval(lambda, gf32::pow_alpha(-deg)) == 0) positions.push_back(j);
  }
  if (static_cast<int>(positions.size()) != degree) return {false, 0};

  // Forney: e = Omega(X^-1) / Lambda'(X^-1), Omega = S(x) Lambda(x) mod x^2t.
  Poly omega(static_cast<std::size_t>(2 * t), 0);
  for (int i = 0; i < 2 * t; ++i) {
    for (int j = 0; j <= i && j <= degree; ++j) omega[i] ^= gf32::mul(lambda[j], s[i - j]);
  }
  Poly dlambda(lambda.size() > 1 ? lambda.size() - 1 : 1, 0);
  for (std::size_t i = 1; i < lambda.size(); i += 2) dlambda[i - 1] = lambda[i];

  std::vector<std::uint8_t> fixed = block;
  for (int j : positions) {
    const std::uint8_t xinv = gf32::pow_alpha(-(len - 1 - j));
    const std::uint8_t denom = eval(dlambda, xinv);
    if (denom == 0) return {false, 0};
    fixed[j] ^= gf32::mul(eval(omega, xinv), gf32::inv(denom));
  }
  for (auto v : syndromes(fixed, t)) {
    if (v != 0) return {false, 0};
  }
  block = std::move(fixed);
  return {true, degree};
}

Bits rs_encode(const Bits& message, int t) {
  const RsParams p = rs_params(t);
  if (message.empty()) throw InvalidArgument("cannot RS-encode an empty message");
  const auto symbols = pack_symbols(message);
  std::vector<std::uint8_t> out;
  out.reserve(rs_encoded_bits(message.size(), t) / kRsSymbolBits);
  for (std::size_t at = 0; at < symbols.size(); at += static_cast<std::size_t>(p.k())) {
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(p.k()), symbols.size() - at);
    const std::vector<std::uint8_t> data(symbols.begin() + static_cast<std::ptrdiff_t>(at),
                                         symbols.begin() + static_cast<std::ptrdiff_t>(at + take));
    const auto cw = rs_encode_block(data, t);
    out.insert(out.end(), cw.begin(), cw.end());
  }
  return unpack_symbols(out, out.size() * kRsSymbolBits);
}

RsDecodeResult rs_decode(const Bits& code, int t, std::size_t message_bits) {
  const RsParams p = rs_params(t);
  if (message_bits == 0) throw FramingError("message length must be positive");
  const std::size_t expected = rs_encoded_bits(message_bits, t);
  if (code.size() != expected) {
    throw FramingError("code length " + std::to_string(code.size()) + " bits, expected " +
                       std::to_string(expected));
  }
  const auto received = pack_symbols(code);
  const std::size_t data_symbols = (message_bits + kRsSymbolBits - 1) / kRsSymbolBits;

  RsDecodeResult result;
  std::vector<std::uint8_t> data;
  data.reserve(data_symbols);
  std::size_t at = 0;
  for (std::size_t done = 0; done < data_symbols;) {
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(p.k()), data_symbols - done);
    const std::size_t len = take + static_cast<std::size_t>(p.parity());
    std::vector<std::uint8_t> block(received.begin() + static_cast<std::ptrdiff_t>(at),
                                    received.begin() + static_cast<std::ptrdiff_t>(at + len));
    const RsBlockResult r = rs_decode_block(block, t);
    if (r.ok) {
      result.corrected_symbols += r.corrected;
    } else {
      result.ok = false;
      ++result.failed_blocks;
    }
    data.insert(data.end(), block.begin(), block.begin() + static_cast<std::ptrdiff_t>(take));
    at += len;
    done += take;
  }
  result.message = unpack_symbols(data, message_bits);
  return result;
}

}  // namespace stegarmor
