#include "stegarmor/robust_embedder.hpp"

#include <algorithm>
#include <cmath>

#include <boost/crc.hpp>

#include "stegarmor/dm_domain.hpp"
#include "stegarmor/errors.hpp"
#include "stegarmor/rs_codec.hpp"

namespace stegarmor {

namespace {

void validate(const EmbedConfig& cfg) {
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) throw InvalidAlpha("alpha must lie in [0,1]");
  if (!(cfg.threshold >= 0.0)) throw InvalidArgument("threshold must be nonnegative");
  if (cfg.h < 2 || cfg.h > 14) throw InvalidArgument("STC height must be 2..14");
}

Bits with_crc(const Bits& message, bool crc) {
  if (!crc) return message;
  const std::uint32_t c = crc32_bits(message);
  Bits out;
  out.reserve(message.size() + kCrcBits);
  for (int i = kCrcBits - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(c >> i & 1U));
  out.insert(out.end(), message.begin(), message.end());
  return out;
}

std::size_t payload_bits(const StegoRecipe& r) { return r.n_m + (r.crc ? kCrcBits : 0); }

std::size_t sequence_length(const CoeffImage& img, int e_n) {
  return static_cast<std::size_t>(img.block_count()) * domain_positions(e_n).size();
}

StegoRecipe base_recipe(const CoeffImage& cover, const Bits& message, const EmbedConfig& cfg) {
  StegoRecipe r;
  r.n_m = message.size();
  r.h = cfg.h;
  r.stc_seed = cfg.stc_seed;
  r.cover_qf = cover.quality() ? cover.quality() : match_ijg_quality(cover.table());
  r.cover_table = cover.table();
  r.crc = cfg.crc;
  return r;
}

struct Candidate {
  CoeffImage stego;
  Attempt attempt;
};

// Embeds `payload` at (e_n, t) and measures the error rate through the
// channel. Returns an attempt with fits == false when the code is too long.
Candidate try_setting(const CoeffImage& cover, const CoverSequence& seq, const Bits& message,
                      const Bits& payload, const StegoRecipe& recipe, int channel_q) {
  Candidate c{cover, Attempt{recipe.e_n, recipe.t, 1.0, true, 0}};
  const std::size_t code_len = rs_encoded_bits(payload.size(), recipe.t);
  if (code_len > seq.size()) {
    c.attempt.fits = false;
    return c;
  }
  const Bits code = rs_encode(payload, recipe.t);
  const auto te = ternary_embed(seq, code, StcParams{recipe.h, recipe.stc_seed});
  c.stego = apply_stego_sequence(cover, seq, te.stego, te.directions);
  c.attempt.changes = te.changes;

  const CoeffImage received = channel_q > 0 ? recompress(c.stego, channel_q) : c.stego;
  const auto got = extract(received, recipe);
  c.attempt.r_e = bit_error_rate(message, got.message);
  return c;
}

}  // namespace

std::size_t message_length_for_payload(const CoeffImage& cover, double payload) {
  if (!(payload > 0.0)) throw InvalidPayload("payload must be positive");
  const auto n = static_cast<std::size_t>(std::llround(payload * double(count_nzac(cover))));
  if (n == 0) throw InvalidPayload("payload rounds to an empty message");
  return n;
}

double bit_error_rate(const Bits& truth, const Bits& got) {
  if (truth.size() != got.size()) throw LengthMismatch("bit sequences differ in length");
  if (truth.empty()) return 0.0;
  std::size_t errors = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) errors += (truth[i] & 1) != (got[i] & 1);
  return double(errors) / double(truth.size());
}

std::uint32_t crc32_bits(const Bits& bits) {
  std::vector<unsigned char> bytes((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bytes[i / 8] |= static_cast<unsigned char>((bits[i] & 1) << (7 - i % 8));
  }
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

EmbedResult embed(const CoeffImage& cover, const Bits& message, const EmbedConfig& cfg) {
  validate(cfg);
  if (message.empty()) throw InvalidPayload("message is empty");
  const Bits payload = with_crc(message, cfg.crc);
  if (rs_encoded_bits(payload.size(), 1) > sequence_length(cover, 1)) {
    throw CapacityExceeded("message does not fit the cover even in the full-block domain at t=1");
  }
  const int channel_q = cfg.simulate_channel ? cfg.channel.effective_quality(cover) : 0;
  const CoverAnalysis analysis = analyze_cover(cover, cfg.alpha);
  const StegoRecipe base = base_recipe(cover, message, cfg);

  EmbedResult best{cover, base, {}};
  best.report.channel_quality = channel_q;
  double best_r_e = 2.0;
  for (int e_n = 1; e_n <= kDomainCount; ++e_n) {
    const EmbeddingDomain domain(e_n);
    const CoverSequence seq = build_cover_sequence(cover, analysis.dither, domain);
    for (int t = 1; t <= kRsMaxCapability; ++t) {
      StegoRecipe recipe = base;
      recipe.e_n = e_n;
      recipe.t = t;
      Candidate c = try_setting(cover, seq, message, payload, recipe, channel_q);
      best.report.attempts.push_back(c.attempt);
      if (!c.attempt.fits) continue;
      if (c.attempt.r_e < best_r_e) {
        best_r_e = c.attempt.r_e;
        best.stego = std::move(c.stego);
        best.recipe = recipe;
      }
      if (c.attempt.r_e <= cfg.threshold) {
        best.report.final = best.recipe;
        best.report.final_r_e = best_r_e;
        best.report.exhausted = false;
        return best;
      }
    }
  }
  best.report.final = best.recipe;
  best.report.final_r_e = best_r_e;
  best.report.exhausted = true;
  return best;
}

EmbedResult embed_fixed(const CoeffImage& cover, const CoverAnalysis& analysis,
                        const Bits& message, const EmbedConfig& cfg, int e_n, int t) {
  validate(cfg);
  rs_params(t);
  if (message.empty()) throw InvalidPayload("message is empty");
  const Bits payload = with_crc(message, cfg.crc);
  const int channel_q = cfg.simulate_channel ? cfg.channel.effective_quality(cover) : 0;
  StegoRecipe recipe = base_recipe(cover, message, cfg);
  recipe.e_n = e_n;
  recipe.t = t;
  const CoverSequence seq = build_cover_sequence(cover, analysis.dither, EmbeddingDomain(e_n));
  Candidate c = try_setting(cover, seq, message, payload, recipe, channel_q);
  if (!c.attempt.fits) {
    throw CapacityExceeded("encoded message does not fit domain E" + std::to_string(e_n) +
                           " at t=" + std::to_string(t));
  }
  EmbedResult r{std::move(c.stego), recipe, {}};
  r.report.attempts.push_back(c.attempt);
  r.report.final = recipe;
  r.report.final_r_e = c.attempt.r_e;
  r.report.exhausted = c.attempt.r_e > cfg.threshold;
  r.report.channel_quality = channel_q;
  return r;
}

ExtractResult extract(const CoeffImage& stego, const StegoRecipe& recipe) {
  if (recipe.n_m == 0) throw FramingError("recipe has an empty message");
  const EmbeddingDomain domain(recipe.e_n);
  const Bits seq_bits = read_stego_bits(stego, domain, recipe.cover_table);
  const std::size_t plen = payload_bits(recipe);
  const std::size_t code_len = rs_encoded_bits(plen, recipe.t);
  if (code_len > seq_bits.size()) {
    throw FramingError("recipe implies a code longer than the stego's cover sequence");
  }
  const Bits code = stc_extract(seq_bits, code_len, StcParams{recipe.h, recipe.stc_seed});
  const RsDecodeResult rs = rs_decode(code, recipe.t, plen);

  ExtractResult out;
  if (recipe.crc) {
    std::uint32_t stored = 0;
    for (int i = 0; i < kCrcBits; ++i) stored = (stored << 1) | (rs.message[i] & 1U);
    out.message.assign(rs.message.begin() + kCrcBits, rs.message.end());
    out.crc_ok = crc32_bits(out.message) == stored;
    out.ok = rs.ok && out.crc_ok;
  } else {
    out.message = rs.message;
    out.ok = rs.ok;
  }
  return out;
}

std::optional<AutoExtractResult> auto_extract(const CoeffImage& stego, std::size_t n_m, int h,
                                              std::uint64_t stc_seed,
                                              const QuantTable& cover_table) {
  StegoRecipe r;
  r.n_m = n_m;
  r.h = h;
  r.stc_seed = stc_seed;
  r.cover_table = cover_table;
  r.cover_qf = match_ijg_quality(cover_table);
  r.crc = true;
  for (int e_n = 1; e_n <= kDomainCount; ++e_n) {
    const std::size_t capacity = sequence_length(stego, e_n);
    for (int t = 1; t <= kRsMaxCapability; ++t) {
      if (rs_encoded_bits(n_m + kCrcBits, t) > capacity) continue;
      r.e_n = e_n;
      r.t = t;
      auto got = extract(stego, r);
      if (got.ok) return AutoExtractResult{std::move(got.message), e_n, t};
    }
  }
  return std::nullopt;
}

}  // namespace stegarmor
