#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "oracles.hpp"
#include "stegarmor/channel_sim.hpp"
#include "stegarmor/dm_domain.hpp"
#include "stegarmor/errors.hpp"

using namespace stegarmor;

namespace {

CoeffImage stable_cover(std::uint64_t seed, int dim) {
  CoeffImage c = oracle::cover(seed, dim);
  for (int i = 0; i < 20; ++i) {
    CoeffImage next = recompress(c, 75);
    if (next == c) return c;
    c = std::move(next);
  }
  FAIL("recompression did not reach a fixed point");
  return c;
}

}  // namespace

TEST_CASE("domain cardinalities") {
  const std::array<std::size_t, 6> sizes = {64, 35, 33, 30, 26, 21};
  for (int n = 1; n <= 6; ++n) {
    CHECK(domain_positions(n).size() == sizes[n - 1]);
    CHECK(EmbeddingDomain(n).size() == sizes[n - 1]);
  }
  CHECK_THROWS_AS(domain_positions(0), InvalidDomainIndex);
  CHECK_THROWS_AS(domain_positions(7), InvalidDomainIndex);
}

TEST_CASE("domains are counter-diagonal bands and nest") {
  for (int n = 2; n <= 6; ++n) {
    const auto pos = domain_positions(n);
    std::set<int> s(pos.begin(), pos.end());
    CHECK(s.size() == pos.size());
    for (int p = 0; p < 64; ++p) {
      const int diag = p / 8 + p % 8;
      CHECK(s.count(p) == (diag >= n - 1 && diag <= 7 ? 1U : 0U));
    }
    const auto wider = domain_positions(n - 1);
    for (int p : pos) CHECK(std::find(wider.begin(), wider.end(), p) != wider.end());
  }
}

TEST_CASE("scan order within a block is zigzag restricted to the domain") {
  const std::vector<int> e6 = {5, 12, 19, 26, 33, 40, 48, 41, 34, 27, 20,
                               13, 6, 7, 14, 21, 28, 35, 42, 49, 56};
  CHECK(domain_positions(6) == e6);
  CHECK(domain_positions(1) == std::vector<int>(kZigzag.begin(), kZigzag.end()));
}

TEST_CASE("cover sequence length and order") {
  const CoeffImage big(512, 512, ijg_quant_table(75));
  const DitherInfo d = [&] {
    DitherInfo x = modification_distances(big);
    x.xi_plus.assign(x.d_plus.size(), 1.0);
    x.xi_minus.assign(x.d_plus.size(), 1.0);
    return x;
  }();
  CHECK(build_cover_sequence(big, d, EmbeddingDomain(6)).size() == 86016);

  const CoeffImage one = oracle::cover(3, 8);
  const CoverAnalysis a = analyze_cover(one, 0.7);
  const auto seq = build_cover_sequence(one, a.dither, EmbeddingDomain(1));
  CHECK(seq.size() == 64);
  for (std::size_t i = 0; i < seq.size(); ++i) CHECK(seq[i].position == kZigzag[i]);

  const CoeffImage c = oracle::cover(4, 48);
  const CoverAnalysis ca = analyze_cover(c, 0.7);
  const auto s1 = build_cover_sequence(c, ca.dither, EmbeddingDomain(3));
  const auto s2 = build_cover_sequence(c, ca.dither, EmbeddingDomain(3));
  REQUIRE(s1.size() == s2.size());
  for (std::size_t i = 0; i < s1.size(); ++i) {
    CHECK(s1[i].block == s2[i].block);
    CHECK(s1[i].position == s2[i].position);
    CHECK(s1[i].xi_plus == s2[i].xi_plus);
    if (i > 0) CHECK(s1[i].block >= s1[i - 1].block);
  }
}

TEST_CASE("keeping every cover bit leaves a recompression-stable cover unchanged") {
  const CoeffImage c = stable_cover(6, 64);
  const CoverAnalysis a = analyze_cover(c, 0.7);
  for (int n = 1; n <= 6; ++n) {
    const auto seq = build_cover_sequence(c, a.dither, EmbeddingDomain(n));
    CHECK(apply_stego_sequence(c, seq, cover_bits(seq)) == c);
  }
}

TEST_CASE("a single flip moves one coefficient to the cheaper neighbouring interval") {
  const CoeffImage c = stable_cover(7, 32);
  const CoverAnalysis a = analyze_cover(c, 0.7);
  auto seq = build_cover_sequence(c, a.dither, EmbeddingDomain(2));
  const std::size_t idx = 17;
  seq[idx].xi_plus = 0.5;
  seq[idx].xi_minus = 2.0;
  Bits bits = cover_bits(seq);
  bits[idx] ^= 1;
  const CoeffImage s = apply_stego_sequence(c, seq, bits);
  const auto diff = coefficient_diff(c, s);
  REQUIRE(diff.count == 1);
  const std::size_t at = static_cast<std::size_t>(seq[idx].block) * 64 + seq[idx].position;
  CHECK(diff.positions[0] == at);
  CHECK(s.coeffs()[at] == seq[idx].interval + 1);

  const CoeffImage minus = apply_stego_sequence(c, seq, bits, std::vector<Direction>(seq.size(), Direction::kMinus));
  CHECK(minus.coeffs()[at] == seq[idx].interval - 1);

  CHECK_THROWS_AS(apply_stego_sequence(c, seq, Bits(seq.size() - 1)), LengthMismatch);
}

TEST_CASE("cheaper direction breaks ties toward plus") {
  CoverElement e;
  e.xi_plus = 1;
  e.xi_minus = 5;
  CHECK(cheaper_direction(e) == Direction::kPlus);
  e.xi_minus = 1;
  CHECK(cheaper_direction(e) == Direction::kPlus);
  e.xi_minus = 0.5;
  CHECK(cheaper_direction(e) == Direction::kMinus);
}

TEST_CASE("reading stego bits") {
  const CoeffImage c = oracle::cover(8, 64);
  const CoverAnalysis a = analyze_cover(c, 0.7);
  const EmbeddingDomain dom(2);
  const auto seq = build_cover_sequence(c, a.dither, dom);
  Bits bits = cover_bits(seq);
  std::mt19937_64 rng(1);
  for (auto& b : bits) {
    if (rng() % 5 == 0) b ^= 1;
  }
  const CoeffImage s = apply_stego_sequence(c, seq, bits);
  CHECK(read_stego_bits(s, dom, c.table()) == bits);

  const CoeffImage zero(40, 40, ijg_quant_table(75));
  const Bits z = read_stego_bits(zero, dom, zero.table());
  CHECK(z.size() == 25 * 35);
  CHECK(std::all_of(z.begin(), z.end(), [](auto b) { return b == 0; }));

  // Received under a finer table: values are mapped back to cover intervals.
  std::array<int, 64> twos{};
  twos.fill(2);
  CoeffImage coarse(16, 16, QuantTable(twos));
  CoeffImage fine(16, 16, QuantTable());
  for (std::size_t i = 0; i < coarse.coeffs().size(); ++i) {
    coarse.coeffs()[i] = static_cast<std::int32_t>(rng() % 21) - 10;
    fine.coeffs()[i] = 2 * coarse.coeffs()[i];
  }
  CHECK(read_stego_bits(fine, dom, coarse.table()) == read_stego_bits(coarse, dom, coarse.table()));
}
