#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "stegarmor/errors.hpp"
#include "stegarmor/stc_codec.hpp"

using namespace stegarmor;

namespace {

struct Instance {
  Bits cover;
  std::vector<double> costs;
  Bits message;
  StcParams params;
};

Instance random_instance(std::mt19937_64& rng, std::size_t max_n, int h) {
  Instance in;
  const std::size_t n = 1 + rng() % max_n;
  const std::size_t m = 1 + rng() % n;
  in.cover.resize(n);
  in.costs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    in.cover[i] = rng() & 1;
    in.costs[i] = double(rng() % 1000) / 100.0 + 0.01;
  }
  in.message.resize(m);
  for (auto& b : in.message) b = rng() & 1;
  in.params = {h, rng()};
  return in;
}

double flip_cost(const Instance& in, const Bits& y) {
  double c = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != in.cover[i]) c += in.costs[i];
  }
  return c;
}

// Row-by-row greedy: fix each syndrome bit with the first column of its run.
Bits greedy(const StcCode& code, const Bits& cover, const Bits& message) {
  Bits y = cover;
  std::size_t start = 0;
  for (std::size_t i = 0; i < message.size(); ++i) {
    if (code.syndrome(y)[i] != message[i]) y[start] ^= 1;
    start += code.width(i);
  }
  return y;
}

}  // namespace

TEST_CASE("column structure") {
  const StcCode code(1000, 300, {7, 42});
  std::size_t total = 0;
  for (std::size_t i = 0; i < 300; ++i) {
    CHECK((code.width(i) == 3 || code.width(i) == 4));
    total += code.width(i);
  }
  CHECK(total == 1000);
  for (std::size_t j = 0; j < 1000; ++j) {
    CHECK((code.pattern(j) & 1U) == 1U);
    CHECK((code.pattern(j) >> 6 & 1U) == 1U);
    CHECK(code.pattern(j) < (1U << 7));
  }
  CHECK_THROWS_AS(StcCode(10, 11, {}), CapacityExceeded);
  CHECK_THROWS_AS(StcCode(10, 5, {1, 0}), InvalidArgument);
  CHECK_THROWS_AS(StcCode(10, 5, {15, 0}), InvalidArgument);
}

TEST_CASE("Viterbi reaches the exhaustive minimum on small instances") {
  std::mt19937_64 rng(100);
  for (int trial = 0; trial < 120; ++trial) {
    const Instance in = random_instance(rng, 18, 2 + trial % 2);
    const auto r = stc_embed(in.cover, in.costs, in.message, in.params);
    const StcCode code(in.cover.size(), in.message.size(), in.params);
    CHECK(code.syndrome(r.stego) == in.message);
    CHECK(r.cost == doctest::Approx(flip_cost(in, r.stego)).epsilon(1e-12));
    const double best = oracle::stc_exhaustive(code, in.cover, in.costs, in.message);
    CHECK(std::abs(r.cost - best) <= 1e-9);
  }
}

TEST_CASE("syndrome law on larger instances") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 40; ++trial) {
    const Instance in = random_instance(rng, 4000, 2 + trial % 11);
    const auto r = stc_embed(in.cover, in.costs, in.message, in.params);
    CHECK(stc_extract(r.stego, in.message.size(), in.params) == in.message);
  }
}

TEST_CASE("uniform costs never need more flips than a greedy solver") {
  std::mt19937_64 rng(102);
  for (int trial = 0; trial < 30; ++trial) {
    Instance in = random_instance(rng, 600, 4 + trial % 5);
    std::fill(in.costs.begin(), in.costs.end(), 1.0);
    const auto r = stc_embed(in.cover, in.costs, in.message, in.params);
    const StcCode code(in.cover.size(), in.message.size(), in.params);
    const Bits g = greedy(code, in.cover, in.message);
    REQUIRE(code.syndrome(g) == in.message);
    CHECK(flip_cost(in, r.stego) <= flip_cost(in, g));
  }
}

TEST_CASE("scaling every cost leaves the solution unchanged") {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 10; ++trial) {
    Instance in = random_instance(rng, 500, 6);
    const auto a = stc_embed(in.cover, in.costs, in.message, in.params);
    for (double& c : in.costs) c *= 8.0;
    const auto b = stc_embed(in.cover, in.costs, in.message, in.params);
    CHECK(a.stego == b.stego);
    CHECK(b.cost == doctest::Approx(8 * a.cost));
  }
}

TEST_CASE("determinism and edge cases") {
  std::mt19937_64 rng(104);
  const Instance in = random_instance(rng, 300, 8);
  CHECK(stc_embed(in.cover, in.costs, in.message, in.params).stego ==
        stc_embed(in.cover, in.costs, in.message, in.params).stego);

  const auto empty = stc_embed(in.cover, in.costs, Bits{}, in.params);
  CHECK(empty.stego == in.cover);
  CHECK(empty.cost == 0.0);
  CHECK(stc_extract(in.cover, 0, in.params).empty());

  CHECK_THROWS_AS(stc_embed(Bits(3), std::vector<double>(3, 1.0), Bits(4), {}), CapacityExceeded);
  CHECK_THROWS_AS(stc_embed(Bits(3), std::vector<double>(2, 1.0), Bits(2), {}), LengthMismatch);
  CHECK_THROWS_AS(stc_extract(Bits(3), 4, {}), LengthMismatch);
}

TEST_CASE("one stego flip touches at most h syndrome bits") {
  std::mt19937_64 rng(105);
  const Instance in = random_instance(rng, 800, 5);
  const auto r = stc_embed(in.cover, in.costs, in.message, in.params);
  for (std::size_t j = 0; j < r.stego.size(); j += 7) {
    Bits y = r.stego;
    y[j] ^= 1;
    const Bits s = stc_extract(y, in.message.size(), in.params);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < s.size(); ++i) changed += s[i] != in.message[i];
    CHECK(changed >= 1);
    CHECK(changed <= 5);
  }
}

TEST_CASE("ternary embedding picks the cheaper direction") {
  CoverSequence one(1);
  one[0].cover_bit = 0;
  one[0].xi_plus = 1;
  one[0].xi_minus = 5;
  const auto r = ternary_embed(one, Bits{1}, {2, 0});
  CHECK(r.stego == Bits{1});
  CHECK(r.directions[0] == Direction::kPlus);
  CHECK(r.cost == 1.0);
  CHECK(r.changes == 1);

  one[0].xi_minus = 0.25;
  CHECK(ternary_embed(one, Bits{1}, {2, 0}).directions[0] == Direction::kMinus);
  one[0].xi_minus = 1;
  CHECK(ternary_embed(one, Bits{1}, {2, 0}).directions[0] == Direction::kPlus);
}

TEST_CASE("ternary cost equals the exhaustive ternary minimum") {
  std::mt19937_64 rng(106);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng() % 9;
    const std::size_t m = 1 + rng() % n;
    CoverSequence seq(n);
    for (auto& e : seq) {
      e.cover_bit = rng() & 1;
      e.xi_plus = double(rng() % 100) / 10.0;
      e.xi_minus = double(rng() % 100) / 10.0;
    }
    Bits msg(m);
    for (auto& b : msg) b = rng() & 1;
    const StcParams p{2 + trial % 2, rng()};
    const auto r = ternary_embed(seq, msg, p);

    double incurred = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (r.stego[i] != seq[i].cover_bit) {
        incurred += r.directions[i] == Direction::kPlus ? seq[i].xi_plus : seq[i].xi_minus;
      }
    }
    CHECK(incurred == doctest::Approx(r.cost));

    // Every element: keep, +1 or -1; either move flips parity.
    const StcCode code(n, m, p);
    double best = std::numeric_limits<double>::infinity();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= 3;
    for (std::size_t v = 0; v < total; ++v) {
      std::size_t x = v;
      Bits y(n);
      double c = 0;
      for (std::size_t i = 0; i < n; ++i, x /= 3) {
        const std::size_t move = x % 3;
        y[i] = move == 0 ? seq[i].cover_bit : static_cast<std::uint8_t>(seq[i].cover_bit ^ 1);
        c += move == 1 ? seq[i].xi_plus : move == 2 ? seq[i].xi_minus : 0.0;
      }
      if (code.syndrome(y) == msg) best = std::min(best, c);
    }
    CHECK(std::abs(r.cost - best) <= 1e-9);
  }
}
