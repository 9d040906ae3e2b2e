#include "stegarmor/stc_codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "stegarmor/errors.hpp"

namespace stegarmor {

namespace {

constexpr int kMinHeight = 2;
constexpr int kMaxHeight = 14;

void check_params(const StcParams& p) {
  if (p.h < kMinHeight || p.h > kMaxHeight) {
    throw InvalidArgument("STC constraint height must be " + std::to_string(kMinHeight) +
                          ".." + std::to_string(kMaxHeight));
  }
}

}  // namespace

StcCode::StcCode(std::size_t cover_len, std::size_t message_len, const StcParams& params)
    : n_(cover_len), m_(message_len), h_(params.h) {
  check_params(params);
  if (m_ > n_) {
    throw CapacityExceeded("message of " + std::to_string(m_) + " bits exceeds cover of " +
                           std::to_string(n_));
  }
  if (m_ == 0) return;

  widths_.resize(m_);
  std::size_t max_width = 0;
  for (std::size_t i = 0; i < m_; ++i) {
    widths_[i] = (i + 1) * n_ / m_ - i * n_ / m_;
    max_width = std::max(max_width, widths_[i]);
  }

  std::mt19937_64 rng(params.seed);
  const std::uint32_t mask = (1U << h_) - 1U;
  const std::uint32_t required = 1U | (1U << (h_ - 1));
  submatrix_.reserve(max_width);
  while (submatrix_.size() < max_width) {
    const auto col = static_cast<std::uint32_t>(rng() & mask);
    if ((col & required) == required) submatrix_.push_back(col);
  }

  column_.resize(n_);
  row_of_.resize(n_);
  std::size_t j = 0;
  for (std::size_t i = 0; i < m_; ++i) {
    for (std::size_t c = 0; c < widths_[i]; ++c, ++j) {
      column_[j] = submatrix_[c];
      row_of_[j] = i;
    }
  }
}

Bits StcCode::syndrome(const Bits& y) const {
  if (y.size() != n_) throw LengthMismatch("stego length does not match code");
  Bits s(m_, 0);
  for (std::size_t j = 0; j < n_; ++j) {
    if (!(y[j] & 1)) continue;
    const std::uint32_t col = column_[j];
    for (int r = 0; r < h_; ++r) {
      const std::size_t row = row_of_[j] + static_cast<std::size_t>(r);
      if (row >= m_) break;
      if (col >> r & 1U) s[row] ^= 1;
    }
  }
  return s;
}

StcEmbedResult stc_embed(const Bits& cover, const std::vector<double>& flip_costs,
                         const Bits& message, const StcParams& params) {
  check_params(params);
  if (flip_costs.size() != cover.size()) {
    throw LengthMismatch("flip costs do not match cover length");
  }
  if (message.size() > cover.size()) {
    throw CapacityExceeded("message of " + std::to_string(message.size()) +
                           " bits exceeds cover of " + std::to_string(cover.size()));
  }
  if (message.empty()) return {cover, 0.0};

  const StcCode code(cover.size(), message.size(), params);
  const std::size_t n = cover.size();
  const std::size_t states = std::size_t{1} << params.h;
  const std::size_t words = (states + 63) / 64;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> cost(states, kInf);
  std::vector<double> next(states, kInf);
  cost[0] = 0.0;
  std::vector<std::uint64_t> path(n * words, 0);

  std::size_t j = 0;
  for (std::size_t i = 0; i < message.size(); ++i) {
    for (std::size_t c = 0; c < code.width(i); ++c, ++j) {
      double w = flip_costs[j];
      if (!(w >= 0.0)) throw InvalidArgument("flip costs must be nonnegative");
      w = std::min(w, kWetCost);
      const double w0 = (cover[j] & 1) ? w : 0.0;  // cost of y_j = 0
      const double w1 = (cover[j] & 1) ? 0.0 : w;  // cost of y_j = 1
      const std::uint32_t col = code.pattern(j);
      std::uint64_t* bits = path.data() + j * words;
      for (std::size_t s = 0; s < states; ++s) {
        const double keep = cost[s] + w0;
        const double flip = cost[s ^ col] + w1;
        if (flip < keep) {
          next[s] = flip;
          bits[s >> 6] |= std::uint64_t{1} << (s & 63);
        } else {
          next[s] = keep;
        }
      }
      cost.swap(next);
    }
    // Row i is complete: keep states matching message bit i and shift.
    const std::size_t half = states / 2;
    for (std::size_t s = 0; s < half; ++s) next[s] = cost[2 * s + (message[i] & 1)];
    std::fill(next.begin() + static_cast<std::ptrdiff_t>(half), next.end(), kInf);
    cost.swap(next);
  }

  const auto best = std::min_element(cost.begin(), cost.end());
  if (!std::isfinite(*best)) throw InfeasibleSyndrome("no stego vector reaches the message");

  StcEmbedResult out;
  out.cost = *best;
  out.stego.assign(n, 0);
  std::size_t state = static_cast<std::size_t>(best - cost.begin());
  j = n;
  for (std::size_t i = message.size(); i-- > 0;) {
    state = (2 * state + (message[i] & 1)) & (states - 1);
    for (std::size_t c = code.width(i); c-- > 0;) {
      --j;
      const std::uint64_t* bits = path.data() + j * words;
      const bool y = bits[state >> 6] >> (state & 63) & 1U;
      out.stego[j] = y ? 1 : 0;
      if (y) state ^= code.pattern(j);
    }
  }
  return out;
}

Bits stc_extract(const Bits& stego, std::size_t message_len, const StcParams& params) {
  check_params(params);
  if (message_len > stego.size()) {
    throw LengthMismatch("message length exceeds stego length");
  }
  if (message_len == 0) return {};
  return StcCode(stego.size(), message_len, params).syndrome(stego);
}

TernaryEmbedResult ternary_embed(const CoverSequence& elements, const Bits& message,
                                 const StcParams& params) {
  const Bits cover = cover_bits(elements);
  std::vector<double> costs(elements.size());
  for (std::size_t i = 0; i < elements.size(); ++i) {
    costs[i] = std::min(elements[i].xi_plus, elements[i].xi_minus);
  }
  auto r = stc_embed(cover, costs, message, params);
  TernaryEmbedResult out;
  out.directions.assign(elements.size(), Direction::kPlus);
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (r.stego[i] != cover[i]) {
      out.directions[i] = cheaper_direction(elements[i]);
      ++out.changes;
    }
  }
  out.stego = std::move(r.stego);
  out.cost = r.cost;
  return out;
}

}  // namespace stegarmor
