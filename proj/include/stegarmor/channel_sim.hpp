#pragma once

// Lossy channel model: JPEG recompression with the in-repo codec.

#include <optional>
#include <vector>

#include "stegarmor/jpeg_codec.hpp"

namespace stegarmor {

struct ChannelModel {
  std::optional<int> quality;  // nullopt: channel quality unknown

  // Quality actually simulated for `img`: the channel's if known, else the
  // image's own. Throws InvalidQuality when neither is available.
  int effective_quality(const CoeffImage& img) const;
};

CoeffImage recompress(const CoeffImage& img, int quality);

struct CoefficientDiff {
  std::size_t count = 0;
  std::vector<std::size_t> positions;  // indices into CoeffImage::coeffs()
};

// Positions where round(a * qa / qb) != b. Identical tables compare directly.
CoefficientDiff coefficient_diff(const CoeffImage& a, const CoeffImage& b);

}  // namespace stegarmor
