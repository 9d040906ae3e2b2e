#include "stegarmor/channel_sim.hpp"

#include "stegarmor/errors.hpp"

namespace stegarmor {

int ChannelModel::effective_quality(const CoeffImage& img) const {
  if (quality) {
    if (*quality < 1 || *quality > 100) throw InvalidQuality("channel quality outside [1,100]");
    return *quality;
  }
  if (img.quality()) return *img.quality();
  throw InvalidQuality("channel quality unknown and the cover has no IJG quality factor");
}

CoeffImage recompress(const CoeffImage& img, int quality) {
  if (quality < 1 || quality > 100) throw InvalidQuality("quality outside [1,100]");
  return compress(decompress(img), quality);
}

CoefficientDiff coefficient_diff(const CoeffImage& a, const CoeffImage& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionMismatch("images differ in size");
  }
  const bool same_table = a.table() == b.table();
  CoefficientDiff d;
  const auto& ca = a.coeffs();
  const auto& cb = b.coeffs();
  for (std::size_t i = 0; i < ca.size(); ++i) {
    std::int64_t va = ca[i];
    if (!same_table) {
      const int pos = static_cast<int>(i % kBlockArea);
      va = static_cast<std::int64_t>(
          round_half_away(double(ca[i]) * a.table()[pos] / b.table()[pos]));
    }
    if (va != cb[i]) {
      ++d.count;
      d.positions.push_back(i);
    }
  }
  return d;
}

}  // namespace stegarmor
