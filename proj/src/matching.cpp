#include "matching.hpp"

#include <bit>
#include <cmath>

#include "parallel.hpp"

namespace stereo {

void MatchConfig::validate() const {
  if (d_max < 2) throw ConfigError("d_max must be >= 2");
  if (feature == Feature::Census && (census_window < 3 || census_window % 2 == 0))
    throw ConfigError("census window must be odd and >= 3");
}

int CensusGrid::hamming(int y, int x, const CensusGrid& other, int oy, int ox) const {
  const std::uint64_t* a = descriptor(y, x);
  const std::uint64_t* b = other.descriptor(oy, ox);
  int dist = 0;
  for (int i = 0; i < words_per_pixel; ++i) dist += std::popcount(a[i] ^ b[i]);
  return dist;
}

CensusGrid census_transform(const Image& img, int window) {
  if (window < 3 || window % 2 == 0) throw ConfigError("census window must be odd and >= 3");
  if (img.channels != 1) throw ConfigError("census transform expects a grayscale image");

  CensusGrid g;
  g.h = img.h;
  g.w = img.w;
  g.bits = window * window - 1;
  g.words_per_pixel = (g.bits + 63) / 64;
  g.words.assign(static_cast<std::size_t>(g.h) * g.w * g.words_per_pixel, 0);

  const int half = window / 2;
  parallel_for(static_cast<std::size_t>(img.h), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < img.w; ++x) {
      std::uint64_t* dst = g.words.data() + (static_cast<std::size_t>(y) * g.w + x) * g.words_per_pixel;
      const double center = img.at(y, x);
      int bit = 0;
      for (int dy = -half; dy <= half; ++dy) {
        for (int dx = -half; dx <= half; ++dx) {
          if (dy == 0 && dx == 0) continue;
          const int ny = y + dy;
          const int nx = x + dx;
          const double neighbor =
              (ny < 0 || ny >= img.h || nx < 0 || nx >= img.w) ? 0.0 : img.at(ny, nx);
          if (neighbor > center) dst[bit / 64] |= std::uint64_t{1} << (bit % 64);
          ++bit;
        }
      }
    }
  });
  return g;
}

CostVolume build_cost_volume(const Image& left, const Image& right, const MatchConfig& cfg) {
  cfg.validate();
  if (left.h != right.h || left.w != right.w)
    throw ConfigError("left and right images must have the same shape");
  if (left.channels != 1 || right.channels != 1)
    throw ConfigError("matching expects grayscale images");

  CostVolume v = volume_new(left.h, left.w, cfg.d_max, 1, 0.0);

  if (cfg.feature == Feature::Census) {
    const CensusGrid cl = census_transform(left, cfg.census_window);
    const CensusGrid cr = census_transform(right, cfg.census_window);
    const double inv_bits = 1.0 / cl.bits;
    parallel_for(static_cast<std::size_t>(left.h), [&](std::size_t row) {
      const int y = static_cast<int>(row);
      for (int x = 0; x < left.w; ++x)
        for (int dd = 0; dd < cfg.d_max; ++dd)
          v.at(y, x, dd) = (x - dd < 0) ? 1.0 : cl.hamming(y, x, cr, y, x - dd) * inv_bits;
    });
  } else {
    parallel_for(static_cast<std::size_t>(left.h), [&](std::size_t row) {
      const int y = static_cast<int>(row);
      for (int x = 0; x < left.w; ++x)
        for (int dd = 0; dd < cfg.d_max; ++dd)
          v.at(y, x, dd) = (x - dd < 0) ? 1.0 : std::abs(left.at(y, x) - right.at(y, x - dd));
    });
  }
  return v;
}

}  // namespace stereo
