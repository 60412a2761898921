#pragma once

#include <cstdint>
#include <vector>

#include "grid.hpp"

namespace stereo {

enum class Feature { Census, AbsDiff };

struct MatchConfig {
  int d_max = 64;                    // number of disparity candidates, >= 2
  Feature feature = Feature::Census;
  int census_window = 5;             // odd, >= 3

  void validate() const;
};

// Per-pixel census descriptors: bit k is set iff the k-th window neighbor
// (row-major, center excluded) is strictly brighter than the center pixel.
// Neighbors outside the image compare as intensity 0.
struct CensusGrid {
  int h = 0;
  int w = 0;
  int bits = 0;             // window*window - 1
  int words_per_pixel = 0;  // ceil(bits / 64)
  std::vector<std::uint64_t> words;

  const std::uint64_t* descriptor(int y, int x) const {
    return words.data() + (static_cast<std::size_t>(y) * w + x) * words_per_pixel;
  }
  int hamming(int y, int x, const CensusGrid& other, int oy, int ox) const;
};

CensusGrid census_transform(const Image& img, int window);

// C(y,x,d) for the hypothesis that left (y,x) matches right (y,x-d).
// Census: Hamming distance normalized to [0,1] by the bit count.
// AbsDiff: |I_L(y,x) - I_R(y,x-d)|.
// Out-of-range matches (x-d < 0) cost the maximum 1.0, never less, so the
// left border cannot produce spurious zero-cost matches.
CostVolume build_cost_volume(const Image& left, const Image& right, const MatchConfig& cfg);

}  // namespace stereo
