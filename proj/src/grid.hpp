#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "errors.hpp"

namespace stereo {

// Grayscale image with intensities in [0,1]. Row-major (y, x, channel).
struct Image {
  int h = 0;
  int w = 0;
  int channels = 1;
  std::vector<double> v;

  Image() = default;
  Image(int height, int width, int nchan = 1, double fill = 0.0);

  double& at(int y, int x, int c = 0) { return v[(static_cast<std::size_t>(y) * w + x) * channels + c]; }
  double at(int y, int x, int c = 0) const { return v[(static_cast<std::size_t>(y) * w + x) * channels + c]; }
};

// Dense H x W x D x F grid of matching costs. Row-major in (y, x, d, f):
// d and f are innermost so scanline recurrences touch contiguous memory.
// Values are 64-bit floats throughout; gradient checks need the headroom.
struct CostVolume {
  int h = 0;
  int w = 0;
  int d = 0;
  int f = 1;
  std::vector<double> data;

  std::size_t size() const { return data.size(); }
  std::size_t index(int y, int x, int dd, int ff = 0) const {
    return ((static_cast<std::size_t>(y) * w + x) * d + dd) * f + ff;
  }
  double& at(int y, int x, int dd, int ff = 0) { return data[index(y, x, dd, ff)]; }
  double at(int y, int x, int dd, int ff = 0) const { return data[index(y, x, dd, ff)]; }

  bool same_shape(const CostVolume& o) const {
    return h == o.h && w == o.w && d == o.d && f == o.f;
  }
};

// H x W disparity field plus a per-pixel validity mask.
struct DisparityMap {
  int h = 0;
  int w = 0;
  std::vector<double> v;
  std::vector<std::uint8_t> mask;

  DisparityMap() = default;
  DisparityMap(int height, int width, double fill = 0.0, bool valid = true);

  double& at(int y, int x) { return v[static_cast<std::size_t>(y) * w + x]; }
  double at(int y, int x) const { return v[static_cast<std::size_t>(y) * w + x]; }
  bool valid(int y, int x) const { return mask[static_cast<std::size_t>(y) * w + x] != 0; }
  void set_valid(int y, int x, bool ok) { mask[static_cast<std::size_t>(y) * w + x] = ok ? 1 : 0; }
};

// The four aggregation directions: left->right, right->left, top->bottom,
// bottom->top, i.e. step vectors (0,1), (0,-1), (1,0), (-1,0) in (dy,dx).
// Enum order is the tie-breaking order everywhere a direction wins a tie.
enum class Direction : int {
  LeftToRight = 0,
  RightToLeft = 1,
  TopToBottom = 2,
  BottomToTop = 3,
};

inline constexpr std::array<Direction, 4> kDirections = {
    Direction::LeftToRight, Direction::RightToLeft,
    Direction::TopToBottom, Direction::BottomToTop};

constexpr int dir_dy(Direction r) {
  switch (r) {
    case Direction::TopToBottom: return 1;
    case Direction::BottomToTop: return -1;
    default: return 0;
  }
}

constexpr int dir_dx(Direction r) {
  switch (r) {
    case Direction::LeftToRight: return 1;
    case Direction::RightToLeft: return -1;
    default: return 0;
  }
}

const char* dir_name(Direction r);

// Fresh volume with every entry set to fill. All dims must be >= 1.
CostVolume volume_new(int h, int w, int d, int f, double fill);

// Copy of the costs at one disparity plane, returned as a D=1 volume.
CostVolume volume_slice_d(const CostVolume& v, int dd);

// Inverse of slicing: stacks D=1 slices back into a full volume.
CostVolume volume_from_slices(const std::vector<CostVolume>& slices);

}  // namespace stereo
