#include "grid.hpp"

namespace stereo {

Image::Image(int height, int width, int nchan, double fill) : h(height), w(width), channels(nchan) {
  if (h < 1 || w < 1 || channels < 1)
    throw DimensionError("image dimensions must be >= 1");
  v.assign(static_cast<std::size_t>(h) * w * channels, fill);
}

DisparityMap::DisparityMap(int height, int width, double fill, bool valid) : h(height), w(width) {
  if (h < 1 || w < 1) throw DimensionError("disparity map dimensions must be >= 1");
  v.assign(static_cast<std::size_t>(h) * w, fill);
  mask.assign(static_cast<std::size_t>(h) * w, valid ? 1 : 0);
}

const char* dir_name(Direction r) {
  switch (r) {
    case Direction::LeftToRight: return "left-to-right";
    case Direction::RightToLeft: return "right-to-left";
    case Direction::TopToBottom: return "top-to-bottom";
    case Direction::BottomToTop: return "bottom-to-top";
  }
  return "?";
}

CostVolume volume_new(int h, int w, int d, int f, double fill) {
  if (h < 1 || w < 1 || d < 1 || f < 1)
    throw DimensionError("cost volume dimensions must be >= 1");
  CostVolume v;
  v.h = h;
  v.w = w;
  v.d = d;
  v.f = f;
  v.data.assign(static_cast<std::size_t>(h) * w * d * f, fill);
  return v;
}

CostVolume volume_slice_d(const CostVolume& v, int dd) {
  if (dd < 0 || dd >= v.d) throw IndexError("disparity slice index out of range");
  CostVolume s = volume_new(v.h, v.w, 1, v.f, 0.0);
  for (int y = 0; y < v.h; ++y)
    for (int x = 0; x < v.w; ++x)
      for (int ff = 0; ff < v.f; ++ff) s.at(y, x, 0, ff) = v.at(y, x, dd, ff);
  return s;
}

CostVolume volume_from_slices(const std::vector<CostVolume>& slices) {
  if (slices.empty()) throw DimensionError("need at least one slice");
  const CostVolume& first = slices.front();
  for (const auto& s : slices)
    if (s.h != first.h || s.w != first.w || s.f != first.f || s.d != 1)
      throw ConfigError("slices must share shape and have D=1");
  CostVolume v = volume_new(first.h, first.w, static_cast<int>(slices.size()), first.f, 0.0);
  for (int dd = 0; dd < v.d; ++dd)
    for (int y = 0; y < v.h; ++y)
      for (int x = 0; x < v.w; ++x)
        for (int ff = 0; ff < v.f; ++ff) v.at(y, x, dd, ff) = slices[dd].at(y, x, 0, ff);
  return v;
}

}  // namespace stereo
