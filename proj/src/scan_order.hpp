#pragma once

#include <utility>

#include "grid.hpp"

namespace stereo {

// Scanline geometry for one aggregation direction. Horizontal directions
// sweep rows, vertical ones sweep columns; lines are mutually independent,
// which is what makes parallel-over-lines execution schedule-free.
class ScanOrder {
 public:
  ScanOrder(int h, int w, Direction r) : h_(h), w_(w), r_(r) {}

  int lines() const { return (dir_dx(r_) != 0) ? h_ : w_; }
  int steps() const { return (dir_dx(r_) != 0) ? w_ : h_; }

  // Pixel visited at `step` along `line`; step 0 is the path start.
  std::pair<int, int> at(int line, int step) const {
    switch (r_) {
      case Direction::LeftToRight: return {line, step};
      case Direction::RightToLeft: return {line, w_ - 1 - step};
      case Direction::TopToBottom: return {step, line};
      case Direction::BottomToTop: return {h_ - 1 - step, line};
    }
    return {0, 0};
  }

 private:
  int h_;
  int w_;
  Direction r_;
};

}  // namespace stereo
