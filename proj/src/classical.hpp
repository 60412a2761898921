#pragma once

#include <vector>

#include "grid.hpp"

namespace stereo {

// Smoothness penalties for the classical recurrence: p1 for |delta d| = 1,
// p2 for larger jumps. Requires p2 >= p1 so the jump term can never undercut
// the small-step term.
struct SgmParams {
  double p1 = 0.1;
  double p2 = 0.5;
  std::vector<Direction> directions = {kDirections.begin(), kDirections.end()};

  void validate() const;
};

// Per-pixel K x K filter; every pixel's kernel must be nonnegative and sum
// to 1 (no renormalization happens at image borders, clipped taps just drop).
struct FilterKernel {
  int h = 0;
  int w = 0;
  int k = 0;
  std::vector<double> weights;  // (y, x, ky, kx) row-major

  double& at(int y, int x, int ky, int kx) {
    return weights[((static_cast<std::size_t>(y) * w + x) * k + ky) * k + kx];
  }
  double at(int y, int x, int ky, int kx) const {
    return weights[((static_cast<std::size_t>(y) * w + x) * k + ky) * k + kx];
  }

  static FilterKernel box(int h, int w, int k);    // uniform 1/k^2 everywhere
  static FilterKernel delta(int h, int w, int k);  // center tap 1, rest 0
};

// Weighted average of each disparity slice with the pixel's kernel.
CostVolume cost_filter(const CostVolume& v, const FilterKernel& kernel);

// One-direction scanline recurrence: cost plus the cheapest of {stay,
// step +-1 with p1, any jump with min-over-d plus p2}. First pixel on each
// path copies the raw cost. No running-minimum subtraction is applied, so
// values grow along the path; 64-bit floats absorb that at desk scale.
CostVolume sgm_aggregate_dir(const CostVolume& v, Direction r, const SgmParams& params);

// Elementwise sum across per-direction volumes.
CostVolume sgm_fuse(const std::vector<CostVolume>& volumes);

// Costs along a single scanline: X positions, D candidates each.
struct ScanlineCosts {
  int x = 0;
  int d = 0;
  std::vector<double> data;  // (x, d) row-major

  double& at(int xx, int dd) { return data[static_cast<std::size_t>(xx) * d + dd]; }
  double at(int xx, int dd) const { return data[static_cast<std::size_t>(xx) * d + dd]; }
};

struct ScanlineSolution {
  std::vector<int> assignment;
  double energy = 0.0;
};

// Minimizes cost + p1*[|dd|=1] + p2*[|dd|>1] over all D^X assignments.
// Among minimizers both modes return the lexicographically smallest
// assignment, which is what "lowest disparity index wins" means here.
ScanlineSolution scanline_energy_min_exhaustive(const ScanlineCosts& line, const SgmParams& params);
ScanlineSolution scanline_energy_min_viterbi(const ScanlineCosts& line, const SgmParams& params);

}  // namespace stereo
