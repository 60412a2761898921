#pragma once

#include <vector>

#include "grid.hpp"

namespace stereo {

// Per-pixel distribution over disparity candidates; rows sum to 1.
struct ProbabilityVolume {
  int h = 0;
  int w = 0;
  int d = 0;
  std::vector<double> data;  // (y, x, d) row-major

  double& at(int y, int x, int dd) { return data[(static_cast<std::size_t>(y) * w + x) * d + dd]; }
  double at(int y, int x, int dd) const { return data[(static_cast<std::size_t>(y) * w + x) * d + dd]; }
};

struct Metrics {
  double epe = 0.0;
  std::vector<double> thresholds;
  std::vector<double> error_rates;  // fraction of valid pixels with |err| > t
};

// Mean over feature channels, the fixed linear reduction applied before
// regression when F > 1.
CostVolume reduce_features_mean(const CostVolume& v);
CostVolume reduce_features_mean_backward(const CostVolume& grad_out, int f);

struct RegressResult {
  DisparityMap disparity;   // all pixels valid, values in [0, D-1]
  ProbabilityVolume prob;
};

// Softmax over negated costs per pixel, then the expectation of the
// disparity index: sub-pixel estimates fall out of the weighted sum.
RegressResult disparity_regress(const CostVolume& v);

// d(dhat)/dC(p,d) = -prob(p,d) * (d - dhat(p)); chain rule through the
// softmax expectation given upstream gradients per pixel.
CostVolume regress_backward(const std::vector<double>& grad_dhat, const RegressResult& tape);

struct SmoothL1Result {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d pred, per pixel; 0 where invalid
};

// Mean smooth-L1 over pixels valid in both maps: x^2/2 below 1, x - 0.5 above.
SmoothL1Result smooth_l1(const DisparityMap& pred, const DisparityMap& gt);

// EPE plus strict threshold error rates over jointly valid pixels.
Metrics evaluate(const DisparityMap& pred, const DisparityMap& gt,
                 const std::vector<double>& thresholds);

}  // namespace stereo
