#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "head.hpp"
#include "matching.hpp"
#include "weights_io.hpp"

namespace stereo {

// Synthetic stereo pair with dense ground truth and a marked textureless
// band where raw matching is uninformative.
struct SyntheticScene {
  Image left;
  Image right;
  DisparityMap gt;
  std::vector<std::uint8_t> ambiguous_mask;  // per pixel
  int d_max = 16;
};

// Deterministic per seed. The right view is random texture; the left view
// is the right view warped by a piecewise-constant disparity field (two
// vertical blocks with disparities in [2, d_max/2]). A vertical band of
// `band_width` columns is overwritten with a constant intensity in both
// views, consistently with the warp, and flagged ambiguous.
SyntheticScene make_scene(int h, int w, std::uint64_t seed, int band_width, int d_max = 16);

struct TrainConfig {
  int sga_layers = 1;   // 0..4
  bool use_lga = false;
  int steps = 100;      // >= 1
  double lr = 1000.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainStep {
  int step = 0;
  double loss = 0.0;
  double epe = 0.0;
  double rate3 = 0.0;
};

struct TrainResult {
  LearnedParams params;
  std::vector<TrainStep> history;
  Metrics final_metrics;      // over the whole image, thresholds {1,2,3}
  double final_loss = 0.0;
  double ambiguous_epe = 0.0; // EPE restricted to the textureless band
};

using TrainCallback = std::function<void(const TrainStep&)>;

// Plain gradient descent on free per-pixel logits through the full
// differentiable pipeline (cost volume -> SGA stack -> optional LGA ->
// regression -> smooth-L1 against ground truth). The cost volume is built
// once; only aggregation parameters change between steps. Non-finite loss
// aborts with a training error naming the step.
TrainResult train(const SyntheticScene& scene, const TrainConfig& cfg,
                  const TrainCallback& callback = nullptr);

// Fraction of 50-step windows whose endpoint loss does not exceed the
// window's start; the soft monotonicity gate checked by the tests.
double monotone_window_fraction(const std::vector<TrainStep>& history, int window = 50);

}  // namespace stereo
