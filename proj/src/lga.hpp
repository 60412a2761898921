#pragma once

#include <vector>

#include "grid.hpp"

namespace stereo {

// Per-pixel bank of three K x K kernels (for disparity planes d, d-1, d+1),
// per feature channel. The normalization constraint couples all 3*K*K slots
// of a pixel jointly: they sum to 1. Slot order within a pixel is
// (kernel j, ky, kx).
struct LgaField {
  int h = 0;
  int w = 0;
  int f = 1;
  int k = 5;  // odd
  std::vector<double> data;  // ((y*w + x)*f + ff)*(3*k*k) + slot

  static LgaField zeros(int h, int w, int f, int k);

  int slots() const { return 3 * k * k; }
  std::size_t pixel_base(int y, int x, int ff) const {
    return ((static_cast<std::size_t>(y) * w + x) * f + ff) * slots();
  }
  double& at(int y, int x, int ff, int j, int ky, int kx) {
    return data[pixel_base(y, x, ff) + (j * k + ky) * k + kx];
  }
  double at(int y, int x, int ff, int j, int ky, int kx) const {
    return data[pixel_base(y, x, ff) + (j * k + ky) * k + kx];
  }
};

using LgaLogits = LgaField;
using LgaWeights = LgaField;

// Joint softmax over all 3*K*K slots of each (pixel, channel).
LgaWeights lga_normalize(const LgaLogits& logits);

// Kernel 0 is a centered delta, kernels 1 and 2 are zero: exact identity.
LgaWeights lga_identity_weights(int h, int w, int f, int k);

// Logits biased towards the identity slot.
LgaLogits lga_default_logits(int h, int w, int f, int k, double center_bias = 5.0);

struct LgaForward {
  CostVolume out;
  std::vector<CostVolume> inputs;  // input of each application, for backward
  int repeats = 2;
};

// out(p,d) = sum_q w0(p,q) C(q,d) + w1(p,q) C(q,d-1) + w2(p,q) C(q,d+1),
// with out-of-image q and out-of-range d+-1 contributing zero. All disparity
// slices of a pixel share that pixel's weights. Applied `repeats` times with
// the same weights.
LgaForward lga_forward(const CostVolume& v, const LgaWeights& w, int repeats = 2);

struct LgaGradients {
  CostVolume grad_input;
  LgaField grad_weights;
};

// Adjoint of the filtering chained through every repeat; weight gradients
// accumulate grad * (the cost value each slot multiplied) across repeats.
LgaGradients lga_backward(const LgaForward& tape, const LgaWeights& w, const CostVolume& grad_out);

// Softmax Jacobian over each pixel's 3*K*K block: weight grads -> logit grads.
LgaField lga_logits_grad(const LgaWeights& w, const LgaField& grad_weights);

}  // namespace stereo
