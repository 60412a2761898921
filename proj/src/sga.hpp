#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "grid.hpp"

namespace stereo {

// Per-direction field of five per-pixel, per-channel scalars. The same
// container backs the aggregation weights w0..w4, the unconstrained logits
// they are produced from, and the gradients of either.
struct SgaField {
  int h = 0;
  int w = 0;
  int f = 1;
  std::array<std::vector<double>, 4> dir;  // each ((y*w + x)*f + ff)*5 + slot

  static SgaField zeros(int h, int w, int f);

  std::size_t pixel_base(int y, int x, int ff) const {
    return (static_cast<std::size_t>(y) * w + x) * f + ff;
  }
  double& at(Direction r, int y, int x, int ff, int slot) {
    return dir[static_cast<int>(r)][pixel_base(y, x, ff) * 5 + slot];
  }
  double at(Direction r, int y, int x, int ff, int slot) const {
    return dir[static_cast<int>(r)][pixel_base(y, x, ff) * 5 + slot];
  }
  bool same_shape(const SgaField& o) const { return h == o.h && w == o.w && f == o.f; }
};

using SgaLogits = SgaField;
using SgaWeights = SgaField;

// Softmax over the five slots per (pixel, direction, channel). Output is
// strictly positive and sums to 1. Non-finite logits raise a numeric error.
SgaWeights normalize_logits(const SgaLogits& logits);

// w0 = 1, all other slots 0: the exact-identity aggregation.
SgaWeights sga_identity_weights(int h, int w, int f);

// Logits whose softmax leans on w0 (slot 0 logit = bias, rest 0).
SgaLogits sga_default_logits(int h, int w, int f, double w0_bias = 1.0);

// Forward result for one direction: the aggregated volume plus, per
// (pixel, channel), the argmax disparity of that pixel's aggregated costs
// (lowest index on ties). The argmax is what the backward recurrence needs
// to route the shared-max term.
struct SgaDirForward {
  CostVolume out;
  std::vector<std::int32_t> imax;  // (y, x, f) row-major
};

// One-direction recurrence: out(p,d) = w0*C(p,d) + w1*prev(d) + w2*prev(d-1)
// + w3*prev(d+1) + w4*max_i prev(i), with prev the already-aggregated
// predecessor along r. Path starts copy C(p,d); out-of-range d+-1 terms
// contribute zero. Weights must sum to 1 per (pixel, channel).
SgaDirForward sga_forward_dir(const CostVolume& v, const SgaWeights& w, Direction r);

// Same recurrence without the normalization check. Finite-difference
// probes perturb single weights off the simplex and still need the plain
// recurrence value, so they go through this entry point.
SgaDirForward sga_forward_dir_unchecked(const CostVolume& v, const SgaWeights& w, Direction r);

struct SgaFusion {
  CostVolume out;
  std::vector<std::uint8_t> winner;  // direction index per (y, x, d, f)
};

// Elementwise max across the four directions; ties keep the first
// direction in enum order so backward routing stays deterministic.
SgaFusion sga_fuse_max(const std::array<CostVolume, 4>& per_dir);

// Everything the backward pass reads from the forward pass.
struct SgaTape {
  int h = 0, w = 0, d = 0, f = 1;
  std::array<SgaDirForward, 4> dirs;
  std::vector<std::uint8_t> winner;
};

struct SgaGradients {
  CostVolume grad_input;
  SgaField grad_weights;
};

// Exact reverse of fuse(max) + four forward recurrences. grad_out arrives
// for the fused volume; it is routed to each direction's winning entries,
// swept backwards along every scanline, and accumulated into the input and
// weight gradients. At path starts the forward ignored the weights, so all
// five weight gradients are zero there and the input gradient uses factor 1.
SgaGradients sga_backward(const SgaTape& tape, const SgaWeights& w, const CostVolume& v,
                          const CostVolume& grad_out);

// Full layer: softmax(logits) -> four directional sweeps -> max fusion.
struct SgaLayerResult {
  CostVolume out;
  SgaTape tape;
  SgaWeights weights;
};

SgaLayerResult sga_layer(const CostVolume& v, const SgaLogits& logits);

struct SgaLayerGradients {
  CostVolume grad_input;
  SgaField grad_logits;
};

// Chains sga_backward with the softmax Jacobian to reach the logits.
SgaLayerGradients sga_layer_backward(const SgaLayerResult& fwd, const CostVolume& v,
                                     const CostVolume& grad_out);

}  // namespace stereo
