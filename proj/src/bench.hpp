#pragma once

#include <cstdint>

namespace stereo {

enum class FlopKind { Conv3d, Sga, Lga };

// Analytic cost model. One multiply-add counts as 2 FLOPs throughout, so
// the kinds stay comparable.
struct FlopModel {
  FlopKind kind = FlopKind::Conv3d;
  int k = 3;                 // kernel size (cubed for conv, squared for lga)
  int channels = 32;         // conv input channels
  std::uint64_t n = 1;       // output elements
  int directions = 4;        // sga
  int repeats = 2;           // lga

  void validate() const;
};

// conv3d: 2*K^3*C*N. sga: directions*(2*5*N), five weight slots per pixel
// and the shared max makes the per-element work independent of D. lga:
// repeats*2*(3*K^2)*N.
std::uint64_t flops(const FlopModel& model);

enum class TimedKernel {
  Sga,       // production forward (shared predecessor max)
  SgaNaive,  // recomputes the predecessor max per disparity, O(D) slower
  Lga,
};

struct TimingStats {
  double median_ns = 0.0;
  double p90_ns = 0.0;
};

// Wall-clock for one forward pass over an HxWxDxF volume built from a fixed
// seed. One warm-up run is excluded; needs repetitions >= 3.
TimingStats time_kernel(TimedKernel kind, int h, int w, int d, int f, int repetitions);

}  // namespace stereo
