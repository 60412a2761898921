#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lga.hpp"
#include "sga.hpp"

namespace stereo {

// Learnable state of the aggregation stack: one logit field per layer,
// optionally followed by an LGA logit field (K=5).
struct LearnedParams {
  int h = 0;
  int w = 0;
  std::vector<SgaLogits> sga;
  std::optional<LgaLogits> lga;
};

// Flat binary format: 16-byte header (magic "SAGW", u16 version, u16 layer
// count, u32 H, u32 W, little-endian) followed by raw 64-bit floats, one
// SGA field per layer in direction-major order, then the LGA field when
// present. Presence is implied by the remaining byte count. F=1 only.
void save_params(const LearnedParams& params, const std::string& path);
LearnedParams load_params(const std::string& path);

}  // namespace stereo
