#pragma once

#include <optional>

#include "classical.hpp"
#include "head.hpp"
#include "matching.hpp"
#include "weights_io.hpp"

namespace stereo {

enum class Method { Sgm, Ga, Filter };

// Everything `match` needs: feature/cost settings plus the chosen
// aggregation method and its knobs.
struct MatchOptions {
  MatchConfig match;
  Method method = Method::Sgm;
  SgmParams sgm;
  int sga_layers = 1;
  bool use_lga = false;
  int lga_repeats = 2;
  int filter_kernel = 5;
  std::optional<LearnedParams> params;  // learned logits; overrides defaults
};

// Full matching pipeline: cost volume -> aggregation -> soft regression.
// Deterministic for fixed inputs at any thread count.
DisparityMap run_match(const Image& left, const Image& right, const MatchOptions& opts);

}  // namespace stereo
