#include <doctest.h>

#include <bit>

#include "matching.hpp"
#include "rng.hpp"

using namespace stereo;

namespace {

int popcount_descriptor(const CensusGrid& g, int y, int x) {
  int bits = 0;
  const std::uint64_t* d = g.descriptor(y, x);
  for (int i = 0; i < g.words_per_pixel; ++i) bits += std::popcount(d[i]);
  return bits;
}

}  // namespace

TEST_CASE("census of a constant image is all zeros") {
  const Image img(4, 5, 1, 0.7);
  const CensusGrid g = census_transform(img, 3);
  for (int y = 0; y < img.h; ++y)
    for (int x = 0; x < img.w; ++x) CHECK(popcount_descriptor(g, y, x) == 0);
}

TEST_CASE("census sees brighter neighbors") {
  Image img(3, 3, 1, 1.0);
  img.at(1, 1) = 0.5;
  const CensusGrid g = census_transform(img, 3);
  CHECK(g.bits == 8);
  CHECK(popcount_descriptor(g, 1, 1) == 8);
}

TEST_CASE("census on a single pixel: out-of-image neighbors read as zero") {
  const Image img(1, 1, 1, 0.0);
  const CensusGrid g = census_transform(img, 3);
  CHECK(popcount_descriptor(g, 0, 0) == 0);
}

TEST_CASE("census rejects even windows") {
  const Image img(3, 3, 1, 0.5);
  CHECK_THROWS_AS(census_transform(img, 4), ConfigError);
}

TEST_CASE("identical images match at d=0") {
  Rng rng(3);
  Image img(6, 8, 1, 0.0);
  for (double& v : img.v) v = rng.uniform();
  MatchConfig cfg;
  cfg.d_max = 4;
  const CostVolume v = build_cost_volume(img, img, cfg);
  for (int y = 0; y < v.h; ++y)
    for (int x = 0; x < v.w; ++x) CHECK(v.at(y, x, 0) == 0.0);
}

TEST_CASE("absdiff on an exact 2px shift") {
  Rng rng(5);
  Image base(4, 12, 1, 0.0);
  for (double& v : base.v) v = rng.uniform();
  Image left(4, 10, 1, 0.0);
  Image right(4, 10, 1, 0.0);
  // left pixel (y,x) matches right pixel (y,x-2)
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 10; ++x) {
      left.at(y, x) = base.at(y, x);
      right.at(y, x) = base.at(y, x + 2);
    }
  MatchConfig cfg;
  cfg.d_max = 5;
  cfg.feature = Feature::AbsDiff;
  const CostVolume v = build_cost_volume(left, right, cfg);
  for (int y = 0; y < 4; ++y)
    for (int x = 2; x < 10; ++x) CHECK(v.at(y, x, 2) == 0.0);
}

TEST_CASE("out-of-range matches cost the maximum") {
  const Image img(2, 4, 1, 0.3);
  MatchConfig cfg;
  cfg.d_max = 3;
  cfg.feature = Feature::AbsDiff;
  const CostVolume v = build_cost_volume(img, img, cfg);
  for (int y = 0; y < 2; ++y) {
    CHECK(v.at(y, 0, 1) == 1.0);
    CHECK(v.at(y, 0, 2) == 1.0);
    CHECK(v.at(y, 1, 2) == 1.0);
  }
}

TEST_CASE("shape mismatch is rejected") {
  const Image a(2, 3, 1, 0.0);
  const Image b(3, 3, 1, 0.0);
  CHECK_THROWS_AS(build_cost_volume(a, b, MatchConfig{}), ConfigError);
}

TEST_CASE("costs stay within [0, 1]") {
  Rng rng(9);
  Image left(5, 7, 1, 0.0), right(5, 7, 1, 0.0);
  for (double& v : left.v) v = rng.uniform();
  for (double& v : right.v) v = rng.uniform();
  for (const Feature feat : {Feature::Census, Feature::AbsDiff}) {
    MatchConfig cfg;
    cfg.d_max = 4;
    cfg.feature = feat;
    const CostVolume v = build_cost_volume(left, right, cfg);
    for (double e : v.data) {
      CHECK(e >= 0.0);
      CHECK(e <= 1.0);
    }
  }
}

TEST_CASE("winner-take-all recovers a pure shift with absdiff") {
  Rng rng(13);
  const int s = 3;
  Image base(4, 20 + s, 1, 0.0);
  for (double& v : base.v) v = rng.uniform();
  Image left(4, 20, 1, 0.0), right(4, 20, 1, 0.0);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 20; ++x) {
      left.at(y, x) = base.at(y, x);
      right.at(y, x) = base.at(y, x + s);
    }
  MatchConfig cfg;
  cfg.d_max = 8;
  cfg.feature = Feature::AbsDiff;
  const CostVolume v = build_cost_volume(left, right, cfg);
  for (int y = 0; y < 4; ++y)
    for (int x = s; x < 20; ++x) {
      int best = 0;
      for (int d = 1; d < cfg.d_max; ++d)
        if (v.at(y, x, d) < v.at(y, x, best)) best = d;
      CHECK(best == s);
    }
}
