#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include "matching.hpp"
#include "trainer.hpp"

using namespace stereo;

TEST_CASE("scenes are deterministic per seed") {
  const SyntheticScene a = make_scene(16, 24, 7, 4, 8);
  const SyntheticScene b = make_scene(16, 24, 7, 4, 8);
  CHECK(a.left.v == b.left.v);
  CHECK(a.right.v == b.right.v);
  CHECK(a.gt.v == b.gt.v);
  CHECK(a.ambiguous_mask == b.ambiguous_mask);
  const SyntheticScene c = make_scene(16, 24, 8, 4, 8);
  CHECK(a.left.v != c.left.v);
}

TEST_CASE("zero band width means no ambiguous pixels") {
  const SyntheticScene s = make_scene(16, 24, 3, 0, 8);
  for (auto m : s.ambiguous_mask) CHECK(m == 0);
}

TEST_CASE("oversized bands are rejected") {
  CHECK_THROWS_AS(make_scene(16, 24, 3, 12, 8), ConfigError);
}

TEST_CASE("the warp relation holds everywhere it is defined") {
  const SyntheticScene s = make_scene(20, 30, 5, 6, 8);
  for (int y = 0; y < s.left.h; ++y)
    for (int x = 0; x < s.left.w; ++x) {
      const int d = static_cast<int>(s.gt.at(y, x));
      CHECK(s.gt.valid(y, x));
      if (x - d >= 0 && !s.ambiguous_mask[static_cast<std::size_t>(y) * s.left.w + x])
        CHECK(s.left.at(y, x) == s.right.at(y, x - d));
    }
}

TEST_CASE("raw matching is uninformative inside the band") {
  // Reference band geometry: a 16-column band leaves a 12-column interior
  // where every census window is flat.
  const SyntheticScene s = make_scene(32, 96, 1, 16, 16);
  MatchConfig cfg;
  cfg.d_max = s.d_max;
  const CostVolume v = build_cost_volume(s.left, s.right, cfg);
  long wrong = 0, total = 0;
  for (int y = 0; y < v.h; ++y)
    for (int x = 0; x < v.w; ++x) {
      if (!s.ambiguous_mask[static_cast<std::size_t>(y) * v.w + x]) continue;
      int best = 0;
      for (int d = 1; d < v.d; ++d)
        if (v.at(y, x, d) < v.at(y, x, best)) best = d;
      ++total;
      if (best != static_cast<int>(s.gt.at(y, x))) ++wrong;
    }
  REQUIRE(total > 0);
  CHECK(static_cast<double>(wrong) / static_cast<double>(total) > 0.5);
}

TEST_CASE("zero learning rate leaves the logits at their initialization") {
  const SyntheticScene s = make_scene(12, 24, 3, 4, 8);
  TrainConfig cfg;
  cfg.sga_layers = 1;
  cfg.steps = 1;
  cfg.lr = 0.0;
  const TrainResult res = train(s, cfg);
  const SgaLogits init = sga_default_logits(12, 24, 1);
  REQUIRE(res.params.sga.size() == 1);
  for (int r = 0; r < 4; ++r)
    CHECK(std::memcmp(res.params.sga[0].dir[r].data(), init.dir[r].data(),
                      init.dir[r].size() * sizeof(double)) == 0);

  // More zero-rate steps change nothing either: same final metrics.
  TrainConfig longer = cfg;
  longer.steps = 4;
  const TrainResult res2 = train(s, longer);
  CHECK(res2.final_metrics.epe == res.final_metrics.epe);
}

TEST_CASE("no aggregation layers means nothing moves") {
  const SyntheticScene s = make_scene(12, 24, 3, 4, 8);
  TrainConfig cfg;
  cfg.sga_layers = 0;
  cfg.use_lga = false;
  cfg.steps = 5;
  const TrainResult res = train(s, cfg);
  CHECK(res.params.sga.empty());
  for (std::size_t i = 1; i < res.history.size(); ++i)
    CHECK(res.history[i].loss == res.history[0].loss);
}

TEST_CASE("histories are bitwise reproducible") {
  const SyntheticScene s = make_scene(12, 24, 9, 4, 8);
  TrainConfig cfg;
  cfg.sga_layers = 2;
  cfg.steps = 6;
  cfg.lr = 500.0;
  const TrainResult a = train(s, cfg);
  const TrainResult b = train(s, cfg);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(std::memcmp(&a.history[i].loss, &b.history[i].loss, sizeof(double)) == 0);
    CHECK(std::memcmp(&a.history[i].epe, &b.history[i].epe, sizeof(double)) == 0);
  }
}

TEST_CASE("one step with a positive rate moves at least one logit") {
  const SyntheticScene s = make_scene(12, 24, 3, 4, 8);
  TrainConfig cfg;
  cfg.sga_layers = 1;
  cfg.steps = 1;
  cfg.lr = 100.0;
  const TrainResult res = train(s, cfg);
  const SgaLogits init = sga_default_logits(12, 24, 1);
  bool moved = false;
  for (int r = 0; r < 4 && !moved; ++r)
    for (std::size_t i = 0; i < init.dir[r].size(); ++i)
      if (res.params.sga[0].dir[r][i] != init.dir[r][i]) {
        moved = true;
        break;
      }
  CHECK(moved);
}

TEST_CASE("training reduces the loss and satisfies the soft monotonicity gate") {
  const SyntheticScene s = make_scene(16, 36, 2, 6, 8);
  TrainConfig cfg;
  cfg.sga_layers = 2;
  cfg.steps = 80;
  cfg.lr = 1000.0;
  const TrainResult res = train(s, cfg);
  CHECK(res.history.back().loss < res.history.front().loss);
  CHECK(monotone_window_fraction(res.history, 50) >= 0.9);
}

TEST_CASE("training errors carry the failing step") {
  // The runtime divergence guard cannot fire through the public pipeline
  // (softmax-normalized weights keep every aggregate a convex combination
  // of bounded costs, and saturated logits have zero gradient), so the
  // error type itself is checked here.
  const TrainingError err("diverged", 17);
  CHECK(err.step == 17);
  CHECK(std::string(err.what()).find("step 17") != std::string::npos);
}

TEST_CASE("config validation") {
  TrainConfig cfg;
  cfg.sga_layers = 5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.sga_layers = 1;
  cfg.steps = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
