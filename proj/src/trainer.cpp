#include "trainer.hpp"

#include <cmath>

#include "lga.hpp"
#include "rng.hpp"
#include "sga.hpp"

namespace stereo {

namespace {
constexpr double kBandIntensity = 0.5;
constexpr int kLgaKernel = 5;
}  // namespace

SyntheticScene make_scene(int h, int w, std::uint64_t seed, int band_width, int d_max) {
  if (h < 1 || w < 4) throw DimensionError("scene too small");
  if (d_max < 4) throw ConfigError("d_max must be >= 4");
  if (band_width < 0 || band_width >= w / 2) throw ConfigError("band must be narrower than W/2");

  Rng rng(seed);
  SyntheticScene scene;
  scene.d_max = d_max;
  scene.right = Image(h, w, 1, 0.0);
  for (double& v : scene.right.v) v = rng.uniform();

  // Two vertical blocks of constant disparity; the band sits in the second
  // block so the correct value is recoverable from both of its sides.
  const int split = w / 3;
  const int d1 = static_cast<int>(rng.uniform_int(2, d_max / 2));
  const int d2 = static_cast<int>(rng.uniform_int(2, d_max / 2));
  scene.gt = DisparityMap(h, w, 0.0, true);
  scene.left = Image(h, w, 1, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int d = x < split ? d1 : d2;
      scene.gt.at(y, x) = d;
      scene.left.at(y, x) = (x - d >= 0) ? scene.right.at(y, x - d) : rng.uniform();
    }

  scene.ambiguous_mask.assign(static_cast<std::size_t>(h) * w, 0);
  if (band_width > 0) {
    const int xb = 2 * w / 3 - band_width / 2;
    for (int y = 0; y < h; ++y)
      for (int x = xb; x < xb + band_width; ++x) {
        scene.left.at(y, x) = kBandIntensity;
        scene.ambiguous_mask[static_cast<std::size_t>(y) * w + x] = 1;
        const int xr = x - d2;
        if (xr >= 0) scene.right.at(y, xr) = kBandIntensity;
      }
  }
  return scene;
}

void TrainConfig::validate() const {
  if (sga_layers < 0 || sga_layers > 4) throw ConfigError("sga_layers must be in 0..4");
  if (steps < 1) throw ConfigError("steps must be >= 1");
  if (lr < 0.0) throw ConfigError("learning rate must be nonnegative");
}

namespace {

struct ForwardState {
  std::vector<CostVolume> layer_inputs;        // input of each SGA layer
  std::vector<SgaLayerResult> layer_results;
  LgaForward lga;
  LgaWeights lga_weights;
  RegressResult regress;
};

ForwardState run_forward(const CostVolume& volume, const LearnedParams& params, bool use_lga) {
  ForwardState st;
  CostVolume cur = volume;
  for (const auto& logits : params.sga) {
    st.layer_inputs.push_back(cur);
    st.layer_results.push_back(sga_layer(cur, logits));
    cur = st.layer_results.back().out;
  }
  if (use_lga) {
    st.lga_weights = lga_normalize(*params.lga);
    st.lga = lga_forward(cur, st.lga_weights, 2);
    cur = st.lga.out;
  }
  st.regress = disparity_regress(cur);
  return st;
}

double band_epe(const DisparityMap& pred, const SyntheticScene& scene) {
  double acc = 0.0;
  long n = 0;
  for (std::size_t i = 0; i < pred.v.size(); ++i) {
    if (!scene.ambiguous_mask[i] || !scene.gt.mask[i]) continue;
    acc += std::abs(pred.v[i] - scene.gt.v[i]);
    ++n;
  }
  return n == 0 ? 0.0 : acc / static_cast<double>(n);
}

}  // namespace

TrainResult train(const SyntheticScene& scene, const TrainConfig& cfg, const TrainCallback& callback) {
  cfg.validate();

  MatchConfig match;
  match.d_max = scene.d_max;
  const CostVolume volume = build_cost_volume(scene.left, scene.right, match);

  TrainResult res;
  res.params.h = volume.h;
  res.params.w = volume.w;
  for (int l = 0; l < cfg.sga_layers; ++l)
    res.params.sga.push_back(sga_default_logits(volume.h, volume.w, 1));
  if (cfg.use_lga) res.params.lga = lga_default_logits(volume.h, volume.w, 1, kLgaKernel);

  for (int step = 0; step < cfg.steps; ++step) {
    ForwardState st;
    try {
      st = run_forward(volume, res.params, cfg.use_lga);
    } catch (const NumericError& e) {
      // Logits blown to non-finite values by an oversized step: divergence.
      throw TrainingError(std::string("diverged: ") + e.what(), step);
    }
    const SmoothL1Result sl = smooth_l1(st.regress.disparity, scene.gt);
    if (!std::isfinite(sl.loss)) throw TrainingError("loss diverged", step);

    const Metrics m = evaluate(st.regress.disparity, scene.gt, {3.0});
    TrainStep rec{step, sl.loss, m.epe, m.error_rates[0]};
    res.history.push_back(rec);
    if (callback) callback(rec);

    if (res.params.sga.empty() && !cfg.use_lga) continue;  // nothing to learn

    // Backward through the whole stack, then a plain gradient step.
    CostVolume grad = regress_backward(sl.grad, st.regress);
    if (cfg.use_lga) {
      LgaGradients lg = lga_backward(st.lga, st.lga_weights, grad);
      const LgaField gl = lga_logits_grad(st.lga_weights, lg.grad_weights);
      for (std::size_t i = 0; i < gl.data.size(); ++i) res.params.lga->data[i] -= cfg.lr * gl.data[i];
      grad = std::move(lg.grad_input);
    }
    for (int l = cfg.sga_layers - 1; l >= 0; --l) {
      SgaLayerGradients lg = sga_layer_backward(st.layer_results[static_cast<std::size_t>(l)],
                                                st.layer_inputs[static_cast<std::size_t>(l)], grad);
      auto& logits = res.params.sga[static_cast<std::size_t>(l)];
      for (int r = 0; r < 4; ++r)
        for (std::size_t i = 0; i < logits.dir[r].size(); ++i)
          logits.dir[r][i] -= cfg.lr * lg.grad_logits.dir[r][i];
      grad = std::move(lg.grad_input);
    }
  }

  // Metrics for the parameters actually returned (post final update).
  ForwardState st;
  try {
    st = run_forward(volume, res.params, cfg.use_lga);
  } catch (const NumericError& e) {
    throw TrainingError(std::string("diverged: ") + e.what(), cfg.steps);
  }
  const SmoothL1Result sl = smooth_l1(st.regress.disparity, scene.gt);
  if (!std::isfinite(sl.loss)) throw TrainingError("loss diverged", cfg.steps);
  res.final_loss = sl.loss;
  res.final_metrics = evaluate(st.regress.disparity, scene.gt, {1.0, 2.0, 3.0});
  res.ambiguous_epe = band_epe(st.regress.disparity, scene);
  return res;
}

double monotone_window_fraction(const std::vector<TrainStep>& history, int window) {
  if (static_cast<int>(history.size()) < window) return 1.0;
  long ok = 0, total = 0;
  for (std::size_t i = 0; i + window <= history.size(); ++i) {
    ++total;
    if (history[i + window - 1].loss <= history[i].loss) ++ok;
  }
  return total == 0 ? 1.0 : static_cast<double>(ok) / static_cast<double>(total);
}

}  // namespace stereo
