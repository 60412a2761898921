#include "gradcheck.hpp"

#include <array>
#include <cmath>

#include "head.hpp"
#include "lga.hpp"
#include "rng.hpp"
#include "sga.hpp"

namespace stereo {

namespace {

constexpr double kStep = 1e-5;
constexpr double kSgaAbsTol = 1e-7, kSgaRelTol = 1e-4;
constexpr double kRegressAbsTol = 1e-9, kRegressRelTol = 1e-6;

CostVolume random_volume(int h, int w, int d, int f, Rng& rng) {
  CostVolume v = volume_new(h, w, d, f, 0.0);
  for (double& e : v.data) e = rng.uniform();
  return v;
}

SgaField random_sga_logits(int h, int w, int f, Rng& rng) {
  SgaField field = SgaField::zeros(h, w, f);
  for (auto& g : field.dir)
    for (double& e : g) e = rng.uniform(-1.0, 1.0);
  return field;
}

// Loss used by every SGA probe: sum of the fused volume.
double sga_loss(const CostVolume& v, const SgaWeights& w) {
  std::array<CostVolume, 4> outs;
  for (int ri = 0; ri < 4; ++ri) outs[ri] = sga_forward_dir_unchecked(v, w, kDirections[ri]).out;
  double acc = 0.0;
  for (const double e : sga_fuse_max(outs).out.data) acc += e;
  return acc;
}

double sga_suite(bool corrupt) {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Rng rng(seed);
    CostVolume v = random_volume(3, 4, 5, 1, rng);
    const SgaWeights w = normalize_logits(random_sga_logits(3, 4, 1, rng));

    SgaTape tape;
    tape.h = v.h;
    tape.w = v.w;
    tape.d = v.d;
    tape.f = v.f;
    std::array<CostVolume, 4> outs;
    for (int ri = 0; ri < 4; ++ri) {
      tape.dirs[ri] = sga_forward_dir(v, w, kDirections[ri]);
      outs[ri] = tape.dirs[ri].out;
    }
    tape.winner = sga_fuse_max(outs).winner;
    SgaGradients grads = sga_backward(tape, w, v, volume_new(v.h, v.w, v.d, v.f, 1.0));
    if (corrupt) grads.grad_input.data[0] += 0.05;

    CostVolume vp = v;
    for (std::size_t i = 0; i < v.data.size(); ++i) {
      const double orig = vp.data[i];
      vp.data[i] = orig + kStep;
      const double hi = sga_loss(vp, w);
      vp.data[i] = orig - kStep;
      const double lo = sga_loss(vp, w);
      vp.data[i] = orig;
      worst = std::max(worst, graded_error(grads.grad_input.data[i], (hi - lo) / (2 * kStep),
                                           kSgaAbsTol, kSgaRelTol));
    }
    SgaWeights wp = w;
    for (int r = 0; r < 4; ++r)
      for (std::size_t i = 0; i < wp.dir[r].size(); ++i) {
        const double orig = wp.dir[r][i];
        wp.dir[r][i] = orig + kStep;
        const double hi = sga_loss(v, wp);
        wp.dir[r][i] = orig - kStep;
        const double lo = sga_loss(v, wp);
        wp.dir[r][i] = orig;
        worst = std::max(worst, graded_error(grads.grad_weights.dir[r][i], (hi - lo) / (2 * kStep),
                                             kSgaAbsTol, kSgaRelTol));
      }
  }
  return worst;
}

double sga_logits_suite() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    Rng rng(seed);
    CostVolume v = random_volume(2, 3, 4, 1, rng);
    SgaLogits logits = random_sga_logits(2, 3, 1, rng);

    SgaLayerResult fwd = sga_layer(v, logits);
    const SgaLayerGradients grads =
        sga_layer_backward(fwd, v, volume_new(v.h, v.w, v.d, v.f, 1.0));

    auto loss_at = [&](const SgaLogits& l) {
      double acc = 0.0;
      for (const double e : sga_layer(v, l).out.data) acc += e;
      return acc;
    };
    for (int r = 0; r < 4; ++r)
      for (std::size_t i = 0; i < logits.dir[r].size(); ++i) {
        const double orig = logits.dir[r][i];
        logits.dir[r][i] = orig + kStep;
        const double hi = loss_at(logits);
        logits.dir[r][i] = orig - kStep;
        const double lo = loss_at(logits);
        logits.dir[r][i] = orig;
        worst = std::max(worst, graded_error(grads.grad_logits.dir[r][i], (hi - lo) / (2 * kStep),
                                             kSgaAbsTol, kSgaRelTol));
      }
  }
  return worst;
}

double lga_suite() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    Rng rng(seed);
    CostVolume v = random_volume(4, 4, 3, 1, rng);
    LgaLogits logits = LgaField::zeros(4, 4, 1, 3);
    for (double& e : logits.data) e = rng.uniform(-1.0, 1.0);
    const LgaWeights w = lga_normalize(logits);

    const LgaForward fwd = lga_forward(v, w, 2);
    const LgaGradients grads = lga_backward(fwd, w, volume_new(v.h, v.w, v.d, v.f, 1.0));

    auto loss_at = [&](const CostVolume& vol, const LgaWeights& wgt) {
      double acc = 0.0;
      for (const double e : lga_forward(vol, wgt, 2).out.data) acc += e;
      return acc;
    };
    CostVolume vp = v;
    for (std::size_t i = 0; i < v.data.size(); ++i) {
      const double orig = vp.data[i];
      vp.data[i] = orig + kStep;
      const double hi = loss_at(vp, w);
      vp.data[i] = orig - kStep;
      const double lo = loss_at(vp, w);
      vp.data[i] = orig;
      worst = std::max(worst, graded_error(grads.grad_input.data[i], (hi - lo) / (2 * kStep),
                                           kSgaAbsTol, kSgaRelTol));
    }
    LgaWeights wp = w;
    for (std::size_t i = 0; i < wp.data.size(); ++i) {
      const double orig = wp.data[i];
      wp.data[i] = orig + kStep;
      const double hi = loss_at(v, wp);
      wp.data[i] = orig - kStep;
      const double lo = loss_at(v, wp);
      wp.data[i] = orig;
      worst = std::max(worst, graded_error(grads.grad_weights.data[i], (hi - lo) / (2 * kStep),
                                           kSgaAbsTol, kSgaRelTol));
    }
  }
  return worst;
}

double regress_suite() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Rng rng(seed);
    CostVolume v = random_volume(3, 3, 6, 1, rng);
    const RegressResult res = disparity_regress(v);
    const CostVolume grads =
        regress_backward(std::vector<double>(static_cast<std::size_t>(v.h) * v.w, 1.0), res);

    auto loss_at = [&](const CostVolume& vol) {
      const RegressResult r = disparity_regress(vol);
      double acc = 0.0;
      for (const double e : r.disparity.v) acc += e;
      return acc;
    };
    CostVolume vp = v;
    for (std::size_t i = 0; i < v.data.size(); ++i) {
      const double orig = vp.data[i];
      vp.data[i] = orig + kStep;
      const double hi = loss_at(vp);
      vp.data[i] = orig - kStep;
      const double lo = loss_at(vp);
      vp.data[i] = orig;
      worst = std::max(worst, graded_error(grads.data[i], (hi - lo) / (2 * kStep),
                                           kRegressAbsTol, kRegressRelTol));
    }
  }
  return worst;
}

}  // namespace

double graded_error(double analytic, double fd, double abs_tol, double rel_tol) {
  const double scale = std::max({std::abs(analytic), std::abs(fd), abs_tol / rel_tol});
  return std::abs(analytic - fd) / scale;
}

GradcheckReport run_gradcheck(bool corrupt_backward) {
  GradcheckReport report;
  report.max_err_sga = sga_suite(corrupt_backward);
  report.max_err_sga_logits = sga_logits_suite();
  report.max_err_lga = lga_suite();
  report.max_err_regress = regress_suite();
  report.pass = report.max_err_sga <= kSgaRelTol && report.max_err_sga_logits <= kSgaRelTol &&
                report.max_err_lga <= kSgaRelTol && report.max_err_regress <= kRegressRelTol;
  return report;
}

}  // namespace stereo
