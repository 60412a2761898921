#include "bench.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <vector>

#include "lga.hpp"
#include "rng.hpp"
#include "scan_order.hpp"
#include "sga.hpp"

namespace stereo {

void FlopModel::validate() const {
  if (k < 1 || channels < 1 || n < 1 || directions < 1 || repeats < 1)
    throw ConfigError("flop model counts must be positive");
}

std::uint64_t flops(const FlopModel& model) {
  model.validate();
  const auto k = static_cast<std::uint64_t>(model.k);
  switch (model.kind) {
    case FlopKind::Conv3d:
      return 2 * k * k * k * static_cast<std::uint64_t>(model.channels) * model.n;
    case FlopKind::Sga:
      return static_cast<std::uint64_t>(model.directions) * 2 * 5 * model.n;
    case FlopKind::Lga:
      return static_cast<std::uint64_t>(model.repeats) * 2 * 3 * k * k * model.n;
  }
  throw ConfigError("unknown flop kind");
}

namespace {

// Reference recurrence that pays the max-scan once per (pixel, disparity)
// instead of once per pixel; only used to show what sharing the term buys.
CostVolume sga_forward_dir_naive(const CostVolume& v, const SgaWeights& w, Direction r) {
  CostVolume out = volume_new(v.h, v.w, v.d, v.f, 0.0);
  const ScanOrder scan(v.h, v.w, r);
  const auto& wgrid = w.dir[static_cast<int>(r)];
  for (int line = 0; line < scan.lines(); ++line)
    for (int step = 0; step < scan.steps(); ++step) {
      const auto [y, x] = scan.at(line, step);
      if (step == 0) {
        for (int dd = 0; dd < v.d; ++dd)
          for (int ff = 0; ff < v.f; ++ff) out.at(y, x, dd, ff) = v.at(y, x, dd, ff);
        continue;
      }
      const auto [py, px] = scan.at(line, step - 1);
      for (int ff = 0; ff < v.f; ++ff) {
        const double* wp = wgrid.data() + w.pixel_base(y, x, ff) * 5;
        for (int dd = 0; dd < v.d; ++dd) {
          double prev_max = out.at(py, px, 0, ff);
          for (int i = 1; i < v.d; ++i) prev_max = std::max(prev_max, out.at(py, px, i, ff));
          double acc = wp[0] * v.at(y, x, dd, ff) + wp[1] * out.at(py, px, dd, ff) + wp[4] * prev_max;
          if (dd - 1 >= 0) acc += wp[2] * out.at(py, px, dd - 1, ff);
          if (dd + 1 < v.d) acc += wp[3] * out.at(py, px, dd + 1, ff);
          out.at(y, x, dd, ff) = acc;
        }
      }
    }
  return out;
}

}  // namespace

TimingStats time_kernel(TimedKernel kind, int h, int w, int d, int f, int repetitions) {
  if (repetitions < 3) throw ConfigError("need at least 3 repetitions");

  Rng rng(42);
  CostVolume v = volume_new(h, w, d, f, 0.0);
  for (double& e : v.data) e = rng.uniform();

  SgaField sga_logits = SgaField::zeros(h, w, f);
  for (auto& g : sga_logits.dir)
    for (double& e : g) e = rng.uniform(-1.0, 1.0);
  const SgaWeights sga_w = normalize_logits(sga_logits);

  LgaLogits lga_logits = LgaField::zeros(h, w, f, 5);
  for (double& e : lga_logits.data) e = rng.uniform(-1.0, 1.0);
  const LgaWeights lga_w = lga_normalize(lga_logits);

  // The sink keeps the optimizer from discarding the work.
  volatile double sink = 0.0;
  auto run_once = [&] {
    switch (kind) {
      case TimedKernel::Sga: {
        std::array<CostVolume, 4> outs;
        for (int ri = 0; ri < 4; ++ri) outs[ri] = sga_forward_dir(v, sga_w, kDirections[ri]).out;
        sink = sink + sga_fuse_max(outs).out.data[0];
        break;
      }
      case TimedKernel::SgaNaive: {
        std::array<CostVolume, 4> outs;
        for (int ri = 0; ri < 4; ++ri) outs[ri] = sga_forward_dir_naive(v, sga_w, kDirections[ri]);
        sink = sink + sga_fuse_max(outs).out.data[0];
        break;
      }
      case TimedKernel::Lga:
        sink = sink + lga_forward(v, lga_w, 2).out.data[0];
        break;
    }
  };

  run_once();  // warm-up, excluded
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(repetitions));
  for (int i = 0; i < repetitions; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    run_once();
    const auto t1 = std::chrono::steady_clock::now();
    samples.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
  }
  std::sort(samples.begin(), samples.end());

  TimingStats stats;
  const std::size_t n = samples.size();
  stats.median_ns = (n % 2 == 1) ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  const std::size_t p90 = std::min(n - 1, static_cast<std::size_t>((9 * n + 9) / 10) - 1);
  stats.p90_ns = samples[p90];
  return stats;
}

}  // namespace stereo
