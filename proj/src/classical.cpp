#include "classical.hpp"

#include <cmath>
#include <limits>

#include "parallel.hpp"
#include "scan_order.hpp"

namespace stereo {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kKernelSumTol = 1e-9;
}  // namespace

void SgmParams::validate() const {
  if (p1 < 0.0 || p2 < 0.0) throw ConfigError("penalties must be nonnegative");
  if (p2 < p1) throw ConfigError("p2 must be >= p1");
  if (directions.empty()) throw ConfigError("need at least one direction");
}

FilterKernel FilterKernel::box(int h, int w, int k) {
  if (k < 1 || k % 2 == 0) throw ConfigError("kernel size must be odd");
  FilterKernel kern;
  kern.h = h;
  kern.w = w;
  kern.k = k;
  kern.weights.assign(static_cast<std::size_t>(h) * w * k * k, 0.0);
  // Uniform over the in-image taps of each pixel. Border pixels get larger
  // per-tap weights so their kernels still sum to 1; clipped taps stay zero
  // because filtering never renormalizes.
  const int half = k / 2;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int taps = 0;
      for (int ky = -half; ky <= half; ++ky)
        for (int kx = -half; kx <= half; ++kx)
          if (y + ky >= 0 && y + ky < h && x + kx >= 0 && x + kx < w) ++taps;
      const double wgt = 1.0 / taps;
      for (int ky = -half; ky <= half; ++ky)
        for (int kx = -half; kx <= half; ++kx)
          if (y + ky >= 0 && y + ky < h && x + kx >= 0 && x + kx < w)
            kern.at(y, x, ky + half, kx + half) = wgt;
    }
  return kern;
}

FilterKernel FilterKernel::delta(int h, int w, int k) {
  if (k < 1 || k % 2 == 0) throw ConfigError("kernel size must be odd");
  FilterKernel kern;
  kern.h = h;
  kern.w = w;
  kern.k = k;
  kern.weights.assign(static_cast<std::size_t>(h) * w * k * k, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) kern.at(y, x, k / 2, k / 2) = 1.0;
  return kern;
}

CostVolume cost_filter(const CostVolume& v, const FilterKernel& kernel) {
  if (v.f != 1) throw ConfigError("cost_filter expects F=1");
  if (kernel.h != v.h || kernel.w != v.w) throw ConfigError("kernel grid does not match volume");
  if (kernel.k < 1 || kernel.k % 2 == 0) throw ConfigError("kernel size must be odd");
  for (int y = 0; y < v.h; ++y)
    for (int x = 0; x < v.w; ++x) {
      double sum = 0.0;
      for (int ky = 0; ky < kernel.k; ++ky)
        for (int kx = 0; kx < kernel.k; ++kx) {
          const double wgt = kernel.at(y, x, ky, kx);
          if (wgt < 0.0) throw ConfigError("kernel weights must be nonnegative");
          sum += wgt;
        }
      if (std::abs(sum - 1.0) > kKernelSumTol)
        throw ConfigError("kernel weights must sum to 1 at every pixel");
    }

  CostVolume out = volume_new(v.h, v.w, v.d, 1, 0.0);
  const int half = kernel.k / 2;
  parallel_for(static_cast<std::size_t>(v.h), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < v.w; ++x)
      for (int dd = 0; dd < v.d; ++dd) {
        double acc = 0.0;
        for (int ky = -half; ky <= half; ++ky) {
          const int qy = y + ky;
          if (qy < 0 || qy >= v.h) continue;  // clipped taps contribute zero
          for (int kx = -half; kx <= half; ++kx) {
            const int qx = x + kx;
            if (qx < 0 || qx >= v.w) continue;
            acc += kernel.at(y, x, ky + half, kx + half) * v.at(qy, qx, dd);
          }
        }
        out.at(y, x, dd) = acc;
      }
  });
  return out;
}

CostVolume sgm_aggregate_dir(const CostVolume& v, Direction r, const SgmParams& params) {
  if (v.f != 1) throw ConfigError("sgm_aggregate_dir expects F=1");
  params.validate();

  CostVolume out = volume_new(v.h, v.w, v.d, 1, 0.0);
  const ScanOrder scan(v.h, v.w, r);

  parallel_for(static_cast<std::size_t>(scan.lines()), [&](std::size_t line) {
    std::vector<double> prev(static_cast<std::size_t>(v.d));
    for (int step = 0; step < scan.steps(); ++step) {
      const auto [y, x] = scan.at(static_cast<int>(line), step);
      if (step == 0) {
        for (int dd = 0; dd < v.d; ++dd) out.at(y, x, dd) = v.at(y, x, dd);
        continue;
      }
      const auto [py, px] = scan.at(static_cast<int>(line), step - 1);
      double prev_min = kInf;
      for (int dd = 0; dd < v.d; ++dd) {
        prev[dd] = out.at(py, px, dd);
        if (prev[dd] < prev_min) prev_min = prev[dd];
      }
      for (int dd = 0; dd < v.d; ++dd) {
        double best = prev[dd];
        if (dd - 1 >= 0) best = std::min(best, prev[dd - 1] + params.p1);
        if (dd + 1 < v.d) best = std::min(best, prev[dd + 1] + params.p1);
        best = std::min(best, prev_min + params.p2);
        out.at(y, x, dd) = v.at(y, x, dd) + best;
      }
    }
  });
  return out;
}

CostVolume sgm_fuse(const std::vector<CostVolume>& volumes) {
  if (volumes.empty()) throw ConfigError("sgm_fuse needs at least one volume");
  const CostVolume& first = volumes.front();
  for (const auto& v : volumes)
    if (!v.same_shape(first)) throw ConfigError("sgm_fuse volumes must share shape");
  CostVolume out = first;
  for (std::size_t i = 1; i < volumes.size(); ++i)
    for (std::size_t j = 0; j < out.data.size(); ++j) out.data[j] += volumes[i].data[j];
  return out;
}

namespace {

double transition_penalty(int a, int b, const SgmParams& p) {
  const int jump = std::abs(a - b);
  if (jump == 0) return 0.0;
  return jump == 1 ? p.p1 : p.p2;
}

void enumerate(const ScanlineCosts& line, const SgmParams& p, int pos, double prefix,
               std::vector<int>& current, ScanlineSolution& best) {
  if (pos == line.x) {
    // Strict < keeps the first (lexicographically smallest) minimizer.
    if (prefix < best.energy) {
      best.energy = prefix;
      best.assignment = current;
    }
    return;
  }
  for (int dd = 0; dd < line.d; ++dd) {
    double e = prefix + line.at(pos, dd);
    if (pos > 0) e += transition_penalty(current[pos - 1], dd, p);
    current[pos] = dd;
    enumerate(line, p, pos + 1, e, current, best);
  }
}

}  // namespace

ScanlineSolution scanline_energy_min_exhaustive(const ScanlineCosts& line, const SgmParams& params) {
  params.validate();
  if (line.x < 1 || line.d < 1) throw ConfigError("scanline must be non-empty");
  if (line.x > 12) throw ConfigError("exhaustive mode is limited to X <= 12");
  ScanlineSolution best;
  best.energy = kInf;
  std::vector<int> current(static_cast<std::size_t>(line.x), 0);
  enumerate(line, params, 0, 0.0, current, best);
  return best;
}

ScanlineSolution scanline_energy_min_viterbi(const ScanlineCosts& line, const SgmParams& params) {
  params.validate();
  if (line.x < 1 || line.d < 1) throw ConfigError("scanline must be non-empty");

  // Suffix DP. suffix[x][d] = cheapest energy of positions x..X-1 given the
  // assignment picks d at x. Reconstructing forward with lowest-index
  // tie-breaks then yields the lexicographically smallest minimizer, the
  // same one exhaustive enumeration finds.
  const int X = line.x;
  const int D = line.d;
  std::vector<double> suffix(static_cast<std::size_t>(X) * D);
  for (int dd = 0; dd < D; ++dd) suffix[static_cast<std::size_t>(X - 1) * D + dd] = line.at(X - 1, dd);
  for (int xx = X - 2; xx >= 0; --xx)
    for (int dd = 0; dd < D; ++dd) {
      double best = kInf;
      for (int nd = 0; nd < D; ++nd) {
        const double e = transition_penalty(dd, nd, params) + suffix[static_cast<std::size_t>(xx + 1) * D + nd];
        if (e < best) best = e;
      }
      suffix[static_cast<std::size_t>(xx) * D + dd] = line.at(xx, dd) + best;
    }

  ScanlineSolution sol;
  sol.assignment.assign(static_cast<std::size_t>(X), 0);
  int pick = 0;
  for (int dd = 1; dd < D; ++dd)
    if (suffix[dd] < suffix[pick]) pick = dd;
  sol.assignment[0] = pick;
  sol.energy = suffix[pick];
  for (int xx = 1; xx < X; ++xx) {
    const int prev = sol.assignment[xx - 1];
    int next = 0;
    double best = kInf;
    for (int dd = 0; dd < D; ++dd) {
      const double e = transition_penalty(prev, dd, params) + suffix[static_cast<std::size_t>(xx) * D + dd];
      if (e < best) {
        best = e;
        next = dd;
      }
    }
    sol.assignment[xx] = next;
  }
  return sol;
}

}  // namespace stereo
