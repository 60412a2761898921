#include "head.hpp"

#include <cmath>

#include "parallel.hpp"

namespace stereo {

CostVolume reduce_features_mean(const CostVolume& v) {
  if (v.f == 1) return v;
  CostVolume out = volume_new(v.h, v.w, v.d, 1, 0.0);
  const double inv = 1.0 / v.f;
  for (int y = 0; y < v.h; ++y)
    for (int x = 0; x < v.w; ++x)
      for (int dd = 0; dd < v.d; ++dd) {
        double acc = 0.0;
        for (int ff = 0; ff < v.f; ++ff) acc += v.at(y, x, dd, ff);
        out.at(y, x, dd) = acc * inv;
      }
  return out;
}

CostVolume reduce_features_mean_backward(const CostVolume& grad_out, int f) {
  if (grad_out.f != 1) throw ConfigError("reduction gradient must have F=1");
  if (f == 1) return grad_out;
  CostVolume grad = volume_new(grad_out.h, grad_out.w, grad_out.d, f, 0.0);
  const double inv = 1.0 / f;
  for (int y = 0; y < grad.h; ++y)
    for (int x = 0; x < grad.w; ++x)
      for (int dd = 0; dd < grad.d; ++dd)
        for (int ff = 0; ff < f; ++ff) grad.at(y, x, dd, ff) = grad_out.at(y, x, dd) * inv;
  return grad;
}

RegressResult disparity_regress(const CostVolume& v) {
  if (v.f != 1) throw ConfigError("disparity_regress expects F=1; reduce feature channels first");
  RegressResult res;
  res.disparity = DisparityMap(v.h, v.w, 0.0, true);
  res.prob.h = v.h;
  res.prob.w = v.w;
  res.prob.d = v.d;
  res.prob.data.assign(static_cast<std::size_t>(v.h) * v.w * v.d, 0.0);

  parallel_for(static_cast<std::size_t>(v.h), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < v.w; ++x) {
      // softmax over -C, shifted by the max for stability
      double m = -v.at(y, x, 0);
      for (int dd = 1; dd < v.d; ++dd) m = std::max(m, -v.at(y, x, dd));
      double sum = 0.0;
      for (int dd = 0; dd < v.d; ++dd) {
        const double e = std::exp(-v.at(y, x, dd) - m);
        res.prob.at(y, x, dd) = e;
        sum += e;
      }
      double dhat = 0.0;
      for (int dd = 0; dd < v.d; ++dd) {
        res.prob.at(y, x, dd) /= sum;
        dhat += dd * res.prob.at(y, x, dd);
      }
      res.disparity.at(y, x) = dhat;
    }
  });
  return res;
}

CostVolume regress_backward(const std::vector<double>& grad_dhat, const RegressResult& tape) {
  const int h = tape.prob.h, w = tape.prob.w, d = tape.prob.d;
  if (grad_dhat.size() != static_cast<std::size_t>(h) * w)
    throw ConfigError("gradient size does not match regression tape");
  CostVolume grad = volume_new(h, w, d, 1, 0.0);
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < w; ++x) {
      const double g = grad_dhat[static_cast<std::size_t>(y) * w + x];
      const double dhat = tape.disparity.at(y, x);
      for (int dd = 0; dd < d; ++dd)
        grad.at(y, x, dd) = -g * tape.prob.at(y, x, dd) * (dd - dhat);
    }
  });
  return grad;
}

namespace {
double smooth_l1_value(double x) { return x < 1.0 ? 0.5 * x * x : x - 0.5; }
}  // namespace

SmoothL1Result smooth_l1(const DisparityMap& pred, const DisparityMap& gt) {
  if (pred.h != gt.h || pred.w != gt.w) throw ConfigError("disparity maps must share shape");
  SmoothL1Result res;
  res.grad.assign(pred.v.size(), 0.0);
  long n = 0;
  for (std::size_t i = 0; i < pred.v.size(); ++i)
    if (pred.mask[i] && gt.mask[i]) ++n;
  if (n == 0) throw ConfigError("empty ground truth: no jointly valid pixels");

  const double inv_n = 1.0 / static_cast<double>(n);
  double loss = 0.0;
  for (std::size_t i = 0; i < pred.v.size(); ++i) {
    if (!pred.mask[i] || !gt.mask[i]) continue;
    const double e = pred.v[i] - gt.v[i];
    const double a = std::abs(e);
    loss += smooth_l1_value(a);
    const double sign = e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0);
    res.grad[i] = inv_n * sign * std::min(a, 1.0);
  }
  res.loss = loss * inv_n;
  return res;
}

Metrics evaluate(const DisparityMap& pred, const DisparityMap& gt,
                 const std::vector<double>& thresholds) {
  if (pred.h != gt.h || pred.w != gt.w) throw ConfigError("disparity maps must share shape");
  long n = 0;
  double abs_sum = 0.0;
  std::vector<long> over(thresholds.size(), 0);
  for (std::size_t i = 0; i < pred.v.size(); ++i) {
    if (!pred.mask[i] || !gt.mask[i]) continue;
    ++n;
    const double a = std::abs(pred.v[i] - gt.v[i]);
    abs_sum += a;
    for (std::size_t t = 0; t < thresholds.size(); ++t)
      if (a > thresholds[t]) ++over[t];
  }
  if (n == 0) throw ConfigError("empty ground truth: no jointly valid pixels");
  Metrics m;
  m.epe = abs_sum / static_cast<double>(n);
  m.thresholds = thresholds;
  m.error_rates.resize(thresholds.size());
  for (std::size_t t = 0; t < thresholds.size(); ++t)
    m.error_rates[t] = static_cast<double>(over[t]) / static_cast<double>(n);
  return m;
}

}  // namespace stereo
