#include "sga.hpp"

#include <cmath>

#include "parallel.hpp"
#include "scan_order.hpp"

namespace stereo {

namespace {

constexpr double kWeightSumTol = 1e-12;

void check_field_shape(const SgaField& w, const CostVolume& v, const char* what) {
  if (w.h != v.h || w.w != v.w || w.f != v.f)
    throw ConfigError(std::string(what) + " field shape does not match volume");
}

void check_normalized(const SgaWeights& w, Direction r) {
  const auto& grid = w.dir[static_cast<int>(r)];
  for (std::size_t base = 0; base < grid.size(); base += 5) {
    const double sum = grid[base] + grid[base + 1] + grid[base + 2] + grid[base + 3] + grid[base + 4];
    if (std::abs(sum - 1.0) > kWeightSumTol)
      throw ConfigError("aggregation weights must sum to 1 per pixel");
  }
}

// Argmax over d of the freshly written pixel, lowest index on ties.
void record_imax(const CostVolume& out, int y, int x, int f_count, std::vector<std::int32_t>& imax) {
  for (int ff = 0; ff < f_count; ++ff) {
    int best = 0;
    double best_val = out.at(y, x, 0, ff);
    for (int dd = 1; dd < out.d; ++dd) {
      const double val = out.at(y, x, dd, ff);
      if (val > best_val) {
        best_val = val;
        best = dd;
      }
    }
    imax[(static_cast<std::size_t>(y) * out.w + x) * f_count + ff] = best;
  }
}

SgaDirForward forward_dir_impl(const CostVolume& v, const SgaWeights& w, Direction r) {
  SgaDirForward fwd;
  fwd.out = volume_new(v.h, v.w, v.d, v.f, 0.0);
  fwd.imax.assign(static_cast<std::size_t>(v.h) * v.w * v.f, 0);

  const ScanOrder scan(v.h, v.w, r);
  const auto& wgrid = w.dir[static_cast<int>(r)];

  parallel_for(static_cast<std::size_t>(scan.lines()), [&](std::size_t line) {
    for (int step = 0; step < scan.steps(); ++step) {
      const auto [y, x] = scan.at(static_cast<int>(line), step);
      if (step == 0) {
        for (int dd = 0; dd < v.d; ++dd)
          for (int ff = 0; ff < v.f; ++ff) fwd.out.at(y, x, dd, ff) = v.at(y, x, dd, ff);
        record_imax(fwd.out, y, x, v.f, fwd.imax);
        continue;
      }
      const auto [py, px] = scan.at(static_cast<int>(line), step - 1);
      for (int ff = 0; ff < v.f; ++ff) {
        const double* wp = wgrid.data() + w.pixel_base(y, x, ff) * 5;
        const std::int32_t prev_imax =
            fwd.imax[(static_cast<std::size_t>(py) * v.w + px) * v.f + ff];
        const double prev_max = fwd.out.at(py, px, prev_imax, ff);
        for (int dd = 0; dd < v.d; ++dd) {
          double acc = wp[0] * v.at(y, x, dd, ff) + wp[1] * fwd.out.at(py, px, dd, ff) +
                       wp[4] * prev_max;
          if (dd - 1 >= 0) acc += wp[2] * fwd.out.at(py, px, dd - 1, ff);
          if (dd + 1 < v.d) acc += wp[3] * fwd.out.at(py, px, dd + 1, ff);
          fwd.out.at(y, x, dd, ff) = acc;
        }
      }
      record_imax(fwd.out, y, x, v.f, fwd.imax);
    }
  });
  return fwd;
}

}  // namespace

SgaField SgaField::zeros(int h, int w, int f) {
  if (h < 1 || w < 1 || f < 1) throw DimensionError("field dimensions must be >= 1");
  SgaField field;
  field.h = h;
  field.w = w;
  field.f = f;
  for (auto& g : field.dir) g.assign(static_cast<std::size_t>(h) * w * f * 5, 0.0);
  return field;
}

SgaWeights normalize_logits(const SgaLogits& logits) {
  SgaWeights w = SgaField::zeros(logits.h, logits.w, logits.f);
  for (int r = 0; r < 4; ++r) {
    const auto& src = logits.dir[r];
    auto& dst = w.dir[r];
    for (std::size_t base = 0; base < src.size(); base += 5) {
      double m = src[base];
      for (int i = 1; i < 5; ++i) m = std::max(m, src[base + i]);
      if (!std::isfinite(m)) throw NumericError("logits must be finite");
      double sum = 0.0;
      for (int i = 0; i < 5; ++i) {
        const double e = std::exp(src[base + i] - m);
        dst[base + i] = e;
        sum += e;
      }
      for (int i = 0; i < 5; ++i) dst[base + i] /= sum;
    }
  }
  return w;
}

SgaWeights sga_identity_weights(int h, int w, int f) {
  SgaWeights field = SgaField::zeros(h, w, f);
  for (auto& g : field.dir)
    for (std::size_t base = 0; base < g.size(); base += 5) g[base] = 1.0;
  return field;
}

SgaLogits sga_default_logits(int h, int w, int f, double w0_bias) {
  SgaLogits field = SgaField::zeros(h, w, f);
  for (auto& g : field.dir)
    for (std::size_t base = 0; base < g.size(); base += 5) g[base] = w0_bias;
  return field;
}

SgaDirForward sga_forward_dir(const CostVolume& v, const SgaWeights& w, Direction r) {
  check_field_shape(w, v, "weight");
  check_normalized(w, r);
  return forward_dir_impl(v, w, r);
}

SgaDirForward sga_forward_dir_unchecked(const CostVolume& v, const SgaWeights& w, Direction r) {
  check_field_shape(w, v, "weight");
  return forward_dir_impl(v, w, r);
}

SgaFusion sga_fuse_max(const std::array<CostVolume, 4>& per_dir) {
  for (const auto& v : per_dir)
    if (!v.same_shape(per_dir[0])) throw ConfigError("fusion volumes must share shape");
  SgaFusion fusion;
  fusion.out = per_dir[0];
  fusion.winner.assign(fusion.out.data.size(), 0);
  for (int r = 1; r < 4; ++r) {
    const auto& cand = per_dir[r].data;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (cand[i] > fusion.out.data[i]) {  // strict: ties keep the earlier direction
        fusion.out.data[i] = cand[i];
        fusion.winner[i] = static_cast<std::uint8_t>(r);
      }
    }
  }
  return fusion;
}

SgaGradients sga_backward(const SgaTape& tape, const SgaWeights& w, const CostVolume& v,
                          const CostVolume& grad_out) {
  if (tape.h != v.h || tape.w != v.w || tape.d != v.d || tape.f != v.f)
    throw ConfigError("tape shape does not match volume");
  if (!grad_out.same_shape(v)) throw ConfigError("grad_out shape does not match volume");
  check_field_shape(w, v, "weight");

  SgaGradients grads;
  grads.grad_input = volume_new(v.h, v.w, v.d, v.f, 0.0);
  grads.grad_weights = SgaField::zeros(v.h, v.w, v.f);

  CostVolume gb = volume_new(v.h, v.w, v.d, v.f, 0.0);

  for (int ri = 0; ri < 4; ++ri) {
    const Direction r = kDirections[ri];
    const ScanOrder scan(v.h, v.w, r);
    const auto& agg = tape.dirs[ri].out;
    const auto& imax = tape.dirs[ri].imax;
    const auto& wgrid = w.dir[ri];
    auto& gwgrid = grads.grad_weights.dir[ri];

    parallel_for(static_cast<std::size_t>(scan.lines()), [&](std::size_t line) {
      for (int step = scan.steps() - 1; step >= 0; --step) {
        const auto [y, x] = scan.at(static_cast<int>(line), step);
        const bool last = step == scan.steps() - 1;
        int sy = 0, sx = 0;
        if (!last) {
          const auto succ = scan.at(static_cast<int>(line), step + 1);
          sy = succ.first;
          sx = succ.second;
        }
        for (int ff = 0; ff < v.f; ++ff) {
          const std::size_t pix = (static_cast<std::size_t>(y) * v.w + x) * v.f + ff;
          if (last) {
            for (int dd = 0; dd < v.d; ++dd) {
              const std::size_t i = v.index(y, x, dd, ff);
              gb.data[i] = (tape.winner[i] == ri) ? grad_out.data[i] : 0.0;
            }
          } else {
            const double* ws = wgrid.data() + w.pixel_base(sy, sx, ff) * 5;
            double succ_sum = 0.0;
            for (int dd = 0; dd < v.d; ++dd) succ_sum += gb.at(sy, sx, dd, ff);
            const std::int32_t own_imax = imax[pix];
            for (int dd = 0; dd < v.d; ++dd) {
              const std::size_t i = v.index(y, x, dd, ff);
              double acc = (tape.winner[i] == ri) ? grad_out.data[i] : 0.0;
              acc += ws[1] * gb.at(sy, sx, dd, ff);
              if (dd + 1 < v.d) acc += ws[2] * gb.at(sy, sx, dd + 1, ff);
              if (dd - 1 >= 0) acc += ws[3] * gb.at(sy, sx, dd - 1, ff);
              if (dd == own_imax) acc += ws[4] * succ_sum;
              gb.data[i] = acc;
            }
          }

          // Accumulate into input and weight gradients. Path starts used
          // neither the weights nor a predecessor, so only the pass-through
          // input gradient exists there.
          if (step == 0) {
            for (int dd = 0; dd < v.d; ++dd)
              grads.grad_input.at(y, x, dd, ff) += gb.at(y, x, dd, ff);
            continue;
          }
          const auto [py, px] = scan.at(static_cast<int>(line), step - 1);
          const double* wp = wgrid.data() + w.pixel_base(y, x, ff) * 5;
          double* gwp = gwgrid.data() + w.pixel_base(y, x, ff) * 5;
          const std::int32_t prev_imax =
              imax[(static_cast<std::size_t>(py) * v.w + px) * v.f + ff];
          const double prev_max = agg.at(py, px, prev_imax, ff);
          for (int dd = 0; dd < v.d; ++dd) {
            const double g = gb.at(y, x, dd, ff);
            grads.grad_input.at(y, x, dd, ff) += g * wp[0];
            gwp[0] += g * v.at(y, x, dd, ff);
            gwp[1] += g * agg.at(py, px, dd, ff);
            if (dd - 1 >= 0) gwp[2] += g * agg.at(py, px, dd - 1, ff);
            if (dd + 1 < v.d) gwp[3] += g * agg.at(py, px, dd + 1, ff);
            gwp[4] += g * prev_max;
          }
        }
      }
    });
  }
  return grads;
}

SgaLayerResult sga_layer(const CostVolume& v, const SgaLogits& logits) {
  check_field_shape(logits, v, "logit");
  SgaLayerResult res;
  res.weights = normalize_logits(logits);
  res.tape.h = v.h;
  res.tape.w = v.w;
  res.tape.d = v.d;
  res.tape.f = v.f;
  std::array<CostVolume, 4> outs;
  for (int ri = 0; ri < 4; ++ri) {
    res.tape.dirs[ri] = sga_forward_dir(v, res.weights, kDirections[ri]);
    outs[ri] = res.tape.dirs[ri].out;
  }
  SgaFusion fusion = sga_fuse_max(outs);
  res.out = std::move(fusion.out);
  res.tape.winner = std::move(fusion.winner);
  return res;
}

SgaLayerGradients sga_layer_backward(const SgaLayerResult& fwd, const CostVolume& v,
                                     const CostVolume& grad_out) {
  SgaGradients inner = sga_backward(fwd.tape, fwd.weights, v, grad_out);
  SgaLayerGradients out;
  out.grad_input = std::move(inner.grad_input);
  out.grad_logits = SgaField::zeros(fwd.weights.h, fwd.weights.w, fwd.weights.f);
  // Softmax Jacobian: dL/dl_i = w_i * (dL/dw_i - sum_j w_j dL/dw_j).
  for (int r = 0; r < 4; ++r) {
    const auto& wg = fwd.weights.dir[r];
    const auto& gw = inner.grad_weights.dir[r];
    auto& gl = out.grad_logits.dir[r];
    for (std::size_t base = 0; base < wg.size(); base += 5) {
      double dot = 0.0;
      for (int i = 0; i < 5; ++i) dot += wg[base + i] * gw[base + i];
      for (int i = 0; i < 5; ++i) gl[base + i] = wg[base + i] * (gw[base + i] - dot);
    }
  }
  return out;
}

}  // namespace stereo
