#include "lga.hpp"

#include <cmath>

#include "parallel.hpp"

namespace stereo {

namespace {

void check_lga(const LgaField& w, const CostVolume& v) {
  if (w.k < 1 || w.k % 2 == 0) throw ConfigError("LGA kernel size must be odd");
  if (w.h != v.h || w.w != v.w || w.f != v.f)
    throw ConfigError("LGA field shape does not match volume");
}

// One application of the filter bank.
CostVolume apply_once(const CostVolume& v, const LgaWeights& w) {
  CostVolume out = volume_new(v.h, v.w, v.d, v.f, 0.0);
  const int half = w.k / 2;
  parallel_for(static_cast<std::size_t>(v.h), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < v.w; ++x)
      for (int ff = 0; ff < v.f; ++ff) {
        const double* wp = w.data.data() + w.pixel_base(y, x, ff);
        for (int dd = 0; dd < v.d; ++dd) {
          double acc = 0.0;
          for (int ky = -half; ky <= half; ++ky) {
            const int qy = y + ky;
            if (qy < 0 || qy >= v.h) continue;
            for (int kx = -half; kx <= half; ++kx) {
              const int qx = x + kx;
              if (qx < 0 || qx >= v.w) continue;
              const int tap = (ky + half) * w.k + (kx + half);
              acc += wp[tap] * v.at(qy, qx, dd, ff);
              if (dd - 1 >= 0) acc += wp[w.k * w.k + tap] * v.at(qy, qx, dd - 1, ff);
              if (dd + 1 < v.d) acc += wp[2 * w.k * w.k + tap] * v.at(qy, qx, dd + 1, ff);
            }
          }
          out.at(y, x, dd, ff) = acc;
        }
      }
  });
  return out;
}

// Adjoint of apply_once. Gather form: for output gradient g, the input
// gradient at q collects from every pixel p whose window covers q.
CostVolume apply_adjoint(const CostVolume& g, const LgaWeights& w) {
  CostVolume out = volume_new(g.h, g.w, g.d, g.f, 0.0);
  const int half = w.k / 2;
  parallel_for(static_cast<std::size_t>(g.h), [&](std::size_t row) {
    const int qy = static_cast<int>(row);
    for (int qx = 0; qx < g.w; ++qx)
      for (int ff = 0; ff < g.f; ++ff)
        for (int dd = 0; dd < g.d; ++dd) {
          double acc = 0.0;
          for (int ky = -half; ky <= half; ++ky) {
            const int py = qy - ky;
            if (py < 0 || py >= g.h) continue;
            for (int kx = -half; kx <= half; ++kx) {
              const int px = qx - kx;
              if (px < 0 || px >= g.w) continue;
              const double* wp = w.data.data() + w.pixel_base(py, px, ff);
              const int tap = (ky + half) * w.k + (kx + half);
              acc += wp[tap] * g.at(py, px, dd, ff);
              if (dd + 1 < g.d) acc += wp[w.k * w.k + tap] * g.at(py, px, dd + 1, ff);
              if (dd - 1 >= 0) acc += wp[2 * w.k * w.k + tap] * g.at(py, px, dd - 1, ff);
            }
          }
          out.at(qy, qx, dd, ff) = acc;
        }
  });
  return out;
}

// Weight gradient of one application with input `in` and output gradient `g`.
void accumulate_weight_grads(const CostVolume& in, const CostVolume& g, const LgaWeights& w,
                             LgaField& gw) {
  const int half = w.k / 2;
  parallel_for(static_cast<std::size_t>(in.h), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < in.w; ++x)
      for (int ff = 0; ff < in.f; ++ff) {
        double* gwp = gw.data.data() + gw.pixel_base(y, x, ff);
        for (int ky = -half; ky <= half; ++ky) {
          const int qy = y + ky;
          if (qy < 0 || qy >= in.h) continue;
          for (int kx = -half; kx <= half; ++kx) {
            const int qx = x + kx;
            if (qx < 0 || qx >= in.w) continue;
            const int tap = (ky + half) * w.k + (kx + half);
            double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0;
            for (int dd = 0; dd < in.d; ++dd) {
              const double gv = g.at(y, x, dd, ff);
              acc0 += gv * in.at(qy, qx, dd, ff);
              if (dd - 1 >= 0) acc1 += gv * in.at(qy, qx, dd - 1, ff);
              if (dd + 1 < in.d) acc2 += gv * in.at(qy, qx, dd + 1, ff);
            }
            gwp[tap] += acc0;
            gwp[w.k * w.k + tap] += acc1;
            gwp[2 * w.k * w.k + tap] += acc2;
          }
        }
      }
  });
}

}  // namespace

LgaField LgaField::zeros(int h, int w, int f, int k) {
  if (h < 1 || w < 1 || f < 1) throw DimensionError("field dimensions must be >= 1");
  if (k < 1 || k % 2 == 0) throw ConfigError("LGA kernel size must be odd");
  LgaField field;
  field.h = h;
  field.w = w;
  field.f = f;
  field.k = k;
  field.data.assign(static_cast<std::size_t>(h) * w * f * 3 * k * k, 0.0);
  return field;
}

LgaWeights lga_normalize(const LgaLogits& logits) {
  LgaWeights w = LgaField::zeros(logits.h, logits.w, logits.f, logits.k);
  const int n = logits.slots();
  for (std::size_t base = 0; base < logits.data.size(); base += n) {
    double m = logits.data[base];
    for (int i = 1; i < n; ++i) m = std::max(m, logits.data[base + i]);
    if (!std::isfinite(m)) throw NumericError("LGA logits must be finite");
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = std::exp(logits.data[base + i] - m);
      w.data[base + i] = e;
      sum += e;
    }
    for (int i = 0; i < n; ++i) w.data[base + i] /= sum;
  }
  return w;
}

LgaWeights lga_identity_weights(int h, int w, int f, int k) {
  LgaWeights field = LgaField::zeros(h, w, f, k);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int ff = 0; ff < f; ++ff) field.at(y, x, ff, 0, k / 2, k / 2) = 1.0;
  return field;
}

LgaLogits lga_default_logits(int h, int w, int f, int k, double center_bias) {
  LgaLogits field = LgaField::zeros(h, w, f, k);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int ff = 0; ff < f; ++ff) field.at(y, x, ff, 0, k / 2, k / 2) = center_bias;
  return field;
}

LgaForward lga_forward(const CostVolume& v, const LgaWeights& w, int repeats) {
  check_lga(w, v);
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  LgaForward fwd;
  fwd.repeats = repeats;
  fwd.inputs.reserve(static_cast<std::size_t>(repeats));
  CostVolume cur = v;
  for (int rep = 0; rep < repeats; ++rep) {
    fwd.inputs.push_back(cur);
    cur = apply_once(cur, w);
  }
  fwd.out = std::move(cur);
  return fwd;
}

LgaGradients lga_backward(const LgaForward& tape, const LgaWeights& w, const CostVolume& grad_out) {
  if (tape.inputs.empty()) throw ConfigError("tape is empty");
  check_lga(w, tape.inputs.front());
  if (!grad_out.same_shape(tape.out)) throw ConfigError("grad_out shape does not match output");

  LgaGradients grads;
  grads.grad_weights = LgaField::zeros(w.h, w.w, w.f, w.k);
  CostVolume g = grad_out;
  for (int rep = tape.repeats - 1; rep >= 0; --rep) {
    accumulate_weight_grads(tape.inputs[static_cast<std::size_t>(rep)], g, w, grads.grad_weights);
    g = apply_adjoint(g, w);
  }
  grads.grad_input = std::move(g);
  return grads;
}

LgaField lga_logits_grad(const LgaWeights& w, const LgaField& grad_weights) {
  if (w.data.size() != grad_weights.data.size()) throw ConfigError("field shape mismatch");
  LgaField gl = LgaField::zeros(w.h, w.w, w.f, w.k);
  const int n = w.slots();
  for (std::size_t base = 0; base < w.data.size(); base += n) {
    double dot = 0.0;
    for (int i = 0; i < n; ++i) dot += w.data[base + i] * grad_weights.data[base + i];
    for (int i = 0; i < n; ++i)
      gl.data[base + i] = w.data[base + i] * (grad_weights.data[base + i] - dot);
  }
  return gl;
}

}  // namespace stereo
