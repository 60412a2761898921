#include "stereoagg/stereoagg.h"

#include <cstring>
#include <string>

#include "bench.hpp"
#include "errors.hpp"
#include "gradcheck.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "pipeline.hpp"
#include "pnm_io.hpp"
#include "trainer.hpp"

using stereo::CostVolume;
using stereo::DisparityMap;
using stereo::Image;

struct sa_image {
  Image img;
};
struct sa_disparity {
  DisparityMap map;
};
struct sa_volume {
  CostVolume vol;
};

namespace {

thread_local std::string g_last_error;

sa_status status_of(const stereo::Error& e) {
  using stereo::ErrorKind;
  switch (e.kind()) {
    case ErrorKind::Config: return SA_ERR_CONFIG;
    case ErrorKind::Dimension: return SA_ERR_DIMENSION;
    case ErrorKind::Index: return SA_ERR_INDEX;
    case ErrorKind::Parse: return SA_ERR_PARSE;
    case ErrorKind::Io: return SA_ERR_IO;
    case ErrorKind::Numeric: return SA_ERR_NUMERIC;
    case ErrorKind::Training: return SA_ERR_DIVERGED;
  }
  return SA_ERR_UNKNOWN;
}

// Runs fn, converting exceptions into status codes + the thread-local
// message. Every API entry point funnels through here.
template <typename Fn>
sa_status guarded(Fn&& fn) {
  try {
    fn();
    return SA_OK;
  } catch (const stereo::Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SA_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown failure";
    return SA_ERR_UNKNOWN;
  }
}

sa_status fail_null() {
  g_last_error = "null argument";
  return SA_ERR_NULL_ARGUMENT;
}

stereo::MatchOptions to_core(const sa_match_options& o) {
  stereo::MatchOptions opts;
  opts.match.d_max = o.d_max;
  opts.match.feature = o.feature == SA_FEATURE_ABSDIFF ? stereo::Feature::AbsDiff
                                                       : stereo::Feature::Census;
  opts.match.census_window = o.census_window;
  switch (o.method) {
    case SA_METHOD_SGM: opts.method = stereo::Method::Sgm; break;
    case SA_METHOD_GA: opts.method = stereo::Method::Ga; break;
    case SA_METHOD_FILTER: opts.method = stereo::Method::Filter; break;
    default: throw stereo::ConfigError("unknown matching method");
  }
  opts.sgm.p1 = o.p1;
  opts.sgm.p2 = o.p2;
  opts.sga_layers = o.sga_layers;
  opts.use_lga = o.use_lga != 0;
  if (o.weights_path && o.weights_path[0] != '\0')
    opts.params = stereo::load_params(o.weights_path);
  return opts;
}

}  // namespace

extern "C" {

const char* sa_version(void) { return "0.1.0"; }

const char* sa_status_name(sa_status status) {
  switch (status) {
    case SA_OK: return "ok";
    case SA_ERR_CONFIG: return "config error";
    case SA_ERR_DIMENSION: return "dimension error";
    case SA_ERR_INDEX: return "index error";
    case SA_ERR_PARSE: return "parse error";
    case SA_ERR_IO: return "I/O error";
    case SA_ERR_NUMERIC: return "numeric error";
    case SA_ERR_DIVERGED: return "training diverged";
    case SA_ERR_NULL_ARGUMENT: return "null argument";
    case SA_ERR_UNKNOWN: return "unknown error";
  }
  return "?";
}

int sa_status_exit_code(sa_status status) {
  switch (status) {
    case SA_OK: return 0;
    case SA_ERR_CONFIG:
    case SA_ERR_DIMENSION:
    case SA_ERR_INDEX:
    case SA_ERR_NULL_ARGUMENT: return 1;
    case SA_ERR_PARSE:
    case SA_ERR_IO: return 2;
    case SA_ERR_DIVERGED: return 4;
    default: return 3;
  }
}

const char* sa_last_error(void) { return g_last_error.c_str(); }

void sa_set_threads(int n) { stereo::set_max_threads(n); }
int sa_hardware_threads(void) { return stereo::hardware_threads(); }

/* ---- images ---- */

sa_status sa_image_read_pgm(const char* path, sa_image** out) {
  if (!path || !out) return fail_null();
  return guarded([&] { *out = new sa_image{stereo::read_pgm(path)}; });
}

sa_status sa_image_write_pgm(const sa_image* img, const char* path) {
  if (!img || !path) return fail_null();
  return guarded([&] { stereo::write_pgm(img->img, path); });
}

sa_status sa_image_create(int height, int width, sa_image** out) {
  if (!out) return fail_null();
  return guarded([&] { *out = new sa_image{Image(height, width)}; });
}

sa_status sa_image_size(const sa_image* img, int* height, int* width) {
  if (!img || !height || !width) return fail_null();
  *height = img->img.h;
  *width = img->img.w;
  return SA_OK;
}

sa_status sa_image_get(const sa_image* img, int y, int x, double* value) {
  if (!img || !value) return fail_null();
  return guarded([&] {
    if (y < 0 || y >= img->img.h || x < 0 || x >= img->img.w)
      throw stereo::IndexError("pixel out of range");
    *value = img->img.at(y, x);
  });
}

sa_status sa_image_set(sa_image* img, int y, int x, double value) {
  if (!img) return fail_null();
  return guarded([&] {
    if (y < 0 || y >= img->img.h || x < 0 || x >= img->img.w)
      throw stereo::IndexError("pixel out of range");
    img->img.at(y, x) = value;
  });
}

void sa_image_free(sa_image* img) { delete img; }

/* ---- disparity maps ---- */

sa_status sa_disparity_create(int height, int width, sa_disparity** out) {
  if (!out) return fail_null();
  return guarded([&] { *out = new sa_disparity{DisparityMap(height, width)}; });
}

sa_status sa_disparity_read_pfm(const char* path, sa_disparity** out) {
  if (!path || !out) return fail_null();
  return guarded([&] { *out = new sa_disparity{stereo::read_pfm(path)}; });
}

sa_status sa_disparity_write_pfm(const sa_disparity* map, const char* path) {
  if (!map || !path) return fail_null();
  return guarded([&] { stereo::write_pfm(map->map, path); });
}

sa_status sa_disparity_size(const sa_disparity* map, int* height, int* width) {
  if (!map || !height || !width) return fail_null();
  *height = map->map.h;
  *width = map->map.w;
  return SA_OK;
}

sa_status sa_disparity_get(const sa_disparity* map, int y, int x, double* value, int* valid) {
  if (!map || !value) return fail_null();
  return guarded([&] {
    if (y < 0 || y >= map->map.h || x < 0 || x >= map->map.w)
      throw stereo::IndexError("pixel out of range");
    *value = map->map.at(y, x);
    if (valid) *valid = map->map.valid(y, x) ? 1 : 0;
  });
}

sa_status sa_disparity_set(sa_disparity* map, int y, int x, double value, int valid) {
  if (!map) return fail_null();
  return guarded([&] {
    if (y < 0 || y >= map->map.h || x < 0 || x >= map->map.w)
      throw stereo::IndexError("pixel out of range");
    map->map.at(y, x) = value;
    map->map.set_valid(y, x, valid != 0);
  });
}

void sa_disparity_free(sa_disparity* map) { delete map; }

/* ---- matching ---- */

void sa_match_options_init(sa_match_options* opts) {
  if (!opts) return;
  std::memset(opts, 0, sizeof(*opts));
  opts->d_max = 64;
  opts->method = SA_METHOD_SGM;
  opts->feature = SA_FEATURE_CENSUS;
  opts->census_window = 5;
  opts->p1 = 0.1;
  opts->p2 = 0.5;
  opts->sga_layers = 1;
  opts->use_lga = 0;
  opts->weights_path = nullptr;
}

sa_status sa_build_cost_volume(const sa_image* left, const sa_image* right,
                               const sa_match_options* opts, sa_volume** out) {
  if (!left || !right || !opts || !out) return fail_null();
  return guarded([&] {
    const stereo::MatchOptions core = to_core(*opts);
    *out = new sa_volume{stereo::build_cost_volume(left->img, right->img, core.match)};
  });
}

sa_status sa_volume_dims(const sa_volume* v, int* h, int* w, int* d, int* f) {
  if (!v || !h || !w || !d || !f) return fail_null();
  *h = v->vol.h;
  *w = v->vol.w;
  *d = v->vol.d;
  *f = v->vol.f;
  return SA_OK;
}

sa_status sa_volume_get(const sa_volume* v, int y, int x, int d, int f, double* value) {
  if (!v || !value) return fail_null();
  return guarded([&] {
    if (y < 0 || y >= v->vol.h || x < 0 || x >= v->vol.w || d < 0 || d >= v->vol.d || f < 0 ||
        f >= v->vol.f)
      throw stereo::IndexError("volume entry out of range");
    *value = v->vol.at(y, x, d, f);
  });
}

void sa_volume_free(sa_volume* v) { delete v; }

sa_status sa_match(const sa_image* left, const sa_image* right, const sa_match_options* opts,
                   sa_disparity** out) {
  if (!left || !right || !opts || !out) return fail_null();
  return guarded([&] {
    *out = new sa_disparity{stereo::run_match(left->img, right->img, to_core(*opts))};
  });
}

/* ---- evaluation ---- */

sa_status sa_evaluate(const sa_disparity* pred, const sa_disparity* gt, const double* thresholds,
                      int n_thresholds, double* epe_out, double* rates_out) {
  if (!pred || !gt || !epe_out) return fail_null();
  if (n_thresholds > 0 && (!thresholds || !rates_out)) return fail_null();
  return guarded([&] {
    const stereo::Metrics m = stereo::evaluate(
        pred->map, gt->map, std::vector<double>(thresholds, thresholds + n_thresholds));
    *epe_out = m.epe;
    for (int i = 0; i < n_thresholds; ++i) rates_out[i] = m.error_rates[static_cast<std::size_t>(i)];
  });
}

/* ---- training ---- */

void sa_train_options_init(sa_train_options* opts) {
  if (!opts) return;
  std::memset(opts, 0, sizeof(*opts));
  opts->height = 64;
  opts->width = 96;
  opts->d_max = 16;
  opts->band_width = 16;
  opts->seed = 1;
  opts->sga_layers = 1;
  opts->use_lga = 0;
  opts->steps = 100;
  opts->lr = 1000.0;
}

sa_status sa_train(const sa_train_options* opts, const char* weights_out,
                   sa_train_callback callback, void* user, sa_train_summary* summary) {
  if (!opts) return fail_null();
  return guarded([&] {
    const stereo::SyntheticScene scene =
        stereo::make_scene(opts->height, opts->width, opts->seed, opts->band_width, opts->d_max);
    stereo::TrainConfig cfg;
    cfg.sga_layers = opts->sga_layers;
    cfg.use_lga = opts->use_lga != 0;
    cfg.steps = opts->steps;
    cfg.lr = opts->lr;
    cfg.seed = opts->seed;
    stereo::TrainCallback cb;
    if (callback)
      cb = [&](const stereo::TrainStep& s) { callback(s.step, s.loss, s.epe, s.rate3, user); };
    const stereo::TrainResult res = stereo::train(scene, cfg, cb);
    if (weights_out && weights_out[0] != '\0') stereo::save_params(res.params, weights_out);
    if (summary) {
      summary->final_loss = res.final_loss;
      summary->final_epe = res.final_metrics.epe;
      summary->final_rate1 = res.final_metrics.error_rates[0];
      summary->final_rate2 = res.final_metrics.error_rates[1];
      summary->final_rate3 = res.final_metrics.error_rates[2];
      summary->ambiguous_epe = res.ambiguous_epe;
      summary->steps_run = static_cast<int>(res.history.size());
    }
  });
}

/* ---- gradcheck ---- */

sa_status sa_gradcheck(int corrupt_backward, sa_gradcheck_report* report) {
  if (!report) return fail_null();
  return guarded([&] {
    const stereo::GradcheckReport r = stereo::run_gradcheck(corrupt_backward != 0);
    report->max_err_sga = r.max_err_sga;
    report->max_err_sga_logits = r.max_err_sga_logits;
    report->max_err_lga = r.max_err_lga;
    report->max_err_regress = r.max_err_regress;
    report->pass = r.pass ? 1 : 0;
  });
}

/* ---- complexity ---- */

sa_status sa_flops(sa_flop_kind kind, int k, int channels, unsigned long long n, int directions,
                   int repeats, unsigned long long* out) {
  if (!out) return fail_null();
  return guarded([&] {
    stereo::FlopModel model;
    switch (kind) {
      case SA_FLOP_CONV3D: model.kind = stereo::FlopKind::Conv3d; break;
      case SA_FLOP_SGA: model.kind = stereo::FlopKind::Sga; break;
      case SA_FLOP_LGA: model.kind = stereo::FlopKind::Lga; break;
      default: throw stereo::ConfigError("unknown flop kind");
    }
    model.k = k;
    model.channels = channels;
    model.n = n;
    model.directions = directions;
    model.repeats = repeats;
    *out = stereo::flops(model);
  });
}

sa_status sa_time_kernel(sa_timed_kernel kind, int h, int w, int d, int f, int repetitions,
                         double* median_ns, double* p90_ns) {
  if (!median_ns || !p90_ns) return fail_null();
  return guarded([&] {
    stereo::TimedKernel k;
    switch (kind) {
      case SA_TIME_SGA: k = stereo::TimedKernel::Sga; break;
      case SA_TIME_SGA_NAIVE: k = stereo::TimedKernel::SgaNaive; break;
      case SA_TIME_LGA: k = stereo::TimedKernel::Lga; break;
      default: throw stereo::ConfigError("unknown timed kernel");
    }
    const stereo::TimingStats stats = stereo::time_kernel(k, h, w, d, f, repetitions);
    *median_ns = stats.median_ns;
    *p90_ns = stats.p90_ns;
  });
}

}  // extern "C"
