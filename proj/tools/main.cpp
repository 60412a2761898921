// Command line front end. Talks to the library exclusively through the
// public C interface; all pipeline logic lives behind that boundary.

#include <cinttypes>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stereoagg/stereoagg.h"

namespace {

struct ImageDeleter {
  void operator()(sa_image* p) const { sa_image_free(p); }
};
struct DisparityDeleter {
  void operator()(sa_disparity* p) const { sa_disparity_free(p); }
};
using ImagePtr = std::unique_ptr<sa_image, ImageDeleter>;
using DisparityPtr = std::unique_ptr<sa_disparity, DisparityDeleter>;

int fail(sa_status st, const std::string& context) {
  std::fprintf(stderr, "error: %s: %s [%s]\n", context.c_str(), sa_last_error(),
               sa_status_name(st));
  return sa_status_exit_code(st);
}

ImagePtr read_image(const std::string& path, sa_status& st) {
  sa_image* raw = nullptr;
  st = sa_image_read_pgm(path.c_str(), &raw);
  return ImagePtr(raw);
}

void print_metrics(double epe, const std::vector<double>& thresholds,
                   const std::vector<double>& rates) {
  std::printf("EPE: %.6f px\n", epe);
  std::string machine = "#METRIC eval epe=" + std::to_string(epe);
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    std::printf("error rate (> %g px): %.6f\n", thresholds[i], rates[i]);
    machine += " rate" + std::to_string(static_cast<long long>(thresholds[i])) + "=" +
               std::to_string(rates[i]);
  }
  std::printf("%s\n", machine.c_str());
}

struct MatchArgs {
  std::string left, right, out, gt, weights;
  std::string method = "sgm";
  std::string feature = "census";
  int dmax = 64;
  int census_window = 5;
  double p1 = 0.1, p2 = 0.5;
  int sga_layers = 1;
  bool lga = false;
  std::vector<double> thresholds = {1.0, 2.0, 3.0};
};

int run_match(const MatchArgs& a) {
  sa_status st;
  ImagePtr left = read_image(a.left, st);
  if (!left) return fail(st, a.left);
  ImagePtr right = read_image(a.right, st);
  if (!right) return fail(st, a.right);

  sa_match_options opts;
  sa_match_options_init(&opts);
  opts.d_max = a.dmax;
  opts.method = a.method == "ga" ? SA_METHOD_GA
                                 : (a.method == "filter" ? SA_METHOD_FILTER : SA_METHOD_SGM);
  opts.feature = a.feature == "absdiff" ? SA_FEATURE_ABSDIFF : SA_FEATURE_CENSUS;
  opts.census_window = a.census_window;
  opts.p1 = a.p1;
  opts.p2 = a.p2;
  opts.sga_layers = a.sga_layers;
  opts.use_lga = a.lga ? 1 : 0;
  if (!a.weights.empty()) opts.weights_path = a.weights.c_str();

  sa_disparity* raw = nullptr;
  st = sa_match(left.get(), right.get(), &opts, &raw);
  DisparityPtr result(raw);
  if (st != SA_OK) return fail(st, "match");

  if (!a.out.empty()) {
    st = sa_disparity_write_pfm(result.get(), a.out.c_str());
    if (st != SA_OK) {
      std::remove(a.out.c_str());  // never leave partial output behind
      return fail(st, a.out);
    }
    std::printf("wrote %s\n", a.out.c_str());
  }

  if (!a.gt.empty()) {
    sa_disparity* gt_raw = nullptr;
    st = sa_disparity_read_pfm(a.gt.c_str(), &gt_raw);
    DisparityPtr gt(gt_raw);
    if (st != SA_OK) return fail(st, a.gt);
    double epe = 0.0;
    std::vector<double> rates(a.thresholds.size(), 0.0);
    st = sa_evaluate(result.get(), gt.get(), a.thresholds.data(),
                     static_cast<int>(a.thresholds.size()), &epe, rates.data());
    if (st != SA_OK) return fail(st, "evaluate");
    print_metrics(epe, a.thresholds, rates);
  }
  return 0;
}

struct EvalArgs {
  std::string pred, gt;
  std::vector<double> thresholds = {1.0, 2.0, 3.0};
};

int run_eval(const EvalArgs& a) {
  sa_disparity* pred_raw = nullptr;
  sa_status st = sa_disparity_read_pfm(a.pred.c_str(), &pred_raw);
  DisparityPtr pred(pred_raw);
  if (st != SA_OK) return fail(st, a.pred);
  sa_disparity* gt_raw = nullptr;
  st = sa_disparity_read_pfm(a.gt.c_str(), &gt_raw);
  DisparityPtr gt(gt_raw);
  if (st != SA_OK) return fail(st, a.gt);

  double epe = 0.0;
  std::vector<double> rates(a.thresholds.size(), 0.0);
  st = sa_evaluate(pred.get(), gt.get(), a.thresholds.data(),
                   static_cast<int>(a.thresholds.size()), &epe, rates.data());
  if (st != SA_OK) return fail(st, "evaluate");
  print_metrics(epe, a.thresholds, rates);
  return 0;
}

int run_gradcheck(bool corrupt) {
  sa_gradcheck_report report;
  const sa_status st = sa_gradcheck(corrupt ? 1 : 0, &report);
  if (st != SA_OK) return fail(st, "gradcheck");
  std::printf("max normalized gradient errors vs central finite differences:\n");
  std::printf("  sga backward      %.3e\n", report.max_err_sga);
  std::printf("  sga through softmax %.3e\n", report.max_err_sga_logits);
  std::printf("  lga backward      %.3e\n", report.max_err_lga);
  std::printf("  regression head   %.3e\n", report.max_err_regress);
  std::printf("#METRIC gradcheck sga=%.3e sga_logits=%.3e lga=%.3e regress=%.3e pass=%d\n",
              report.max_err_sga, report.max_err_sga_logits, report.max_err_lga,
              report.max_err_regress, report.pass);
  if (!report.pass) {
    std::fprintf(stderr, "error: gradient check failed\n");
    return 3;
  }
  std::printf("gradient check passed\n");
  return 0;
}

struct TrainArgs {
  std::string out;
  int height = 64, width = 96, band = 16, dmax = 16;
  unsigned long long seed = 1;
  int sga_layers = 1;
  bool lga = false;
  int steps = 100;
  double lr = 1000.0;
};

int run_train(const TrainArgs& a) {
  sa_train_options opts;
  sa_train_options_init(&opts);
  opts.height = a.height;
  opts.width = a.width;
  opts.band_width = a.band;
  opts.d_max = a.dmax;
  opts.seed = a.seed;
  opts.sga_layers = a.sga_layers;
  opts.use_lga = a.lga ? 1 : 0;
  opts.steps = a.steps;
  opts.lr = a.lr;

  auto callback = [](int step, double loss, double epe, double rate3, void*) {
    std::printf("#METRIC train step=%d loss=%.9g epe=%.9g rate3=%.9g\n", step, loss, epe, rate3);
  };
  sa_train_summary summary;
  const sa_status st = sa_train(&opts, a.out.empty() ? nullptr : a.out.c_str(), callback,
                                nullptr, &summary);
  if (st != SA_OK) {
    if (!a.out.empty()) std::remove(a.out.c_str());
    return fail(st, "train");
  }
  std::printf("final: loss=%.6g epe=%.4f px rate1=%.4f rate2=%.4f rate3=%.4f band_epe=%.4f px\n",
              summary.final_loss, summary.final_epe, summary.final_rate1, summary.final_rate2,
              summary.final_rate3, summary.ambiguous_epe);
  std::printf("#METRIC train_final loss=%.9g epe=%.9g rate3=%.9g band_epe=%.9g\n",
              summary.final_loss, summary.final_epe, summary.final_rate3, summary.ambiguous_epe);
  if (!a.out.empty()) std::printf("wrote %s\n", a.out.c_str());
  return 0;
}

int run_bench(int reps) {
  std::printf("%-10s %-28s %16s\n", "kind", "parameters", "flops");
  struct Row {
    const char* kind;
    sa_flop_kind fk;
    int k, c;
  };
  unsigned long long sga1 = 0, lga1 = 0;
  sa_status st = sa_flops(SA_FLOP_SGA, 5, 1, 1, 4, 1, &sga1);
  if (st != SA_OK) return fail(st, "flops");
  st = sa_flops(SA_FLOP_LGA, 5, 1, 1, 4, 2, &lga1);
  if (st != SA_OK) return fail(st, "flops");
  std::printf("%-10s %-28s %16llu\n", "sga", "4 directions, 5 slots, N=1", sga1);
  std::printf("%-10s %-28s %16llu\n", "lga", "K=5, 2 repeats, N=1", lga1);
  std::printf("#METRIC flops kind=sga n=1 value=%llu\n", sga1);
  std::printf("#METRIC flops kind=lga n=1 value=%llu\n", lga1);

  const int channels[] = {32, 64, 128};
  for (const int c : channels) {
    unsigned long long conv = 0;
    st = sa_flops(SA_FLOP_CONV3D, 3, c, 1, 4, 1, &conv);
    if (st != SA_OK) return fail(st, "flops");
    char params[64];
    std::snprintf(params, sizeof params, "K=3, C=%d, N=1", c);
    std::printf("%-10s %-28s %16llu\n", "3d_conv", params, conv);
    std::printf("#METRIC flops kind=3d_conv c=%d n=1 value=%llu\n", c, conv);
  }

  std::printf("\nsga/3d_conv flop ratio (the aggregation step vs one convolution):\n");
  for (const int c : channels) {
    unsigned long long conv = 0;
    sa_flops(SA_FLOP_CONV3D, 3, c, 1, 4, 1, &conv);
    const double ratio = static_cast<double>(sga1) / static_cast<double>(conv);
    std::printf("  C=%-4d ratio=%.6f  %s 1/100\n", c, ratio, ratio < 0.01 ? "<" : ">=");
    std::printf("#METRIC ratio c=%d value=%.9f below_1_100=%d\n", c, ratio, ratio < 0.01 ? 1 : 0);
  }

  std::printf("\nwall clock, one forward pass (64x64x32x1, %d repetitions):\n", reps);
  struct TimeRow {
    const char* name;
    sa_timed_kernel kind;
  };
  const TimeRow rows[] = {{"sga", SA_TIME_SGA}, {"sga_naive", SA_TIME_SGA_NAIVE}, {"lga", SA_TIME_LGA}};
  for (const auto& row : rows) {
    double median = 0.0, p90 = 0.0;
    st = sa_time_kernel(row.kind, 64, 64, 32, 1, reps, &median, &p90);
    if (st != SA_OK) return fail(st, "timing");
    std::printf("  %-10s median=%10.0f ns  p90=%10.0f ns\n", row.name, median, p90);
    std::printf("#METRIC time kind=%s median_ns=%.0f p90_ns=%.0f\n", row.name, median, p90);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stereo matching with semi-global and local guided cost aggregation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("stereoagg ") + sa_version());

  int threads = 0;
  app.add_option("--threads", threads, "worker thread cap (0 = hardware, 1 = serial)");

  MatchArgs match_args;
  CLI::App* match = app.add_subcommand("match", "match a rectified stereo pair");
  match->add_option("left", match_args.left, "left image (PGM)")->required();
  match->add_option("right", match_args.right, "right image (PGM)")->required();
  match->add_option("--out", match_args.out, "output disparity (PFM)");
  match->add_option("--gt", match_args.gt, "ground-truth disparity (PFM) for metrics");
  match->add_option("--dmax", match_args.dmax, "disparity candidates");
  match->add_option("--method", match_args.method, "sgm | ga | filter")
      ->check(CLI::IsMember({"sgm", "ga", "filter"}));
  match->add_option("--feature", match_args.feature, "census | absdiff")
      ->check(CLI::IsMember({"census", "absdiff"}));
  match->add_option("--census-window", match_args.census_window, "census window (odd)");
  match->add_option("--p1", match_args.p1, "SGM small-step penalty");
  match->add_option("--p2", match_args.p2, "SGM jump penalty");
  match->add_option("--sga-layers", match_args.sga_layers, "GA stack depth");
  match->add_flag("--lga", match_args.lga, "append local guided aggregation");
  match->add_option("--weights", match_args.weights, "learned logits file");
  match->add_option("--thresholds", match_args.thresholds, "error-rate thresholds")
      ->delimiter(',');

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "compare two disparity maps");
  eval->add_option("pred", eval_args.pred, "predicted disparity (PFM)")->required();
  eval->add_option("gt", eval_args.gt, "ground-truth disparity (PFM)")->required();
  eval->add_option("--thresholds", eval_args.thresholds, "error-rate thresholds")->delimiter(',');

  bool corrupt = false;
  CLI::App* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient self-check");
  gradcheck->add_flag("--corrupt-backward", corrupt,
                      "deliberately break one gradient (failure-path hook)");

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "learn aggregation weights on a synthetic scene");
  train->add_option("--out", train_args.out, "weights output file");
  train->add_option("--height", train_args.height, "scene height");
  train->add_option("--width", train_args.width, "scene width");
  train->add_option("--band", train_args.band, "textureless band width");
  train->add_option("--dmax", train_args.dmax, "disparity candidates");
  train->add_option("--seed", train_args.seed, "scene seed");
  train->add_option("--sga-layers", train_args.sga_layers, "SGA layers (0..4)");
  train->add_flag("--lga", train_args.lga, "train an LGA stage as well");
  train->add_option("--steps", train_args.steps, "gradient steps");
  train->add_option("--lr", train_args.lr, "learning rate");

  int reps = 5;
  CLI::App* bench = app.add_subcommand("bench", "FLOP accounting and kernel timings");
  bench->add_option("--reps", reps, "timing repetitions (>= 3)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // 1 for any usage error, 0 for --help/--version
  }

  if (threads != 0) sa_set_threads(threads);

  if (*match) return run_match(match_args);
  if (*eval) return run_eval(eval_args);
  if (*gradcheck) return run_gradcheck(corrupt);
  if (*train) return run_train(train_args);
  if (*bench) return run_bench(reps);
  return 1;
}
