// Acceptance suite: every release gate in one binary, one printed line per
// criterion. Returns the number of failed criteria.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "bench.hpp"
#include "classical.hpp"
#include "head.hpp"
#include "lga.hpp"
#include "oracles.hpp"
#include "parallel.hpp"
#include "pipeline.hpp"
#include "pnm_io.hpp"
#include "rng.hpp"
#include "sga.hpp"
#include "trainer.hpp"

using namespace stereo;

namespace {

namespace fs = std::filesystem;

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

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

double fused_sum(const CostVolume& v, const SgaWeights& w) {
  std::array<CostVolume, 4> outs;
  for (int ri = 0; ri < 4; ++ri) outs[ri] = sga_forward_dir_unchecked(v, w, kDirections[ri]).out;
  double acc = 0.0;
  for (double e : sga_fuse_max(outs).out.data) acc += e;
  return acc;
}

bool report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  return pass;
}

// 1. Backward pass against central finite differences on three shapes,
//    20 seeds each, 1e-4 relative / 1e-7 absolute, under 30 seconds.
bool criterion_gradient_fidelity() {
  const auto t0 = std::chrono::steady_clock::now();
  const int shapes[3][4] = {{2, 2, 3, 1}, {4, 4, 6, 2}, {3, 5, 8, 1}};
  double worst = 0.0;
  for (const auto& s : shapes)
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      Rng rng(seed);
      const int H = s[0], W = s[1], D = s[2], F = s[3];
      CostVolume v = random_volume(H, W, D, F, rng);
      const SgaWeights w = normalize_logits(random_sga_logits(H, W, F, rng));

      SgaTape tape;
      tape.h = H;
      tape.w = W;
      tape.d = D;
      tape.f = F;
      std::array<CostVolume, 4> outs;
      for (int ri = 0; ri < 4; ++ri) {
        tape.dirs[ri] = sga_forward_dir(v, w, kDirections[ri]);
        outs[ri] = tape.dirs[ri].out;
      }
      tape.winner = sga_fuse_max(outs).winner;
      const SgaGradients grads = sga_backward(tape, w, v, volume_new(H, W, D, F, 1.0));

      CostVolume vp = v;
      const auto fd_in =
          oracles::central_differences(vp.data, [&] { return fused_sum(vp, w); });
      for (std::size_t i = 0; i < fd_in.size(); ++i)
        worst = std::max(worst, oracles::graded(grads.grad_input.data[i], fd_in[i], 1e-7, 1e-4));

      SgaWeights wp = w;
      for (int r = 0; r < 4; ++r) {
        const auto fd_w =
            oracles::central_differences(wp.dir[r], [&] { return fused_sum(v, wp); });
        for (std::size_t i = 0; i < fd_w.size(); ++i)
          worst = std::max(worst,
                           oracles::graded(grads.grad_weights.dir[r][i], fd_w[i], 1e-7, 1e-4));
      }
    }
  const double elapsed = seconds_since(t0);
  char detail[160];
  std::snprintf(detail, sizeof detail,
                "SGA backward vs finite differences: max normalized error %.3e (tol 1e-4), %.1f s "
                "(limit 30 s)",
                worst, elapsed);
  return report(1, worst <= 1e-4 && elapsed < 30.0, detail);
}

// 2. w0 = 1 gives bitwise identity on 10 random volumes.
bool criterion_identity() {
  Rng rng(99);
  bool ok = true;
  const SgaWeights id = sga_identity_weights(5, 6, 2);
  for (int trial = 0; trial < 10; ++trial) {
    const CostVolume v = random_volume(5, 6, 4, 2, rng);
    std::array<CostVolume, 4> outs;
    for (int ri = 0; ri < 4; ++ri) {
      outs[ri] = sga_forward_dir(v, id, kDirections[ri]).out;
      ok = ok && std::memcmp(outs[ri].data.data(), v.data.data(),
                             v.data.size() * sizeof(double)) == 0;
    }
    const SgaFusion fused = sga_fuse_max(outs);
    ok = ok &&
         std::memcmp(fused.out.data.data(), v.data.data(), v.data.size() * sizeof(double)) == 0;
  }
  return report(2, ok, "w0=1 forward is bitwise identical to the input on 10 random volumes");
}

// 3. Viterbi equals exhaustive enumeration on 200 random scanlines.
bool criterion_scanline_oracle() {
  Rng rng(1234);
  double max_gap = 0.0;
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    ScanlineCosts line;
    line.x = static_cast<int>(rng.uniform_int(1, 10));
    line.d = static_cast<int>(rng.uniform_int(2, 5));
    line.data.resize(static_cast<std::size_t>(line.x) * line.d);
    for (double& e : line.data) e = rng.uniform();
    SgmParams p;
    p.p1 = rng.uniform(0.0, 0.5);
    p.p2 = p.p1 + rng.uniform(0.0, 1.0);
    const ScanlineSolution ex = scanline_energy_min_exhaustive(line, p);
    const ScanlineSolution vit = scanline_energy_min_viterbi(line, p);
    max_gap = std::max(max_gap, std::abs(ex.energy - vit.energy));
    if (ex.assignment != vit.assignment) ++mismatches;
  }
  char detail[160];
  std::snprintf(detail, sizeof detail,
                "Viterbi vs exhaustive on 200 scanlines: max energy gap %.2e (tol 1e-12), %d "
                "assignment mismatches",
                max_gap, mismatches);
  return report(3, max_gap <= 1e-12 && mismatches == 0, detail);
}

// 4. LGA forward vs the triple-sum oracle, adjoint identity, backward FD.
bool criterion_lga() {
  Rng rng(77);
  double fwd_err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const CostVolume v = random_volume(5, 5, 4, 1, rng);
    LgaLogits logits = LgaField::zeros(5, 5, 1, 3);
    for (double& e : logits.data) e = rng.uniform(-1.0, 1.0);
    const LgaWeights w = lga_normalize(logits);
    const LgaForward fwd = lga_forward(v, w, 1);
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 5; ++x)
        for (int d = 0; d < 4; ++d)
          fwd_err = std::max(fwd_err, std::abs(fwd.out.at(y, x, d) -
                                               oracles::lga_point(v, w, y, x, d, 0)));
  }

  double adjoint_err = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const CostVolume v = random_volume(4, 5, 3, 1, rng);
    const CostVolume g = random_volume(4, 5, 3, 1, rng);
    LgaLogits logits = LgaField::zeros(4, 5, 1, 3);
    for (double& e : logits.data) e = rng.uniform(-1.0, 1.0);
    const LgaWeights w = lga_normalize(logits);
    const LgaForward fwd = lga_forward(v, w, 1);
    const LgaGradients grads = lga_backward(fwd, w, g);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < v.data.size(); ++i) {
      lhs += fwd.out.data[i] * g.data[i];
      rhs += v.data[i] * grads.grad_input.data[i];
    }
    adjoint_err = std::max(adjoint_err, std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-30));
  }

  double bwd_err = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng r2(seed);
    const CostVolume v = random_volume(3, 3, 3, 1, r2);
    LgaLogits logits = LgaField::zeros(3, 3, 1, 3);
    for (double& e : logits.data) e = r2.uniform(-1.0, 1.0);
    const LgaWeights w = lga_normalize(logits);
    const LgaForward fwd = lga_forward(v, w, 2);
    const LgaGradients grads = lga_backward(fwd, w, volume_new(3, 3, 3, 1, 1.0));

    CostVolume vp = v;
    const auto fd_in = oracles::central_differences(vp.data, [&] {
      double acc = 0.0;
      for (double e : lga_forward(vp, w, 2).out.data) acc += e;
      return acc;
    });
    for (std::size_t i = 0; i < fd_in.size(); ++i)
      bwd_err = std::max(bwd_err, oracles::graded(grads.grad_input.data[i], fd_in[i], 1e-7, 1e-4));
    LgaWeights wp = w;
    const auto fd_w = oracles::central_differences(wp.data, [&] {
      double acc = 0.0;
      for (double e : lga_forward(v, wp, 2).out.data) acc += e;
      return acc;
    });
    for (std::size_t i = 0; i < fd_w.size(); ++i)
      bwd_err = std::max(bwd_err, oracles::graded(grads.grad_weights.data[i], fd_w[i], 1e-7, 1e-4));
  }

  char detail[200];
  std::snprintf(detail, sizeof detail,
                "LGA: forward vs oracle %.2e (tol 1e-12), adjoint %.2e (tol 1e-10), backward FD "
                "%.2e (tol 1e-4)",
                fwd_err, adjoint_err, bwd_err);
  return report(4, fwd_err <= 1e-12 && adjoint_err <= 1e-10 && bwd_err <= 1e-4, detail);
}

// 5. Regression and loss closed forms plus the regression FD check.
bool criterion_head() {
  bool ok = true;

  const RegressResult uniform = disparity_regress(volume_new(2, 2, 4, 1, 0.3));
  for (double d : uniform.disparity.v) ok = ok && std::abs(d - 1.5) <= 1e-9;

  DisparityMap pred(1, 1, 0.5, true);
  const DisparityMap zero(1, 1, 0.0, true);
  ok = ok && smooth_l1(pred, zero).loss == 0.125;
  pred.at(0, 0) = 1.0;
  ok = ok && smooth_l1(pred, zero).loss == 0.5;
  pred.at(0, 0) = 2.0;
  ok = ok && smooth_l1(pred, zero).loss == 1.5;

  double fd_err = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    CostVolume v = volume_new(2, 3, 6, 1, 0.0);
    for (double& e : v.data) e = rng.uniform(-1.0, 1.0);
    const RegressResult res = disparity_regress(v);
    const CostVolume grads =
        regress_backward(std::vector<double>(static_cast<std::size_t>(v.h) * v.w, 1.0), res);
    CostVolume vp = v;
    const auto fd = oracles::central_differences(vp.data, [&] {
      double acc = 0.0;
      for (double d : disparity_regress(vp).disparity.v) acc += d;
      return acc;
    });
    for (std::size_t i = 0; i < fd.size(); ++i)
      fd_err = std::max(fd_err, oracles::graded(grads.data[i], fd[i], 1e-9, 1e-6));
  }
  ok = ok && fd_err <= 1e-6;

  char detail[160];
  std::snprintf(detail, sizeof detail,
                "regression d=1.5 on uniform costs, smooth-L1 0.125/0.5/1.5, backward FD %.2e "
                "(tol 1e-6)",
                fd_err);
  return report(5, ok, detail);
}

// 6. More SGA layers give lower error inside the textureless band:
//    medians over 5 seeds non-increasing for 0..3 layers, 3 layers at
//    least halving the 0-layer error, under 5 minutes.
bool criterion_trend() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr int kSteps = 200;
  constexpr double kLr = 3000.0;

  std::array<double, 4> medians{};
  for (int layers = 0; layers <= 3; ++layers) {
    std::vector<double> band;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const SyntheticScene scene = make_scene(64, 96, seed, 16, 16);
      TrainConfig cfg;
      cfg.sga_layers = layers;
      cfg.steps = kSteps;
      cfg.lr = kLr;
      cfg.seed = seed;
      const TrainResult res = train(scene, cfg);
      band.push_back(res.ambiguous_epe);
    }
    std::sort(band.begin(), band.end());
    medians[static_cast<std::size_t>(layers)] = band[2];
    std::printf("    sga_layers=%d -> median band EPE %.4f px\n", layers,
                medians[static_cast<std::size_t>(layers)]);
    std::fflush(stdout);
  }
  const double elapsed = seconds_since(t0);

  const bool monotone = medians[0] >= medians[1] && medians[1] >= medians[2] &&
                        medians[2] >= medians[3];
  const bool halved = medians[3] <= 0.5 * medians[0];
  char detail[200];
  std::snprintf(detail, sizeof detail,
                "band EPE medians %.3f / %.3f / %.3f / %.3f px for 0..3 layers "
                "(non-increasing: %s, 3-layer <= 50%% of 0-layer: %s), %.0f s (limit 300 s)",
                medians[0], medians[1], medians[2], medians[3], monotone ? "yes" : "no",
                halved ? "yes" : "no", elapsed);
  return report(6, monotone && halved && elapsed < 300.0, detail);
}

// 7. FLOP table closed forms and the per-channel ratio claim.
bool criterion_flops() {
  FlopModel conv;
  conv.kind = FlopKind::Conv3d;
  conv.k = 3;
  conv.n = 1;
  FlopModel sga;
  sga.kind = FlopKind::Sga;
  sga.n = 1;

  conv.channels = 32;
  const auto conv32 = flops(conv);
  conv.channels = 64;
  const auto conv64 = flops(conv);
  conv.channels = 128;
  const auto conv128 = flops(conv);
  const auto sga1 = flops(sga);

  const double r32 = static_cast<double>(sga1) / conv32;
  const double r64 = static_cast<double>(sga1) / conv64;
  const double r128 = static_cast<double>(sga1) / conv128;
  std::printf("    sga/conv ratios: C=32 %.4f, C=64 %.4f, C=128 %.4f\n", r32, r64, r128);

  const bool ok = conv32 == 1728 && sga1 == 40 && r128 < 0.01;
  char detail[160];
  std::snprintf(detail, sizeof detail,
                "3d_conv(K=3,C=32,N=1)=%llu (want 1728), sga(N=1)=%llu (want 40), ratio at "
                "C=128 %.5f < 1/100",
                static_cast<unsigned long long>(conv32), static_cast<unsigned long long>(sga1),
                r128);
  return report(7, ok, detail);
}

// 8. Byte-identical match output across thread counts; bitwise PFM
//    round-trips on 100 random maps.
bool criterion_determinism() {
  const fs::path dir = fs::temp_directory_path() / "stereoagg_acceptance";
  fs::create_directories(dir);

  const SyntheticScene scene = make_scene(32, 64, 5, 0, 16);
  MatchOptions opts;
  opts.match.d_max = 16;
  opts.method = Method::Sgm;

  set_max_threads(1);
  const DisparityMap serial = run_match(scene.left, scene.right, opts);
  set_max_threads(hardware_threads());
  const DisparityMap parallel = run_match(scene.left, scene.right, opts);
  set_max_threads(0);

  const std::string p1 = (dir / "serial.pfm").string();
  const std::string p2 = (dir / "parallel.pfm").string();
  write_pfm(serial, p1);
  write_pfm(parallel, p2);
  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  const bool threads_identical = !b1.empty() && b1 == b2;

  Rng rng(4242);
  bool roundtrip_ok = true;
  const std::string rt = (dir / "roundtrip.pfm").string();
  for (int trial = 0; trial < 100; ++trial) {
    DisparityMap map(static_cast<int>(rng.uniform_int(1, 12)),
                     static_cast<int>(rng.uniform_int(1, 12)), 0.0, true);
    for (int y = 0; y < map.h; ++y)
      for (int x = 0; x < map.w; ++x) {
        map.at(y, x) = static_cast<float>(rng.uniform(-100.0, 100.0));
        if (rng.uniform() < 0.15) map.set_valid(y, x, false);
      }
    write_pfm(map, rt);
    const DisparityMap back = read_pfm(rt);
    roundtrip_ok = roundtrip_ok && back.mask == map.mask;
    for (std::size_t i = 0; i < map.v.size(); ++i)
      if (map.mask[i])
        roundtrip_ok =
            roundtrip_ok && std::memcmp(&back.v[i], &map.v[i], sizeof(double)) == 0;
  }

  char detail[160];
  std::snprintf(detail, sizeof detail,
                "match serial vs parallel PFM bytes %s; 100 PFM round-trips %s",
                threads_identical ? "identical" : "DIFFER",
                roundtrip_ok ? "bitwise exact" : "NOT exact");
  return report(8, threads_identical && roundtrip_ok, detail);
}

}  // namespace

int main() {
  std::printf("stereoagg acceptance suite\n");
  int failures = 0;
  failures += criterion_gradient_fidelity() ? 0 : 1;
  failures += criterion_identity() ? 0 : 1;
  failures += criterion_scanline_oracle() ? 0 : 1;
  failures += criterion_lga() ? 0 : 1;
  failures += criterion_head() ? 0 : 1;
  failures += criterion_trend() ? 0 : 1;
  failures += criterion_flops() ? 0 : 1;
  failures += criterion_determinism() ? 0 : 1;
  if (failures == 0)
    std::printf("all 8 criteria passed\n");
  else
    std::printf("%d criteria FAILED\n", failures);
  return failures;
}
