#include "pipeline.hpp"

#include "lga.hpp"
#include "sga.hpp"

namespace stereo {

DisparityMap run_match(const Image& left, const Image& right, const MatchOptions& opts) {
  CostVolume volume = build_cost_volume(left, right, opts.match);

  switch (opts.method) {
    case Method::Sgm: {
      std::vector<CostVolume> dirs;
      dirs.reserve(opts.sgm.directions.size());
      for (Direction r : opts.sgm.directions) dirs.push_back(sgm_aggregate_dir(volume, r, opts.sgm));
      volume = sgm_fuse(dirs);
      break;
    }
    case Method::Filter: {
      volume = cost_filter(volume, FilterKernel::box(volume.h, volume.w, opts.filter_kernel));
      break;
    }
    case Method::Ga: {
      int layers = opts.sga_layers;
      bool use_lga = opts.use_lga;
      if (opts.params) {
        if (opts.params->h != volume.h || opts.params->w != volume.w)
          throw ConfigError("learned weights were trained for a different image size");
        layers = static_cast<int>(opts.params->sga.size());
        use_lga = opts.params->lga.has_value();
      }
      for (int l = 0; l < layers; ++l) {
        if (opts.params)
          volume = sga_layer(volume, opts.params->sga[static_cast<std::size_t>(l)]).out;
        else
          volume = sga_layer(volume, sga_default_logits(volume.h, volume.w, volume.f)).out;
      }
      if (use_lga) {
        const LgaLogits logits = (opts.params && opts.params->lga)
                                     ? *opts.params->lga
                                     : lga_default_logits(volume.h, volume.w, volume.f, 5);
        volume = lga_forward(volume, lga_normalize(logits), opts.lga_repeats).out;
      }
      break;
    }
  }

  return disparity_regress(reduce_features_mean(volume)).disparity;
}

}  // namespace stereo
