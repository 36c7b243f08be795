#pragma once
#include <optional>
#include <string>
#include <vector>

#include "gmi/corpus.h"
#include "gmi/problems.h"
#include "gmi/vaegan.h"

namespace gmi {

struct TrainConfig {
  int batch_size = 16;  // the source experiments used 36; 16 is the desk preset
  int iterations = 2000;
  double learning_rate = 1e-3;
  LossWeights weights;
  double mask_area_lo = 0.10;  // unknown-rectangle area fraction range
  double mask_area_hi = 0.40;
  int eval_every = 50;
  int adv_warmup = 500;  // iterations before the adversarial head engages
  uint64_t seed = 1;
  std::string snapshot_dir;  // when set, a checkpoint is written at each eval point
};

struct CurvePoint {
  int64_t iteration = 0;
  double recon = 0, kl = 0, adv_g = 0, adv_d = 0;  // means over the eval window
  std::optional<double> score;                     // probe-set total, if probed
};

struct TrainResult {
  std::vector<CurvePoint> curve;
  std::vector<std::string> snapshots;
};

// Single unknown axis-aligned rectangle with area fraction inside
// [area_lo, area_hi], uniformly placed.
Mask sample_mask(Rng& rng, int h, int w, double area_lo, double area_hi);

// Self-supervised inpainting training; the probe set (if given) is scored
// through the solver at every eval point and never touches the gradients.
TrainResult train(ConvVaeGan& model, const Corpus& corpus, const TrainConfig& cfg,
                  const std::vector<ProblemInstance>* probe = nullptr);

// CSV with header iteration,recon,kl,adv_g,adv_d,score (score empty when
// absent), 9 significant digits.
void export_curves(const std::vector<CurvePoint>& points, const std::string& path);
std::vector<CurvePoint> load_curves(const std::string& path);

}  // namespace gmi
