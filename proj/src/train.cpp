#include "gmi/train.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gmi/checkpoint.h"
#include "gmi/eval.h"

namespace fs = std::filesystem;

namespace gmi {

Mask sample_mask(Rng& rng, int h, int w, double area_lo, double area_hi) {
  if (!(area_lo > 0 && area_hi < 1 && area_lo <= area_hi))
    fail(Err::IndexOutOfRange, "mask area range must sit inside (0,1)");
  const double n = double(h) * double(w);
  const int64_t count_lo = int64_t(std::ceil(area_lo * n));
  const int64_t count_hi = int64_t(std::floor(area_hi * n));

  int rh = std::max(1, h / 2), rw = std::max(1, w / 2);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double target = rng.uniform(area_lo, area_hi) * n;
    const double aspect = std::exp(rng.uniform(-0.7, 0.7));
    int th = std::clamp(int(std::lround(std::sqrt(target * aspect))), 1, h);
    int tw = std::clamp(int(std::lround(target / th)), 1, w);
    if (int64_t(th) * tw >= count_lo && int64_t(th) * tw <= count_hi) {
      rh = th;
      rw = tw;
      break;
    }
  }
  const int top = rng.uniform_int(h - rh + 1);
  const int left = rng.uniform_int(w - rw + 1);
  Mask mask(h, w, true);
  for (int r = 0; r < rh; ++r)
    for (int c = 0; c < rw; ++c) mask.at(top + r, left + c) = 0;
  return mask;
}

TrainResult train(ConvVaeGan& model, const Corpus& corpus, const TrainConfig& cfg,
                  const std::vector<ProblemInstance>* probe) {
  if (corpus.images.empty()) fail(Err::EmptyCorpus, "corpus has no images");
  const int S = model.arch.image_size;
  for (const Image& img : corpus.images)
    if (img.h != S || img.w != S)
      fail(Err::ShapeUnsupported, "corpus images must be " + std::to_string(S) + "x" +
                                      std::to_string(S));

  Rng batch_rng = Rng(cfg.seed).split(1);
  Rng mask_rng = Rng(cfg.seed).split(2);
  Rng reparam_rng = Rng(cfg.seed).split(3);
  Adam opt_gen(cfg.learning_rate);
  Adam opt_disc(cfg.learning_rate);

  if (!cfg.snapshot_dir.empty()) fs::create_directories(cfg.snapshot_dir);

  TrainResult result;
  double acc_recon = 0, acc_kl = 0, acc_g = 0, acc_d = 0;
  int acc_n = 0;

  std::vector<Image> batch(cfg.batch_size);
  std::vector<Mask> masks(cfg.batch_size);
  for (int iter = 1; iter <= cfg.iterations; ++iter) {
    for (int b = 0; b < cfg.batch_size; ++b) {
      batch[b] = corpus.images[batch_rng.uniform_int(int(corpus.images.size()))];
      masks[b] = sample_mask(mask_rng, S, S, cfg.mask_area_lo, cfg.mask_area_hi);
    }
    const bool adv = cfg.weights.lambda_adv > 0 && iter > cfg.adv_warmup;
    VaeGanLoss loss = vae_gan_train_step(model, batch, masks, cfg.weights, adv,
                                         opt_gen, opt_disc, reparam_rng);
    acc_recon += loss.recon;
    acc_kl += loss.kl;
    acc_g += loss.adv_g;
    acc_d += loss.adv_d;
    acc_n += 1;

    if (iter % cfg.eval_every == 0 || iter == cfg.iterations) {
      CurvePoint pt;
      pt.iteration = iter;
      pt.recon = acc_recon / acc_n;
      pt.kl = acc_kl / acc_n;
      pt.adv_g = acc_g / acc_n;
      pt.adv_d = acc_d / acc_n;
      acc_recon = acc_kl = acc_g = acc_d = 0;
      acc_n = 0;
      if (probe && !probe->empty()) {
        EvalReport r = evaluate(model, *probe);
        pt.score = double(r.total);
      }
      if (!result.curve.empty() && result.curve.back().iteration == pt.iteration)
        result.curve.pop_back();  // final iteration coincides with an eval point
      result.curve.push_back(pt);
      if (!cfg.snapshot_dir.empty()) {
        char name[32];
        std::snprintf(name, sizeof name, "ckpt_%06d.gmi", iter);
        std::string path = (fs::path(cfg.snapshot_dir) / name).string();
        save_checkpoint(model, path);
        result.snapshots.push_back(path);
      }
    }
  }
  return result;
}

void export_curves(const std::vector<CurvePoint>& points, const std::string& path) {
  if (points.empty()) fail(Err::IoError, "no curve points to export");
  std::ofstream f(path);
  if (!f) fail(Err::IoError, "cannot write " + path);
  f << "iteration,recon,kl,adv_g,adv_d,score\n";
  char buf[256];
  for (const CurvePoint& p : points) {
    std::snprintf(buf, sizeof buf, "%lld,%.9g,%.9g,%.9g,%.9g,",
                  (long long)p.iteration, p.recon, p.kl, p.adv_g, p.adv_d);
    f << buf;
    if (p.score) {
      std::snprintf(buf, sizeof buf, "%.9g", *p.score);
      f << buf;
    }
    f << "\n";
  }
  if (!f) fail(Err::IoError, "short write: " + path);
}

std::vector<CurvePoint> load_curves(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(Err::IoError, "cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line.rfind("iteration,", 0) != 0)
    fail(Err::IoError, "bad curve CSV header in " + path);
  std::vector<CurvePoint> out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    CurvePoint p;
    auto next = [&]() {
      if (!std::getline(ss, field, ',')) fail(Err::IoError, "short row in " + path);
      return field;
    };
    p.iteration = std::stoll(next());
    p.recon = std::stod(next());
    p.kl = std::stod(next());
    p.adv_g = std::stod(next());
    p.adv_d = std::stod(next());
    if (std::getline(ss, field, ',') && !field.empty()) p.score = std::stod(field);
    out.push_back(p);
  }
  return out;
}

}  // namespace gmi
