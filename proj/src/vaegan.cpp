#include "gmi/vaegan.h"

#include <cmath>

namespace gmi {

namespace {

constexpr float kFill = 0.5f;
constexpr double kLogvarClamp = 10.0;
constexpr double kScoreEps = 1e-7;

Mask resize_mask_nearest(const Mask& mask, int new_h, int new_w) {
  Mask out(new_h, new_w);
  for (int r = 0; r < new_h; ++r) {
    int sr = std::min(mask.h - 1, int((int64_t(r) * mask.h) / new_h));
    for (int c = 0; c < new_w; ++c) {
      int sc = std::min(mask.w - 1, int((int64_t(c) * mask.w) / new_w));
      out.at(r, c) = mask.at(sr, sc);
    }
  }
  return out;
}

Image tensor_slice_to_image(const Tensor& t, int b) {
  Image img(t.h, t.w);
  for (int r = 0; r < t.h; ++r)
    for (int c = 0; c < t.w; ++c) img.at(r, c) = t.at(b, 0, r, c);
  return img;
}

Tensor images_to_tensor(const std::vector<Image>& images) {
  Tensor t(int(images.size()), 1, images[0].h, images[0].w);
  for (size_t b = 0; b < images.size(); ++b) {
    if (!images[b].same_dims(images[0]))
      fail(Err::ShapeMismatch, "batch images must share dimensions");
    for (int r = 0; r < t.h; ++r)
      for (int c = 0; c < t.w; ++c) t.at(int(b), 0, r, c) = images[b].at(r, c);
  }
  return t;
}

struct LatentSplit {
  Tensor mu, logvar, raw_logvar;
};

LatentSplit split_stats(const Tensor& stats, int z_dim) {
  LatentSplit s;
  s.mu = Tensor::flat(stats.n, z_dim);
  s.logvar = Tensor::flat(stats.n, z_dim);
  s.raw_logvar = Tensor::flat(stats.n, z_dim);
  for (int b = 0; b < stats.n; ++b)
    for (int d = 0; d < z_dim; ++d) {
      s.mu.v[size_t(b) * z_dim + d] = stats.v[size_t(b) * 2 * z_dim + d];
      float lv = stats.v[size_t(b) * 2 * z_dim + z_dim + d];
      s.raw_logvar.v[size_t(b) * z_dim + d] = lv;
      s.logvar.v[size_t(b) * z_dim + d] =
          float(std::clamp(double(lv), -kLogvarClamp, kLogvarClamp));
    }
  return s;
}

void check_min_size(const Image& image) {
  if (image.h < 8 || image.w < 8)
    fail(Err::ShapeUnsupported, "input must be at least 8x8, got " +
                                    std::to_string(image.h) + "x" + std::to_string(image.w));
}

}  // namespace

Tensor encoder_input(const std::vector<Image>& images, const std::vector<Mask>& masks) {
  if (images.empty()) fail(Err::EmptyBatch, "no images");
  if (images.size() != masks.size())
    fail(Err::ShapeMismatch, "image/mask counts differ");
  Tensor t(int(images.size()), 2, images[0].h, images[0].w);
  for (size_t b = 0; b < images.size(); ++b) {
    const Image& img = images[b];
    const Mask& m = masks[b];
    if (!img.same_dims(images[0]) || m.h != img.h || m.w != img.w)
      fail(Err::ShapeMismatch, "batch entries must share dimensions");
    for (int r = 0; r < t.h; ++r)
      for (int c = 0; c < t.w; ++c) {
        bool known = m.at(r, c) != 0;
        t.at(int(b), 0, r, c) = known ? img.at(r, c) : kFill;
        t.at(int(b), 1, r, c) = known ? 1.f : 0.f;
      }
  }
  return t;
}

ConvVaeGan::ConvVaeGan(const VaeGanArch& a, uint64_t seed) : arch(a) {
  if (arch.image_size % 16 != 0 || arch.image_size < 16)
    fail(Err::ShapeUnsupported, "image_size must be a positive multiple of 16");
  const int base = arch.image_size / 16;

  int ch = 2;
  for (int out : arch.enc_channels) {
    encoder.layers.push_back(Layer::conv2d(ch, out, 3, 2, 1));
    encoder.layers.push_back(Layer::activation(LayerKind::relu));
    ch = out;
  }
  encoder.layers.push_back(Layer::avgpool(0, 1));
  encoder.layers.push_back(Layer::dense(ch, 2 * arch.z_dim));

  const int dch = arch.enc_channels.back();
  decoder.layers.push_back(Layer::dense_to(arch.z_dim, dch, base, base));
  decoder.layers.push_back(Layer::activation(LayerKind::relu));
  int prev = dch;
  std::vector<int> up = arch.enc_channels;  // mirrored trunk
  for (int i = int(up.size()) - 2; i >= 0; --i) {
    decoder.layers.push_back(Layer::tconv2d(prev, up[i], 4, 2, 1));
    decoder.layers.push_back(Layer::activation(LayerKind::relu));
    prev = up[i];
  }
  decoder.layers.push_back(Layer::tconv2d(prev, 1, 4, 2, 1));
  decoder.layers.push_back(Layer::activation(LayerKind::sigmoid));

  ch = 1;
  for (int out : arch.disc_channels) {
    discriminator.layers.push_back(Layer::conv2d(ch, out, 3, 2, 1));
    discriminator.layers.push_back(Layer::activation(LayerKind::leaky_relu, 0.2f));
    ch = out;
  }
  discriminator.layers.push_back(Layer::avgpool(0, 1));
  discriminator.layers.push_back(Layer::dense(ch, 1));
  discriminator.layers.push_back(Layer::activation(LayerKind::sigmoid));

  Rng rng(seed);
  encoder.init(rng);
  decoder.init(rng);
  discriminator.init(rng);
  // Start the posterior tight (sigma ~ 0.14): with sigma ~ 1 the reparam
  // noise drowns the mean and the decoder settles on a constant predictor.
  Layer& head = encoder.layers.back();
  for (int d = 0; d < arch.z_dim; ++d) head.bias.v[arch.z_dim + d] = -4.f;
  sample_rng = rng.split(0x5a11);
}

LatentFeatures ConvVaeGan::encode(const Image& image, const Mask& mask) const {
  check_min_size(image);
  if (mask.h != image.h || mask.w != image.w)
    fail(Err::ShapeMismatch, "image/mask dimensions differ");
  Tensor in = encoder_input({image}, {mask});
  Tensor stats = encoder.infer(in);
  LatentSplit s = split_stats(stats, arch.z_dim);
  LatentFeatures f;
  f.v.assign(s.mu.v.begin(), s.mu.v.end());
  if (mode == LatentMode::sampling) {
    for (int d = 0; d < arch.z_dim; ++d) {
      double sigma = std::exp(0.5 * double(s.logvar.v[d]));
      f.v[d] = float(double(f.v[d]) + sigma * sample_rng.normal());
    }
  }
  f.src_c = arch.z_dim;
  f.src_h = f.src_w = 1;
  return f;
}

Image ConvVaeGan::raw_inpaint(const Composite& comp) const {
  check_min_size(comp.image);
  const int S = arch.image_size;
  Image in = comp.image;
  Mask m = comp.mask;
  const bool resized = in.h != S || in.w != S;
  if (resized) {
    in = resize_nearest(in, S, S);
    m = resize_mask_nearest(comp.mask, S, S);
  }
  Tensor enc_in = encoder_input({in}, {m});
  Tensor stats = encoder.infer(enc_in);
  LatentSplit s = split_stats(stats, arch.z_dim);
  Tensor z = s.mu;
  if (mode == LatentMode::sampling) {
    for (int d = 0; d < arch.z_dim; ++d) {
      double sigma = std::exp(0.5 * double(s.logvar.v[d]));
      z.v[d] = float(double(z.v[d]) + sigma * sample_rng.normal());
    }
  }
  Tensor dec = decoder.infer(z);
  Image out = tensor_slice_to_image(dec, 0);
  if (resized) out = resize_nearest(out, comp.image.h, comp.image.w);
  return out;
}

std::string ConvVaeGan::id() const {
  return "vaegan-z" + std::to_string(arch.z_dim) +
         (mode == LatentMode::sampling ? "-sampling" : "");
}

std::string ConvVaeGan::arch_descriptor() const {
  return "convvaegan v1 z=" + std::to_string(arch.z_dim) +
         " size=" + std::to_string(arch.image_size) + " enc=[" + encoder.describe() +
         "] dec=[" + decoder.describe() + "] disc=[" + discriminator.describe() + "]";
}

size_t ConvVaeGan::param_count() const {
  return encoder.param_count() + decoder.param_count() + discriminator.param_count();
}

double discriminator_score(const ConvVaeGan& model, const Image& image) {
  check_min_size(image);
  Tensor in = images_to_tensor({image});
  Tensor out = model.discriminator.infer(in);
  return double(out.v[0]);
}

double kl_divergence(const Tensor& mu, const Tensor& logvar) {
  if (!mu.same_shape(logvar)) fail(Err::ShapeMismatch, "mu/logvar shapes differ");
  double acc = 0;
  for (size_t i = 0; i < mu.size(); ++i) {
    double m = mu.v[i], lv = logvar.v[i];
    acc += 0.5 * (m * m + std::exp(lv) - lv - 1.0);
  }
  return acc / std::max(1, mu.n);
}

double masked_l1(const Image& recon, const Image& original, const Mask& mask) {
  if (!recon.same_dims(original) || mask.h != recon.h || mask.w != recon.w)
    fail(Err::DimensionMismatch, "masked_l1 inputs must share dimensions");
  double acc = 0;
  size_t count = 0;
  for (size_t i = 0; i < recon.px.size(); ++i)
    if (!mask.known[i]) {
      acc += std::abs(double(recon.px[i]) - double(original.px[i]));
      ++count;
    }
  return count == 0 ? 0.0 : acc / double(count);
}

VaeGanLoss vae_gan_losses(const ConvVaeGan& model, const std::vector<Image>& images,
                          const std::vector<Mask>& masks, const LossWeights& weights) {
  if (images.empty()) fail(Err::EmptyBatch, "loss evaluation needs a nonempty batch");
  if (images[0].h != model.arch.image_size || images[0].w != model.arch.image_size)
    fail(Err::ShapeUnsupported, "batch images must match the decoder resolution");
  const int B = int(images.size());
  const int z = model.arch.z_dim;
  Tensor in = encoder_input(images, masks);
  Tensor stats = model.encoder.infer(in);
  LatentSplit s = split_stats(stats, z);
  Tensor zt = s.mu;
  if (model.mode == LatentMode::sampling) {
    for (size_t i = 0; i < zt.size(); ++i) {
      double sigma = std::exp(0.5 * double(s.logvar.v[i]));
      zt.v[i] = float(double(zt.v[i]) + sigma * model.sample_rng.normal());
    }
  }
  Tensor dec = model.decoder.infer(zt);

  VaeGanLoss loss;
  loss.weights = weights;
  double rec_acc = 0;
  size_t rec_count = 0;
  for (int b = 0; b < B; ++b)
    for (int r = 0; r < dec.h; ++r)
      for (int c = 0; c < dec.w; ++c)
        if (!masks[b].at(r, c)) {
          rec_acc += std::abs(double(dec.at(b, 0, r, c)) - double(images[b].at(r, c)));
          ++rec_count;
        }
  loss.recon = rec_count == 0 ? 0.0 : rec_acc / double(rec_count);
  loss.kl = kl_divergence(s.mu, s.logvar);

  Tensor fake_scores = model.discriminator.infer(dec);
  Tensor real_scores = model.discriminator.infer(images_to_tensor(images));
  double ag = 0, adr = 0, adf = 0;
  for (int b = 0; b < B; ++b) {
    double sf = std::clamp(double(fake_scores.v[b]), kScoreEps, 1 - kScoreEps);
    double sr = std::clamp(double(real_scores.v[b]), kScoreEps, 1 - kScoreEps);
    ag += -std::log(sf);
    adr += -std::log(sr);
    adf += -std::log(1 - sf);
  }
  loss.adv_g = ag / B;
  loss.adv_d = (adr + adf) / B;
  return loss;
}

VaeGanLoss vae_gan_train_step(ConvVaeGan& model, const std::vector<Image>& originals,
                              const std::vector<Mask>& masks, const LossWeights& weights,
                              bool adversarial, Adam& opt_gen, Adam& opt_disc, Rng& rng) {
  if (originals.empty()) fail(Err::EmptyBatch, "training step needs a nonempty batch");
  if (originals[0].h != model.arch.image_size || originals[0].w != model.arch.image_size)
    fail(Err::ShapeUnsupported, "training images must match the decoder resolution");
  const int B = int(originals.size());
  const int z = model.arch.z_dim;
  const bool adv = adversarial && weights.lambda_adv > 0;

  // ---- forward ----
  Tensor in = encoder_input(originals, masks);
  Tensor stats = model.encoder.forward(in);
  LatentSplit s = split_stats(stats, z);

  Tensor eps = Tensor::flat(B, z);
  for (size_t i = 0; i < eps.size(); ++i) eps.v[i] = float(rng.normal());
  Tensor zt = Tensor::flat(B, z);
  for (size_t i = 0; i < zt.size(); ++i) {
    double sigma = std::exp(0.5 * double(s.logvar.v[i]));
    zt.v[i] = float(double(s.mu.v[i]) + sigma * double(eps.v[i]));
  }

  Tensor dec = model.decoder.forward(zt);

  // ---- losses and output-side gradients ----
  VaeGanLoss loss;
  loss.weights = weights;

  size_t rec_count = 0;
  for (int b = 0; b < B; ++b) rec_count += masks[b].unknown_count();
  double rec_acc = 0;
  Tensor g_dec(dec.n, dec.c, dec.h, dec.w);
  for (int b = 0; b < B; ++b)
    for (int r = 0; r < dec.h; ++r)
      for (int c = 0; c < dec.w; ++c) {
        if (masks[b].at(r, c)) continue;
        double d = double(dec.at(b, 0, r, c)) - double(originals[b].at(r, c));
        rec_acc += std::abs(d);
        double sign = d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0);
        g_dec.at(b, 0, r, c) =
            float(weights.lambda_rec * sign / double(std::max<size_t>(1, rec_count)));
      }
  loss.recon = rec_count == 0 ? 0.0 : rec_acc / double(rec_count);
  loss.kl = kl_divergence(s.mu, s.logvar);

  if (adv) {
    model.discriminator.zero_grads();
    Tensor fake_scores = model.discriminator.forward(dec);
    Tensor g_scores = Tensor::flat(B, 1);
    double ag = 0;
    for (int b = 0; b < B; ++b) {
      double sf = double(fake_scores.v[b]);
      double sc = std::clamp(sf, kScoreEps, 1 - kScoreEps);
      ag += -std::log(sc);
      if (sf > kScoreEps && sf < 1 - kScoreEps)
        g_scores.v[b] = float(-1.0 / (sc * B));
    }
    loss.adv_g = ag / B;
    Tensor g_dec_adv = model.discriminator.backward(g_scores);
    for (size_t i = 0; i < g_dec.size(); ++i)
      g_dec.v[i] += float(weights.lambda_adv * double(g_dec_adv.v[i]));
  }

  if (!std::isfinite(loss.recon) || !std::isfinite(loss.kl) || !std::isfinite(loss.adv_g))
    fail(Err::NonFiniteLoss, "generator loss is not finite");

  // ---- generator backward ----
  model.encoder.zero_grads();
  model.decoder.zero_grads();
  Tensor g_z = model.decoder.backward(g_dec);

  Tensor g_stats(stats.n, stats.c, stats.h, stats.w);
  const double kl_scale = weights.beta / double(B);
  for (int b = 0; b < B; ++b)
    for (int d = 0; d < z; ++d) {
      const size_t i = size_t(b) * z + d;
      const double lv = double(s.logvar.v[i]);
      const double sigma = std::exp(0.5 * lv);
      const bool gate = std::abs(double(s.raw_logvar.v[i])) < kLogvarClamp;
      double gmu = double(g_z.v[i]) + kl_scale * double(s.mu.v[i]);
      double glv = 0;
      if (gate) {
        glv = double(g_z.v[i]) * double(eps.v[i]) * sigma * 0.5 +
              kl_scale * 0.5 * (std::exp(lv) - 1.0);
      }
      g_stats.v[size_t(b) * 2 * z + d] = float(gmu);
      g_stats.v[size_t(b) * 2 * z + z + d] = float(glv);
    }
  model.encoder.backward(g_stats);

  std::vector<Tensor*> gen_params = model.encoder.params();
  std::vector<Tensor*> gen_grads = model.encoder.grads();
  for (Tensor* p : model.decoder.params()) gen_params.push_back(p);
  for (Tensor* g : model.decoder.grads()) gen_grads.push_back(g);
  opt_gen.step(gen_params, gen_grads);

  // ---- discriminator update ----
  if (adv) {
    model.discriminator.zero_grads();
    Tensor real = images_to_tensor(originals);
    Tensor sr = model.discriminator.forward(real);
    Tensor g_sr = Tensor::flat(B, 1);
    double adr = 0;
    for (int b = 0; b < B; ++b) {
      double v = double(sr.v[b]);
      double vc = std::clamp(v, kScoreEps, 1 - kScoreEps);
      adr += -std::log(vc);
      if (v > kScoreEps && v < 1 - kScoreEps) g_sr.v[b] = float(-1.0 / (vc * B));
    }
    model.discriminator.backward(g_sr);

    Tensor sf = model.discriminator.forward(dec);  // generator output, detached
    Tensor g_sf = Tensor::flat(B, 1);
    double adf = 0;
    for (int b = 0; b < B; ++b) {
      double v = double(sf.v[b]);
      double vc = std::clamp(v, kScoreEps, 1 - kScoreEps);
      adf += -std::log(1 - vc);
      if (v > kScoreEps && v < 1 - kScoreEps) g_sf.v[b] = float(1.0 / ((1 - vc) * B));
    }
    model.discriminator.backward(g_sf);
    loss.adv_d = (adr + adf) / B;
    if (!std::isfinite(loss.adv_d)) fail(Err::NonFiniteLoss, "discriminator loss is not finite");
    opt_disc.step(model.discriminator.params(), model.discriminator.grads());
  }

  ++model.iteration;
  return loss;
}

}  // namespace gmi
