#pragma once
#include "gmi/inpaint.h"
#include "gmi/network.h"
#include "gmi/optimizer.h"

namespace gmi {

enum class LatentMode { deterministic, sampling };

struct VaeGanArch {
  int z_dim = 64;
  int image_size = 64;  // decoder operating resolution; multiple of 16
  std::vector<int> enc_channels = {16, 32, 64, 64};
  std::vector<int> disc_channels = {16, 32, 64};
};

struct LossWeights {
  double lambda_rec = 1.0;
  double beta = 1e-3;
  double lambda_adv = 1e-2;
};

struct VaeGanLoss {
  double recon = 0;  // mean L1 over masked pixels
  double kl = 0;
  double adv_g = 0;
  double adv_d = 0;
  LossWeights weights;

  double total() const {
    return weights.lambda_rec * recon + weights.beta * kl + weights.lambda_adv * adv_g;
  }
};

// Compact VAE with an optional adversarial head. The encoder trunk is fully
// convolutional and globally average-pooled before the dense head, so it
// accepts both full composites and single answer cells; the decoder emits a
// fixed image_size x image_size canvas (composites of other sizes are
// resampled through it and back).
class ConvVaeGan final : public InpainterContract {
 public:
  VaeGanArch arch;
  Network encoder;        // (B,2,H,W) -> (B, 2*z_dim): mean then log-variance
  Network decoder;        // (B,z_dim) -> (B,1,S,S)
  Network discriminator;  // (B,1,H,W) -> (B,1) score in (0,1)
  LatentMode mode = LatentMode::deterministic;
  int64_t iteration = 0;  // training iterations applied to these weights
  mutable Rng sample_rng{0};

  ConvVaeGan() = default;
  ConvVaeGan(const VaeGanArch& a, uint64_t seed);

  LatentFeatures encode(const Image& image, const Mask& mask) const override;
  Image raw_inpaint(const Composite& comp) const override;
  std::string id() const override;
  bool deterministic() const override { return mode == LatentMode::deterministic; }

  std::string arch_descriptor() const;
  size_t param_count() const;
};

double discriminator_score(const ConvVaeGan& model, const Image& image);

// Closed-form divergence of N(mu, sigma^2) rows from the unit normal,
// averaged over the batch: sum_d (mu^2 + e^lv - lv - 1) / 2.
double kl_divergence(const Tensor& mu, const Tensor& logvar);

// Mean absolute error over masked (unknown) pixels only.
double masked_l1(const Image& recon, const Image& original, const Mask& mask);

// Loss components on a batch, without touching any parameters.
VaeGanLoss vae_gan_losses(const ConvVaeGan& model, const std::vector<Image>& images,
                          const std::vector<Mask>& masks, const LossWeights& weights);

// One alternating optimization step (generator always; discriminator when
// adversarial). Returns the losses at this step.
VaeGanLoss vae_gan_train_step(ConvVaeGan& model, const std::vector<Image>& originals,
                              const std::vector<Mask>& masks, const LossWeights& weights,
                              bool adversarial, Adam& opt_gen, Adam& opt_disc, Rng& rng);

// Encoder input convention: channel 0 = intensities with unknown pixels
// replaced by mid-gray, channel 1 = known flags as 0/1.
Tensor encoder_input(const std::vector<Image>& images, const std::vector<Mask>& masks);

}  // namespace gmi
