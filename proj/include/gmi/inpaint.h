#pragma once
#include <string>
#include <vector>

#include "gmi/image.h"
#include "gmi/rng.h"

namespace gmi {

// Flat feature vector produced by a backend's encoder, plus the feature-map
// shape it was pooled/flattened from.
struct LatentFeatures {
  std::vector<float> v;
  int src_c = 0, src_h = 0, src_w = 0;
};

struct InpaintResult {
  Image full;        // composite with the hole filled, known pixels untouched
  Image prediction;  // the filled missing-cell rectangle
};

// Any encoder/decoder-style inpainting backend: an encoder giving features
// for similarity comparison, and a raw fill of a composite's missing region.
class InpainterContract {
 public:
  virtual ~InpainterContract() = default;

  virtual LatentFeatures encode(const Image& image, const Mask& mask) const = 0;

  // Decoder output for the whole composite, same dimensions as the composite
  // image; known pixels need not be preserved here (inpaint() restores them).
  virtual Image raw_inpaint(const Composite& comp) const = 0;

  // Stable identity string for reports.
  virtual std::string id() const = 0;

  // Pure-function backends may be solved concurrently; stateful ones
  // (fresh-noise features, sampling mode) are evaluated serially.
  virtual bool deterministic() const { return true; }
};

// full = paste_known(raw_inpaint(comp), comp.image, comp.mask);
// prediction = extract_region(full, comp.missing_rect()).
InpaintResult inpaint(const InpainterContract& model, const Composite& comp);

// Test double / upper bound: fills the missing rectangle with a stored image
// and compares with identity (raw pixel) features.
class OracleInpainter final : public InpainterContract {
 public:
  Image target;

  explicit OracleInpainter(Image target_) : target(std::move(target_)) {}
  LatentFeatures encode(const Image& image, const Mask& mask) const override;
  Image raw_inpaint(const Composite& comp) const override;
  std::string id() const override { return "oracle"; }
};

// Chance baseline: fresh noise features on every encode, so answer selection
// is uniform over the choices.
class NoiseFeatureInpainter final : public InpainterContract {
 public:
  explicit NoiseFeatureInpainter(uint64_t seed, int feature_dim = 32)
      : rng_(seed), dim_(feature_dim) {}
  LatentFeatures encode(const Image& image, const Mask& mask) const override;
  Image raw_inpaint(const Composite& comp) const override;
  std::string id() const override { return "random"; }
  bool deterministic() const override { return false; }

 private:
  mutable Rng rng_;
  int dim_;
};

// Identity features shared by the classical backends.
LatentFeatures pixel_features(const Image& image);

}  // namespace gmi
