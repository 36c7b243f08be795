#pragma once
#include "gmi/inpaint.h"

namespace gmi {

// Classical exemplar-based inpainter: onion-peel fill that repeatedly copies
// the best-matching fully-known source patch (SSD over the target's known
// overlap) into the most-constrained boundary patch. No learned parameters;
// features for answer selection are raw pixels.
class PatchInpainter final : public InpainterContract {
 public:
  int patch = 8;   // square side, >= 2
  int stride = 1;  // source candidate grid step, >= 1

  PatchInpainter(int patch_ = 8, int stride_ = 1);

  LatentFeatures encode(const Image& image, const Mask& mask) const override;
  Image raw_inpaint(const Composite& comp) const override;
  std::string id() const override;
};

Image patch_fill(const PatchInpainter& model, const Image& image, const Mask& mask);

}  // namespace gmi
