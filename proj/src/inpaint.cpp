#include "gmi/inpaint.h"

namespace gmi {

InpaintResult inpaint(const InpainterContract& model, const Composite& comp) {
  const Rect rect = comp.missing_rect();
  if (comp.mask.known_count() == 0)
    fail(Err::DegenerateMask, "composite has no known pixel");
  // The unknown region must be exactly the missing cell's rectangle.
  for (int r = 0; r < comp.mask.h; ++r)
    for (int c = 0; c < comp.mask.w; ++c) {
      bool inside = r >= rect.top && r < rect.top + rect.height && c >= rect.left &&
                    c < rect.left + rect.width;
      if (comp.mask.at(r, c) == (inside ? 1 : 0))
        fail(Err::DegenerateMask, "mask does not match the missing rectangle");
    }
  Image raw = model.raw_inpaint(comp);
  InpaintResult out;
  out.full = paste_known(raw, comp.image, comp.mask);
  out.prediction = extract_region(out.full, rect);
  return out;
}

LatentFeatures pixel_features(const Image& image) {
  LatentFeatures f;
  f.v = image.px;
  f.src_c = 1;
  f.src_h = image.h;
  f.src_w = image.w;
  return f;
}

LatentFeatures OracleInpainter::encode(const Image& image, const Mask& mask) const {
  (void)mask;
  return pixel_features(image);
}

Image OracleInpainter::raw_inpaint(const Composite& comp) const {
  const Rect rect = comp.missing_rect();
  Image fill = target.h == rect.height && target.w == rect.width
                   ? target
                   : resize_nearest(target, rect.height, rect.width);
  Image out = comp.image;
  for (int r = 0; r < rect.height; ++r)
    for (int c = 0; c < rect.width; ++c)
      out.at(rect.top + r, rect.left + c) = fill.at(r, c);
  return out;
}

LatentFeatures NoiseFeatureInpainter::encode(const Image& image, const Mask& mask) const {
  (void)image;
  (void)mask;
  LatentFeatures f;
  f.v.resize(dim_);
  for (float& x : f.v) x = float(rng_.normal());
  f.src_c = dim_;
  f.src_h = f.src_w = 1;
  return f;
}

Image NoiseFeatureInpainter::raw_inpaint(const Composite& comp) const {
  return comp.image;
}

}  // namespace gmi
