#include "gmi/patch_inpaint.h"

#include <limits>
#include <vector>

namespace gmi {

namespace {

// Summed-area table over the known flags; s(r,c) = count in [0,r) x [0,c).
struct KnownSums {
  int h, w;
  std::vector<int> s;

  explicit KnownSums(const Mask& m) : h(m.h), w(m.w), s(size_t(h + 1) * (w + 1), 0) {
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c)
        s[size_t(r + 1) * (w + 1) + c + 1] = m.known[size_t(r) * w + c] +
                                             s[size_t(r) * (w + 1) + c + 1] +
                                             s[size_t(r + 1) * (w + 1) + c] -
                                             s[size_t(r) * (w + 1) + c];
  }

  int window(int top, int left, int size) const {
    int b = top + size, rgt = left + size;
    return s[size_t(b) * (w + 1) + rgt] - s[size_t(top) * (w + 1) + rgt] -
           s[size_t(b) * (w + 1) + left] + s[size_t(top) * (w + 1) + left];
  }
};

}  // namespace

PatchInpainter::PatchInpainter(int patch_, int stride_) : patch(patch_), stride(stride_) {
  if (patch < 2) fail(Err::ShapeUnsupported, "patch side must be >= 2");
  if (stride < 1) fail(Err::ShapeUnsupported, "stride must be >= 1");
}

std::string PatchInpainter::id() const {
  return "patch" + std::to_string(patch) + "s" + std::to_string(stride);
}

LatentFeatures PatchInpainter::encode(const Image& image, const Mask& mask) const {
  (void)mask;
  return pixel_features(image);
}

Image PatchInpainter::raw_inpaint(const Composite& comp) const {
  return patch_fill(*this, comp.image, comp.mask);
}

Image patch_fill(const PatchInpainter& model, const Image& image, const Mask& mask) {
  if (mask.h != image.h || mask.w != image.w)
    fail(Err::DimensionMismatch, "image and mask dimensions differ");
  if (mask.unknown_count() == 0) return image;

  const int P = model.patch;
  const int h = image.h, w = image.w;
  if (h < P || w < P) fail(Err::NoSourcePatch, "image smaller than patch");

  // Source candidates live entirely inside the originally-known region.
  KnownSums orig(mask);
  std::vector<std::pair<int, int>> sources;
  for (int r = 0; r + P <= h; r += model.stride)
    for (int c = 0; c + P <= w; c += model.stride)
      if (orig.window(r, c, P) == P * P) sources.emplace_back(r, c);
  if (sources.empty()) fail(Err::NoSourcePatch, "known region holds no full patch");

  Image out = image;
  Mask cur = mask;
  while (true) {
    KnownSums sums(cur);
    int bt = -1, bl = -1, best_known = -1;
    for (int r = 0; r + P <= h; ++r)
      for (int c = 0; c + P <= w; ++c) {
        int k = sums.window(r, c, P);
        if (k < P * P && k > best_known) {
          best_known = k;
          bt = r;
          bl = c;
        }
      }
    if (bt < 0) break;  // every window fully known => mask exhausted

    std::vector<double> ssd(sources.size());
#pragma omp parallel for schedule(static)
    for (int64_t si = 0; si < int64_t(sources.size()); ++si) {
      auto [sr, sc] = sources[si];
      double acc = 0;
      for (int i = 0; i < P; ++i)
        for (int j = 0; j < P; ++j) {
          if (!cur.at(bt + i, bl + j)) continue;
          double d = double(out.at(bt + i, bl + j)) - double(out.at(sr + i, sc + j));
          acc += d * d;
        }
      ssd[si] = acc;
    }
    size_t pick = 0;
    for (size_t si = 1; si < ssd.size(); ++si)
      if (ssd[si] < ssd[pick]) pick = si;

    auto [sr, sc] = sources[pick];
    for (int i = 0; i < P; ++i)
      for (int j = 0; j < P; ++j)
        if (!cur.at(bt + i, bl + j)) {
          out.at(bt + i, bl + j) = out.at(sr + i, sc + j);
          cur.at(bt + i, bl + j) = 1;
        }
  }
  return out;
}

}  // namespace gmi
