#pragma once
#include <cstdint>
#include <span>
#include <vector>

#include "gmi/error.h"

namespace gmi {

// Single-channel intensity grid, row-major, values in [0,1].
struct Image {
  int h = 0, w = 0;
  std::vector<float> px;

  Image() = default;
  Image(int height, int width, float fill = 0.f)
      : h(height), w(width), px(size_t(height) * width, fill) {}

  float& at(int r, int c) { return px[size_t(r) * w + c]; }
  float at(int r, int c) const { return px[size_t(r) * w + c]; }
  bool same_dims(const Image& o) const { return h == o.h && w == o.w; }
};

// Known/unknown grid aligned with an Image. known = 1 means observed.
struct Mask {
  int h = 0, w = 0;
  std::vector<uint8_t> known;

  Mask() = default;
  Mask(int height, int width, bool all_known = true)
      : h(height), w(width), known(size_t(height) * width, all_known ? 1 : 0) {}

  uint8_t& at(int r, int c) { return known[size_t(r) * w + c]; }
  uint8_t at(int r, int c) const { return known[size_t(r) * w + c]; }
  size_t known_count() const;
  size_t unknown_count() const { return known.size() - known_count(); }
};

struct GridShape {
  int rows = 0, cols = 0;
};

struct CellIndex {
  int row = 0, col = 0;
};

struct Rect {
  int top = 0, left = 0, height = 0, width = 0;
};

// Problem matrix assembled into one image: cells tiled in row-major order,
// the missing cell's rectangle filled and marked unknown in the mask.
struct Composite {
  Image image;
  Mask mask;
  GridShape grid;
  int cell_size = 0;
  CellIndex missing;

  Rect missing_rect() const {
    return {missing.row * cell_size, missing.col * cell_size, cell_size, cell_size};
  }
};

Composite compose_matrix(const std::vector<Image>& cells, GridShape grid,
                         CellIndex missing, float fill = 0.5f);
Image extract_region(const Image& image, Rect region);
Image crop_whitespace(const Image& image, float white_threshold = 0.95f);
Image paste_known(const Image& generated, const Image& original, const Mask& mask);
Image resize_nearest(const Image& image, int new_h, int new_w);
double l2_distance(std::span<const float> a, std::span<const float> b);

Image hflip(const Image& image);
Image vflip(const Image& image);
Image rot90(const Image& image);  // 90 degrees clockwise; requires h == w

// Snap to the 8-bit grid (k/255) so disk round-trips are exact.
float quantize8(float v);
Image quantize8(const Image& image);

double pixel_variance(const Image& image);

}  // namespace gmi
