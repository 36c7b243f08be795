#include "gmi/image.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gmi {

size_t Mask::known_count() const {
  size_t n = 0;
  for (uint8_t k : known) n += k;
  return n;
}

Composite compose_matrix(const std::vector<Image>& cells, GridShape grid,
                         CellIndex missing, float fill) {
  if (grid.rows < 1 || grid.cols < 1)
    fail(Err::IndexOutOfRange, "grid must be at least 1x1");
  if (missing.row < 0 || missing.row >= grid.rows || missing.col < 0 ||
      missing.col >= grid.cols)
    fail(Err::IndexOutOfRange, "missing cell outside grid");
  size_t expect = size_t(grid.rows) * grid.cols - 1;
  if (cells.size() != expect)
    fail(Err::BadCellCount, "expected " + std::to_string(expect) + " cells, got " +
                                std::to_string(cells.size()));
  if (cells.empty()) fail(Err::BadCellCount, "no cells");
  int cs = cells[0].h;
  for (const Image& c : cells)
    if (c.h != cs || c.w != cs)
      fail(Err::MismatchedCellSizes, "all cells must be square and equal-sized");

  Composite comp;
  comp.grid = grid;
  comp.cell_size = cs;
  comp.missing = missing;
  comp.image = Image(grid.rows * cs, grid.cols * cs, fill);
  comp.mask = Mask(comp.image.h, comp.image.w, true);

  size_t next = 0;
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      if (r == missing.row && c == missing.col) {
        for (int i = 0; i < cs; ++i)
          for (int j = 0; j < cs; ++j) comp.mask.at(r * cs + i, c * cs + j) = 0;
        continue;
      }
      const Image& cell = cells[next++];
      for (int i = 0; i < cs; ++i)
        for (int j = 0; j < cs; ++j)
          comp.image.at(r * cs + i, c * cs + j) = cell.at(i, j);
    }
  }
  return comp;
}

Image extract_region(const Image& image, Rect region) {
  if (region.top < 0 || region.left < 0 || region.height < 1 || region.width < 1 ||
      region.top + region.height > image.h || region.left + region.width > image.w)
    fail(Err::OutOfBounds, "region outside image bounds");
  Image out(region.height, region.width);
  for (int r = 0; r < region.height; ++r)
    for (int c = 0; c < region.width; ++c)
      out.at(r, c) = image.at(region.top + r, region.left + c);
  return out;
}

Image crop_whitespace(const Image& image, float white_threshold) {
  if (image.h < 1 || image.w < 1) fail(Err::OutOfBounds, "empty image");
  int top = image.h, bottom = -1, left = image.w, right = -1;
  for (int r = 0; r < image.h; ++r) {
    for (int c = 0; c < image.w; ++c) {
      if (image.at(r, c) < white_threshold) {
        top = std::min(top, r);
        bottom = std::max(bottom, r);
        left = std::min(left, c);
        right = std::max(right, c);
      }
    }
  }
  if (bottom < 0) fail(Err::AllWhite, "no pixel below the white threshold");
  return extract_region(image, {top, left, bottom - top + 1, right - left + 1});
}

Image paste_known(const Image& generated, const Image& original, const Mask& mask) {
  if (!generated.same_dims(original) || mask.h != original.h || mask.w != original.w)
    fail(Err::DimensionMismatch, "paste_known inputs must share dimensions");
  Image out = generated;
  for (size_t i = 0; i < out.px.size(); ++i)
    if (mask.known[i]) out.px[i] = original.px[i];
  return out;
}

Image resize_nearest(const Image& image, int new_h, int new_w) {
  if (new_h < 1 || new_w < 1) fail(Err::OutOfBounds, "target dims must be >= 1");
  if (new_h == image.h && new_w == image.w) return image;
  Image out(new_h, new_w);
  for (int r = 0; r < new_h; ++r) {
    int sr = std::min(image.h - 1, int((int64_t(r) * image.h) / new_h));
    for (int c = 0; c < new_w; ++c) {
      int sc = std::min(image.w - 1, int((int64_t(c) * image.w) / new_w));
      out.at(r, c) = image.at(sr, sc);
    }
  }
  return out;
}

double l2_distance(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) fail(Err::LengthMismatch, "feature lengths differ");
  double acc = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = double(a[i]) - double(b[i]);
    acc += d * d;
  }
  return std::sqrt(acc);
}

Image hflip(const Image& image) {
  Image out(image.h, image.w);
  for (int r = 0; r < image.h; ++r)
    for (int c = 0; c < image.w; ++c) out.at(r, c) = image.at(r, image.w - 1 - c);
  return out;
}

Image vflip(const Image& image) {
  Image out(image.h, image.w);
  for (int r = 0; r < image.h; ++r)
    for (int c = 0; c < image.w; ++c) out.at(r, c) = image.at(image.h - 1 - r, c);
  return out;
}

Image rot90(const Image& image) {
  if (image.h != image.w) fail(Err::DimensionMismatch, "rot90 requires a square image");
  Image out(image.w, image.h);
  for (int r = 0; r < image.h; ++r)
    for (int c = 0; c < image.w; ++c) out.at(c, image.h - 1 - r) = image.at(r, c);
  return out;
}

float quantize8(float v) {
  v = std::clamp(v, 0.f, 1.f);
  return float(std::lround(v * 255.f)) / 255.f;
}

Image quantize8(const Image& image) {
  Image out = image;
  for (float& v : out.px) v = quantize8(v);
  return out;
}

double pixel_variance(const Image& image) {
  if (image.px.empty()) return 0;
  double mean = std::accumulate(image.px.begin(), image.px.end(), 0.0) / image.px.size();
  double acc = 0;
  for (float v : image.px) acc += (v - mean) * (v - mean);
  return acc / image.px.size();
}

}  // namespace gmi
