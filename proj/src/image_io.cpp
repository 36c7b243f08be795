#include "gmi/image_io.h"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

namespace gmi {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

uint8_t to_byte(float v) {
  v = std::clamp(v, 0.f, 1.f);
  return uint8_t(std::lround(v * 255.f));
}

Image from_bytes(int h, int w, const std::vector<uint8_t>& bytes) {
  Image img(h, w);
  for (size_t i = 0; i < bytes.size(); ++i) img.px[i] = float(bytes[i]) / 255.f;
  return img;
}

Image read_png_file(FILE* f, const std::string& path) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail(Err::IoError, "libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(Err::IoError, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(Err::IoError, "corrupt PNG: " + path);
  }
  png_init_io(png, f);
  png_read_info(png, info);

  png_byte color = png_get_color_type(png, info);
  png_byte depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (depth == 16) png_set_strip_16(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_PALETTE ||
      color == PNG_COLOR_TYPE_RGB_ALPHA)
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  png_read_update_info(png, info);

  int h = int(png_get_image_height(png, info));
  int w = int(png_get_image_width(png, info));
  std::vector<uint8_t> bytes(size_t(h) * w);
  std::vector<png_bytep> rows(h);
  for (int r = 0; r < h; ++r) rows[r] = bytes.data() + size_t(r) * w;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return from_bytes(h, w, bytes);
}

Image read_pgm_file(FILE* f, const std::string& path) {
  auto next_token = [&]() -> long {
    int ch = std::fgetc(f);
    while (ch == '#' || std::isspace(ch)) {
      if (ch == '#')
        while (ch != '\n' && ch != EOF) ch = std::fgetc(f);
      ch = std::fgetc(f);
    }
    long v = 0;
    bool any = false;
    while (std::isdigit(ch)) {
      v = v * 10 + (ch - '0');
      any = true;
      ch = std::fgetc(f);
    }
    if (!any) fail(Err::IoError, "bad PGM header: " + path);
    return v;
  };
  long w = next_token(), h = next_token(), maxval = next_token();
  if (w < 1 || h < 1 || maxval != 255) fail(Err::IoError, "unsupported PGM: " + path);
  std::vector<uint8_t> bytes(size_t(h) * w);
  if (std::fread(bytes.data(), 1, bytes.size(), f) != bytes.size())
    fail(Err::IoError, "truncated PGM: " + path);
  return from_bytes(int(h), int(w), bytes);
}

}  // namespace

Image read_image(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) fail(Err::IoError, "cannot open " + path);
  uint8_t magic[2] = {0, 0};
  if (std::fread(magic, 1, 2, f.get()) != 2) fail(Err::IoError, "empty file: " + path);
  std::rewind(f.get());
  if (magic[0] == 0x89 && magic[1] == 'P') return read_png_file(f.get(), path);
  if (magic[0] == 'P' && magic[1] == '5') {
    std::fseek(f.get(), 2, SEEK_SET);
    return read_pgm_file(f.get(), path);
  }
  fail(Err::IoError, "unrecognized image format: " + path);
}

void write_png(const Image& image, const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) fail(Err::IoError, "cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail(Err::IoError, "libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(Err::IoError, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(Err::IoError, "PNG write failed: " + path);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, image.w, image.h, 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<uint8_t> row(image.w);
  for (int r = 0; r < image.h; ++r) {
    for (int c = 0; c < image.w; ++c) row[c] = to_byte(image.at(r, c));
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void write_pgm(const Image& image, const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) fail(Err::IoError, "cannot write " + path);
  std::fprintf(f.get(), "P5\n%d %d\n255\n", image.w, image.h);
  std::vector<uint8_t> row(image.w);
  for (int r = 0; r < image.h; ++r) {
    for (int c = 0; c < image.w; ++c) row[c] = to_byte(image.at(r, c));
    if (std::fwrite(row.data(), 1, row.size(), f.get()) != row.size())
      fail(Err::IoError, "short write: " + path);
  }
}

void write_image(const Image& image, const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".pgm")
    write_pgm(image, path);
  else
    write_png(image, path);
}

}  // namespace gmi
