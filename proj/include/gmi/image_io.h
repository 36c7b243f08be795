#pragma once
#include <string>

#include "gmi/image.h"

namespace gmi {

// 8-bit grayscale files; intensities map linearly 0 -> 0.0, 255 -> 1.0.
// PNG inputs of any color type are converted to luminance on read.
Image read_image(const std::string& path);
void write_png(const Image& image, const std::string& path);
void write_pgm(const Image& image, const std::string& path);

// Dispatches on extension (.png / .pgm).
void write_image(const Image& image, const std::string& path);

}  // namespace gmi
