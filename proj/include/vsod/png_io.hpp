#pragma once

#include <string>

#include "vsod/image.hpp"

namespace vsod {

// 8-bit PNG files; gray values map linearly 0..255 -> 0..1.
GrayMap read_gray_png(const std::string& path);
RgbImage read_rgb_png(const std::string& path);

void write_gray_png(const std::string& path, const GrayMap& m);
void write_rgb_png(const std::string& path, const RgbImage& img);

/// round(v*255) clamped to [0,255].
uint8_t quantize8(double v);

}  // namespace vsod
