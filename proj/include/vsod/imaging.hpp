#pragma once

#include <vector>

#include "vsod/image.hpp"

namespace vsod {

// Morphology uses a square structuring element of Chebyshev radius r.
BinaryMask dilate(const BinaryMask& m, int radius);
BinaryMask erode(const BinaryMask& m, int radius);

/// Separable Gaussian convolution, kernel truncated at +-3*sigma and
/// renormalized; borders are reflected.
GrayMap gaussian_blur(const GrayMap& m, double sigma);

/// 8-connected foreground components, ordered by (top,left) of their
/// bounding box. Empty input yields an empty list.
std::vector<BinaryMask> connected_components(const BinaryMask& m);

BoundingBox component_box(const BinaryMask& m);

/// Doubles width and height about the box center, clamped to the frame.
BoundingBox expand_box(const BoundingBox& b, int frame_h, int frame_w);

/// out(r,c) = src(r + v(r,c), c + u(r,c)), bilinear, zero outside the frame.
GrayMap backward_warp(const GrayMap& src, const FlowField& flow);

/// 1 where value > t, else 0.
BinaryMask threshold(const GrayMap& m, double t);

GrayMap to_gray(const BinaryMask& m);
BinaryMask complement(const BinaryMask& m);

/// Bilinear resize with edge clamp.
GrayMap resize_bilinear(const GrayMap& m, int out_h, int out_w);
RgbImage resize_bilinear(const RgbImage& m, int out_h, int out_w);

RgbImage crop(const RgbImage& img, const BoundingBox& b);

}  // namespace vsod
