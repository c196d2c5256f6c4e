#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace vsod {

/// Single-channel map, values in [0,1], row-major.
struct GrayMap {
    int h = 0;
    int w = 0;
    std::vector<double> v;

    GrayMap() = default;
    GrayMap(int height, int width, double fill = 0.0)
        : h(height), w(width), v(static_cast<size_t>(height) * width, fill) {
        if (height < 1 || width < 1)
            throw std::invalid_argument("GrayMap: size must be >= 1x1");
    }

    double& at(int r, int c) { return v[static_cast<size_t>(r) * w + c]; }
    double at(int r, int c) const { return v[static_cast<size_t>(r) * w + c]; }
    size_t size() const { return v.size(); }
    bool same_size(const GrayMap& o) const { return h == o.h && w == o.w; }
};

/// 3-channel image, planar CHW layout, values in [0,1].
struct RgbImage {
    int h = 0;
    int w = 0;
    std::vector<double> v;  // size 3*h*w, channel-major

    RgbImage() = default;
    RgbImage(int height, int width, double fill = 0.0)
        : h(height), w(width), v(3 * static_cast<size_t>(height) * width, fill) {
        if (height < 1 || width < 1)
            throw std::invalid_argument("RgbImage: size must be >= 1x1");
    }

    double& at(int ch, int r, int c) {
        return v[(static_cast<size_t>(ch) * h + r) * w + c];
    }
    double at(int ch, int r, int c) const {
        return v[(static_cast<size_t>(ch) * h + r) * w + c];
    }
};

/// Per-pixel displacement field in pixels. u = column offset, v = row offset.
struct FlowField {
    int h = 0;
    int w = 0;
    std::vector<double> u;
    std::vector<double> vdisp;

    FlowField() = default;
    FlowField(int height, int width)
        : h(height), w(width),
          u(static_cast<size_t>(height) * width, 0.0),
          vdisp(static_cast<size_t>(height) * width, 0.0) {}

    double& u_at(int r, int c) { return u[static_cast<size_t>(r) * w + c]; }
    double u_at(int r, int c) const { return u[static_cast<size_t>(r) * w + c]; }
    double& v_at(int r, int c) { return vdisp[static_cast<size_t>(r) * w + c]; }
    double v_at(int r, int c) const { return vdisp[static_cast<size_t>(r) * w + c]; }
};

struct BinaryMask {
    int h = 0;
    int w = 0;
    std::vector<uint8_t> v;  // 0 or 1

    BinaryMask() = default;
    BinaryMask(int height, int width, uint8_t fill = 0)
        : h(height), w(width), v(static_cast<size_t>(height) * width, fill) {}

    uint8_t& at(int r, int c) { return v[static_cast<size_t>(r) * w + c]; }
    uint8_t at(int r, int c) const { return v[static_cast<size_t>(r) * w + c]; }
    size_t count() const {
        size_t n = 0;
        for (uint8_t x : v) n += x;
        return n;
    }
};

/// Half-open pixel box [top,bottom) x [left,right).
struct BoundingBox {
    int top = 0;
    int left = 0;
    int bottom = 0;
    int right = 0;

    int height() const { return bottom - top; }
    int width() const { return right - left; }
    bool contains(const BoundingBox& o) const {
        return top <= o.top && left <= o.left && bottom >= o.bottom && right >= o.right;
    }
};

}  // namespace vsod
