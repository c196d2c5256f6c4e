#include <array>
#include <cmath>

#include "vsod/flow_io.hpp"

namespace vsod {

namespace {

// 55-entry color wheel: RY 15, YG 6, GC 4, CB 11, BM 13, MR 6.
constexpr int kRy = 15, kYg = 6, kGc = 4, kCb = 11, kBm = 13, kMr = 6;
constexpr int kWheelSize = kRy + kYg + kGc + kCb + kBm + kMr;

std::array<std::array<double, 3>, kWheelSize> make_wheel() {
    std::array<std::array<double, 3>, kWheelSize> wheel{};
    int k = 0;
    for (int i = 0; i < kRy; ++i) wheel[k++] = {255.0, 255.0 * i / kRy, 0.0};
    for (int i = 0; i < kYg; ++i) wheel[k++] = {255.0 - 255.0 * i / kYg, 255.0, 0.0};
    for (int i = 0; i < kGc; ++i) wheel[k++] = {0.0, 255.0, 255.0 * i / kGc};
    for (int i = 0; i < kCb; ++i) wheel[k++] = {0.0, 255.0 - 255.0 * i / kCb, 255.0};
    for (int i = 0; i < kBm; ++i) wheel[k++] = {255.0 * i / kBm, 0.0, 255.0};
    for (int i = 0; i < kMr; ++i) wheel[k++] = {255.0, 0.0, 255.0 - 255.0 * i / kMr};
    return wheel;
}

const std::array<std::array<double, 3>, kWheelSize> kWheel = make_wheel();

}  // namespace

RgbImage render_flow(const FlowField& flow) {
    double max_rad = 0.0;
    for (size_t i = 0; i < flow.u.size(); ++i) {
        double rad = std::hypot(flow.u[i], flow.vdisp[i]);
        if (!std::isfinite(rad)) throw std::invalid_argument("render_flow: non-finite flow");
        max_rad = std::max(max_rad, rad);
    }

    RgbImage img(flow.h, flow.w);
    if (max_rad == 0.0) {
        // zero motion everywhere renders white
        std::fill(img.v.begin(), img.v.end(), 1.0);
        return img;
    }

    for (int r = 0; r < flow.h; ++r) {
        for (int c = 0; c < flow.w; ++c) {
            double fx = flow.u_at(r, c) / max_rad;
            double fy = flow.v_at(r, c) / max_rad;
            double rad = std::hypot(fx, fy);
            double angle = std::atan2(-fy, -fx) / M_PI;  // [-1,1]
            double fk = (angle + 1.0) / 2.0 * (kWheelSize - 1);
            int k0 = static_cast<int>(fk);
            int k1 = (k0 + 1) % kWheelSize;
            double f = fk - k0;
            for (int ch = 0; ch < 3; ++ch) {
                double col0 = kWheel[k0][ch] / 255.0;
                double col1 = kWheel[k1][ch] / 255.0;
                double col = (1.0 - f) * col0 + f * col1;
                // saturation grows with magnitude; rad <= 1 after normalization
                col = 1.0 - rad * (1.0 - col);
                img.at(ch, r, c) = col;
            }
        }
    }
    return img;
}

}  // namespace vsod
