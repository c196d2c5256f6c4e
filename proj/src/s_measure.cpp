#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "vsod/metrics.hpp"

// Structure measure of Fan et al.: S = 0.5*S_object + 0.5*S_region.
// Conventions follow the authors' reference code, including the 1-based
// centroid rounding, sample (N-1) variances, and the all-black / all-white
// ground-truth limits (1 - mean(pred) and mean(pred) respectively).

namespace vsod {

namespace {

constexpr double kEps = 2.220446049250313e-16;  // matches MATLAB eps

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    return accurate_sum(xs) / static_cast<double>(xs.size());
}

// similarity of the prediction values inside one class region
double object_score(const std::vector<double>& vals) {
    if (vals.empty()) return 0.0;
    double x = mean_of(vals);
    double sd = 0.0;
    if (vals.size() > 1) {
        double acc = 0.0;
        for (double v : vals) acc += (v - x) * (v - x);
        sd = std::sqrt(acc / (static_cast<double>(vals.size()) - 1.0));
    }
    return 2.0 * x / (x * x + 1.0 + sd + kEps);
}

double s_object(const GrayMap& f, const BinaryMask& y) {
    std::vector<double> fg, bg;
    fg.reserve(f.size());
    bg.reserve(f.size());
    for (size_t i = 0; i < f.size(); ++i) {
        if (y.v[i])
            fg.push_back(f.v[i]);
        else
            bg.push_back(1.0 - f.v[i]);
    }
    double u = static_cast<double>(fg.size()) / static_cast<double>(f.size());
    return u * object_score(fg) + (1.0 - u) * object_score(bg);
}

// SSIM-style similarity of one quadrant, sample statistics
double region_ssim(const GrayMap& f, const BinaryMask& y, int r0, int r1, int c0, int c1) {
    int64_t n = static_cast<int64_t>(r1 - r0) * (c1 - c0);
    if (n <= 0) return 1.0;
    double fx = 0.0, fy = 0.0;
    for (int r = r0; r < r1; ++r)
        for (int c = c0; c < c1; ++c) {
            fx += f.at(r, c);
            fy += y.at(r, c);
        }
    fx /= static_cast<double>(n);
    fy /= static_cast<double>(n);
    double sx = 0.0, sy = 0.0, sxy = 0.0;
    for (int r = r0; r < r1; ++r)
        for (int c = c0; c < c1; ++c) {
            double dx = f.at(r, c) - fx;
            double dy = y.at(r, c) - fy;
            sx += dx * dx;
            sy += dy * dy;
            sxy += dx * dy;
        }
    double denom_n = static_cast<double>(n) - 1.0 + kEps;
    sx /= denom_n;
    sy /= denom_n;
    sxy /= denom_n;

    double alpha = 4.0 * fx * fy * sxy;
    double beta = (fx * fx + fy * fy) * (sx + sy);
    if (alpha != 0.0) return alpha / (beta + kEps);
    if (beta == 0.0) return 1.0;
    return 0.0;
}

double s_region(const GrayMap& f, const BinaryMask& y) {
    // centroid with 1-based rounding, as in the reference code
    double total = 0.0, mx = 0.0, my = 0.0;
    for (int r = 0; r < y.h; ++r)
        for (int c = 0; c < y.w; ++c)
            if (y.at(r, c)) {
                total += 1.0;
                mx += c + 1.0;
                my += r + 1.0;
            }
    int cx, cy;
    if (total == 0.0) {
        cx = static_cast<int>(std::round(y.w / 2.0));
        cy = static_cast<int>(std::round(y.h / 2.0));
    } else {
        cx = static_cast<int>(std::round(mx / total));
        cy = static_cast<int>(std::round(my / total));
    }

    double area = static_cast<double>(y.h) * y.w;
    double w1 = (static_cast<double>(cx) * cy) / area;
    double w2 = (static_cast<double>(y.w - cx) * cy) / area;
    double w3 = (static_cast<double>(cx) * (y.h - cy)) / area;
    double w4 = 1.0 - w1 - w2 - w3;

    double q = 0.0;
    if (w1 > 0.0) q += w1 * region_ssim(f, y, 0, cy, 0, cx);
    if (w2 > 0.0) q += w2 * region_ssim(f, y, 0, cy, cx, y.w);
    if (w3 > 0.0) q += w3 * region_ssim(f, y, cy, y.h, 0, cx);
    if (w4 > 0.0) q += w4 * region_ssim(f, y, cy, y.h, cx, y.w);
    return q;
}

}  // namespace

double s_measure(const GrayMap& f, const BinaryMask& y) {
    if (f.h != y.h || f.w != y.w) throw std::invalid_argument("s_measure: size mismatch");
    size_t fg = y.count();
    double score;
    if (fg == 0) {
        // all-background GT: score is how empty the prediction is
        score = 1.0 - accurate_sum(f.v) / static_cast<double>(f.size());
    } else if (fg == f.size()) {
        score = accurate_sum(f.v) / static_cast<double>(f.size());
    } else {
        constexpr double alpha = 0.5;
        score = alpha * s_object(f, y) + (1.0 - alpha) * s_region(f, y);
    }
    return std::clamp(score, 0.0, 1.0);
}

}  // namespace vsod
