#include "vsod/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vsod {

namespace {

// density = lambda * uniform + (1-lambda) * normalized marginal
std::vector<double> axis_density(const std::vector<double>& marginal, double lambda) {
    size_t n = marginal.size();
    double total = 0.0;
    for (double m : marginal) total += m;
    std::vector<double> q(n);
    if (total <= 0.0) {
        std::fill(q.begin(), q.end(), 1.0 / static_cast<double>(n));
        return q;
    }
    for (size_t i = 0; i < n; ++i)
        q[i] = lambda / static_cast<double>(n) + (1.0 - lambda) * marginal[i] / total;
    return q;
}

std::vector<double> cdf_of(const std::vector<double>& density) {
    std::vector<double> cdf(density.size() + 1, 0.0);
    for (size_t i = 0; i < density.size(); ++i) cdf[i + 1] = cdf[i] + density[i];
    cdf.back() = 1.0;  // absorb rounding so inversion covers the full range
    return cdf;
}

// F^{-1}(u) in continuous source coordinates [0, n]
double invert_cdf(const std::vector<double>& cdf, double u) {
    u = std::clamp(u, 0.0, 1.0);
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    size_t hi = std::min(static_cast<size_t>(it - cdf.begin()), cdf.size() - 1);
    size_t lo = hi - 1;
    double span = cdf[hi] - cdf[lo];
    double f = span > 0.0 ? (u - cdf[lo]) / span : 0.0;
    return static_cast<double>(lo) + f;
}

double eval_cdf(const std::vector<double>& cdf, double coord) {
    double n = static_cast<double>(cdf.size() - 1);
    coord = std::clamp(coord, 0.0, n);
    size_t lo = std::min(static_cast<size_t>(coord), cdf.size() - 2);
    double f = coord - static_cast<double>(lo);
    return cdf[lo] + f * (cdf[lo + 1] - cdf[lo]);
}

double sample_clamped(const GrayMap& src, double y, double x) {
    y = std::clamp(y, 0.0, static_cast<double>(src.h - 1));
    x = std::clamp(x, 0.0, static_cast<double>(src.w - 1));
    int y0 = std::min(static_cast<int>(y), std::max(src.h - 2, 0));
    int x0 = std::min(static_cast<int>(x), std::max(src.w - 2, 0));
    int y1 = std::min(y0 + 1, src.h - 1);
    int x1 = std::min(x0 + 1, src.w - 1);
    double fy = y - y0, fx = x - x0;
    return (1 - fy) * ((1 - fx) * src.at(y0, x0) + fx * src.at(y0, x1)) +
           fy * ((1 - fx) * src.at(y1, x0) + fx * src.at(y1, x1));
}

}  // namespace

std::pair<RgbImage, SamplerGrid> attention_sample(const RgbImage& frame, const GrayMap& attn,
                                                  int out_h, int out_w, double lambda) {
    if (frame.h != attn.h || frame.w != attn.w)
        throw std::invalid_argument("attention_sample: frame/attention size mismatch");
    if (lambda <= 0.0 || lambda > 1.0)
        throw std::invalid_argument("attention_sample: lambda must be in (0,1]");
    for (double a : attn.v)
        if (a < 0.0 || !std::isfinite(a))
            throw std::invalid_argument("attention_sample: attention must be finite and >= 0");

    std::vector<double> row_marginal(attn.h, 0.0), col_marginal(attn.w, 0.0);
    for (int r = 0; r < attn.h; ++r)
        for (int c = 0; c < attn.w; ++c) {
            row_marginal[r] += attn.at(r, c);
            col_marginal[c] += attn.at(r, c);
        }

    SamplerGrid grid;
    grid.src_h = attn.h;
    grid.src_w = attn.w;
    grid.out_h = out_h;
    grid.out_w = out_w;
    grid.cdf_y = cdf_of(axis_density(row_marginal, lambda));
    grid.cdf_x = cdf_of(axis_density(col_marginal, lambda));

    grid.ys.resize(out_h);
    grid.xs.resize(out_w);
    for (int r = 0; r < out_h; ++r)
        grid.ys[r] = invert_cdf(grid.cdf_y, (r + 0.5) / out_h) - 0.5;
    for (int c = 0; c < out_w; ++c)
        grid.xs[c] = invert_cdf(grid.cdf_x, (c + 0.5) / out_w) - 0.5;

    RgbImage out(out_h, out_w);
    GrayMap plane{};
    plane.h = frame.h;
    plane.w = frame.w;
    plane.v.resize(static_cast<size_t>(frame.h) * frame.w);
    for (int ch = 0; ch < 3; ++ch) {
        std::copy(frame.v.begin() + static_cast<size_t>(ch) * frame.h * frame.w,
                  frame.v.begin() + static_cast<size_t>(ch + 1) * frame.h * frame.w,
                  plane.v.begin());
        for (int r = 0; r < out_h; ++r)
            for (int c = 0; c < out_w; ++c)
                out.at(ch, r, c) = sample_clamped(plane, grid.ys[r], grid.xs[c]);
    }
    return {std::move(out), std::move(grid)};
}

GrayMap sample_gray(const GrayMap& m, const SamplerGrid& grid) {
    if (m.h != grid.src_h || m.w != grid.src_w)
        throw std::invalid_argument("sample_gray: map does not match grid source size");
    GrayMap out(grid.out_h, grid.out_w);
    for (int r = 0; r < grid.out_h; ++r)
        for (int c = 0; c < grid.out_w; ++c)
            out.at(r, c) = sample_clamped(m, grid.ys[r], grid.xs[c]);
    return out;
}

GrayMap attention_restore(const GrayMap& sampled_pred, const SamplerGrid& grid) {
    if (sampled_pred.h != grid.out_h || sampled_pred.w != grid.out_w)
        throw std::invalid_argument("attention_restore: prediction does not match grid");
    GrayMap out(grid.src_h, grid.src_w);
    for (int r = 0; r < grid.src_h; ++r) {
        double u = eval_cdf(grid.cdf_y, r + 0.5);
        double sy = u * grid.out_h - 0.5;
        for (int c = 0; c < grid.src_w; ++c) {
            double v = eval_cdf(grid.cdf_x, c + 0.5);
            double sx = v * grid.out_w - 0.5;
            out.at(r, c) = sample_clamped(sampled_pred, sy, sx);
        }
    }
    return out;
}

}  // namespace vsod
