#include "vsod/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace vsod {

namespace {

// 1-D sliding extremum over a +-r window; keeps masks as 0/1.
void line_dilate(const uint8_t* in, uint8_t* out, int n, int stride, int r) {
    for (int i = 0; i < n; ++i) {
        uint8_t best = 0;
        int lo = std::max(0, i - r);
        int hi = std::min(n - 1, i + r);
        for (int j = lo; j <= hi && !best; ++j) best = in[j * stride];
        out[i * stride] = best;
    }
}

void line_erode(const uint8_t* in, uint8_t* out, int n, int stride, int r) {
    for (int i = 0; i < n; ++i) {
        uint8_t worst = 1;
        // outside the frame counts as 0, so a window touching the border erodes
        if (i - r < 0 || i + r > n - 1) {
            out[i * stride] = 0;
            continue;
        }
        for (int j = i - r; j <= i + r && worst; ++j) worst = in[j * stride];
        out[i * stride] = worst;
    }
}

int reflect_index(int i, int n) {
    // symmetric reflection, border pixel included: -1 -> 0, n -> n-1
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - i - 1;
    }
    return i;
}

}  // namespace

BinaryMask dilate(const BinaryMask& m, int radius) {
    if (radius < 0) throw std::invalid_argument("dilate: radius must be >= 0");
    if (radius == 0) return m;
    BinaryMask tmp(m.h, m.w), out(m.h, m.w);
    for (int r = 0; r < m.h; ++r)
        line_dilate(&m.v[static_cast<size_t>(r) * m.w], &tmp.v[static_cast<size_t>(r) * m.w],
                    m.w, 1, radius);
    for (int c = 0; c < m.w; ++c)
        line_dilate(&tmp.v[c], &out.v[c], m.h, m.w, radius);
    return out;
}

BinaryMask erode(const BinaryMask& m, int radius) {
    if (radius < 0) throw std::invalid_argument("erode: radius must be >= 0");
    if (radius == 0) return m;
    BinaryMask tmp(m.h, m.w), out(m.h, m.w);
    for (int r = 0; r < m.h; ++r)
        line_erode(&m.v[static_cast<size_t>(r) * m.w], &tmp.v[static_cast<size_t>(r) * m.w],
                   m.w, 1, radius);
    for (int c = 0; c < m.w; ++c)
        line_erode(&tmp.v[c], &out.v[c], m.h, m.w, radius);
    return out;
}

GrayMap gaussian_blur(const GrayMap& m, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_blur: sigma must be > 0");
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    GrayMap tmp(m.h, m.w), out(m.h, m.w);
    for (int r = 0; r < m.h; ++r) {
        for (int c = 0; c < m.w; ++c) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * m.at(r, reflect_index(c + i, m.w));
            tmp.at(r, c) = acc;
        }
    }
    for (int c = 0; c < m.w; ++c) {
        for (int r = 0; r < m.h; ++r) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * tmp.at(reflect_index(r + i, m.h), c);
            out.at(r, c) = acc;
        }
    }
    return out;
}

std::vector<BinaryMask> connected_components(const BinaryMask& m) {
    std::vector<int> label(m.v.size(), -1);
    std::vector<BinaryMask> comps;
    std::vector<BoundingBox> boxes;
    std::deque<std::pair<int, int>> queue;

    for (int r = 0; r < m.h; ++r) {
        for (int c = 0; c < m.w; ++c) {
            if (!m.at(r, c) || label[static_cast<size_t>(r) * m.w + c] >= 0) continue;
            int id = static_cast<int>(comps.size());
            comps.emplace_back(m.h, m.w);
            BoundingBox box{r, c, r + 1, c + 1};
            queue.emplace_back(r, c);
            label[static_cast<size_t>(r) * m.w + c] = id;
            while (!queue.empty()) {
                auto [cr, cc] = queue.front();
                queue.pop_front();
                comps[id].at(cr, cc) = 1;
                box.top = std::min(box.top, cr);
                box.left = std::min(box.left, cc);
                box.bottom = std::max(box.bottom, cr + 1);
                box.right = std::max(box.right, cc + 1);
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        int nr = cr + dr, nc = cc + dc;
                        if (nr < 0 || nr >= m.h || nc < 0 || nc >= m.w) continue;
                        size_t idx = static_cast<size_t>(nr) * m.w + nc;
                        if (m.v[idx] && label[idx] < 0) {
                            label[idx] = id;
                            queue.emplace_back(nr, nc);
                        }
                    }
                }
            }
            boxes.push_back(box);
        }
    }

    std::vector<int> order(comps.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (boxes[a].top != boxes[b].top) return boxes[a].top < boxes[b].top;
        return boxes[a].left < boxes[b].left;
    });
    std::vector<BinaryMask> sorted;
    sorted.reserve(comps.size());
    for (int i : order) sorted.push_back(std::move(comps[i]));
    return sorted;
}

BoundingBox component_box(const BinaryMask& m) {
    BoundingBox box{m.h, m.w, 0, 0};
    for (int r = 0; r < m.h; ++r)
        for (int c = 0; c < m.w; ++c)
            if (m.at(r, c)) {
                box.top = std::min(box.top, r);
                box.left = std::min(box.left, c);
                box.bottom = std::max(box.bottom, r + 1);
                box.right = std::max(box.right, c + 1);
            }
    if (box.bottom <= box.top) throw std::invalid_argument("component_box: empty mask");
    return box;
}

BoundingBox expand_box(const BoundingBox& b, int frame_h, int frame_w) {
    int h = b.height(), w = b.width();
    BoundingBox out;
    out.top = std::max(0, b.top - h / 2);
    out.bottom = std::min(frame_h, b.bottom + (h - h / 2));
    out.left = std::max(0, b.left - w / 2);
    out.right = std::min(frame_w, b.right + (w - w / 2));
    return out;
}

namespace {

// Bilinear sample with zero outside the frame; exact when (y,x) is integral.
double sample_zero(const GrayMap& src, double y, double x) {
    int y0 = static_cast<int>(std::floor(y));
    int x0 = static_cast<int>(std::floor(x));
    double fy = y - y0, fx = x - x0;
    double acc = 0.0;
    for (int dy = 0; dy <= 1; ++dy) {
        for (int dx = 0; dx <= 1; ++dx) {
            double wgt = (dy ? fy : 1.0 - fy) * (dx ? fx : 1.0 - fx);
            if (wgt == 0.0) continue;
            int yy = y0 + dy, xx = x0 + dx;
            if (yy < 0 || yy >= src.h || xx < 0 || xx >= src.w) continue;
            acc += wgt * src.at(yy, xx);
        }
    }
    return acc;
}

}  // namespace

GrayMap backward_warp(const GrayMap& src, const FlowField& flow) {
    if (src.h != flow.h || src.w != flow.w)
        throw std::invalid_argument("backward_warp: size mismatch");
    GrayMap out(src.h, src.w);
    for (int r = 0; r < src.h; ++r)
        for (int c = 0; c < src.w; ++c)
            out.at(r, c) = sample_zero(src, r + flow.v_at(r, c), c + flow.u_at(r, c));
    return out;
}

BinaryMask threshold(const GrayMap& m, double t) {
    BinaryMask out(m.h, m.w);
    for (size_t i = 0; i < m.v.size(); ++i) out.v[i] = m.v[i] > t ? 1 : 0;
    return out;
}

GrayMap to_gray(const BinaryMask& m) {
    GrayMap out(m.h, m.w);
    for (size_t i = 0; i < m.v.size(); ++i) out.v[i] = m.v[i] ? 1.0 : 0.0;
    return out;
}

BinaryMask complement(const BinaryMask& m) {
    BinaryMask out(m.h, m.w);
    for (size_t i = 0; i < m.v.size(); ++i) out.v[i] = m.v[i] ? 0 : 1;
    return out;
}

namespace {

double sample_clamp(const GrayMap& src, double y, double x) {
    y = std::clamp(y, 0.0, static_cast<double>(src.h - 1));
    x = std::clamp(x, 0.0, static_cast<double>(src.w - 1));
    int y0 = std::min(static_cast<int>(y), src.h - 2 >= 0 ? src.h - 2 : 0);
    int x0 = std::min(static_cast<int>(x), src.w - 2 >= 0 ? src.w - 2 : 0);
    int y1 = std::min(y0 + 1, src.h - 1);
    int x1 = std::min(x0 + 1, src.w - 1);
    double fy = y - y0, fx = x - x0;
    return (1 - fy) * ((1 - fx) * src.at(y0, x0) + fx * src.at(y0, x1)) +
           fy * ((1 - fx) * src.at(y1, x0) + fx * src.at(y1, x1));
}

}  // namespace

GrayMap resize_bilinear(const GrayMap& m, int out_h, int out_w) {
    GrayMap out(out_h, out_w);
    double sy = static_cast<double>(m.h) / out_h;
    double sx = static_cast<double>(m.w) / out_w;
    for (int r = 0; r < out_h; ++r)
        for (int c = 0; c < out_w; ++c)
            out.at(r, c) = sample_clamp(m, (r + 0.5) * sy - 0.5, (c + 0.5) * sx - 0.5);
    return out;
}

RgbImage resize_bilinear(const RgbImage& m, int out_h, int out_w) {
    RgbImage out(out_h, out_w);
    GrayMap plane{};
    plane.h = m.h;
    plane.w = m.w;
    plane.v.resize(static_cast<size_t>(m.h) * m.w);
    for (int ch = 0; ch < 3; ++ch) {
        std::copy(m.v.begin() + static_cast<size_t>(ch) * m.h * m.w,
                  m.v.begin() + static_cast<size_t>(ch + 1) * m.h * m.w, plane.v.begin());
        GrayMap res = resize_bilinear(plane, out_h, out_w);
        std::copy(res.v.begin(), res.v.end(),
                  out.v.begin() + static_cast<size_t>(ch) * out_h * out_w);
    }
    return out;
}

RgbImage crop(const RgbImage& img, const BoundingBox& b) {
    if (b.top < 0 || b.left < 0 || b.bottom > img.h || b.right > img.w || b.height() < 1 ||
        b.width() < 1)
        throw std::invalid_argument("crop: box outside frame");
    RgbImage out(b.height(), b.width());
    for (int ch = 0; ch < 3; ++ch)
        for (int r = 0; r < out.h; ++r)
            for (int c = 0; c < out.w; ++c) out.at(ch, r, c) = img.at(ch, b.top + r, b.left + c);
    return out;
}

}  // namespace vsod
