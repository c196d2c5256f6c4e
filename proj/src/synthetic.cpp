#include "vsod/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "vsod/flow_io.hpp"
#include "vsod/imaging.hpp"
#include "vsod/png_io.hpp"
#include "vsod/rng.hpp"

namespace fs = std::filesystem;

namespace vsod {

namespace {

std::string index_name(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%05d", index);
    return buf;
}

enum class Shape { kSquare, kDisk, kTriangle };

struct ObjectSpec {
    Shape shape = Shape::kSquare;
    int size = 16;                   // bounding extent in pixels
    double color[3] = {1, 1, 1};     // bright foreground
    double bg_color[3] = {0, 0, 0};  // dark background
};

BinaryMask rasterize(const ObjectSpec& obj, int h, int w, int top, int left) {
    BinaryMask mask(h, w);
    int s = obj.size;
    for (int r = 0; r < s; ++r) {
        for (int c = 0; c < s; ++c) {
            int rr = top + r, cc = left + c;
            if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
            bool inside = false;
            switch (obj.shape) {
                case Shape::kSquare:
                    inside = true;
                    break;
                case Shape::kDisk: {
                    double dy = r - (s - 1) / 2.0, dx = c - (s - 1) / 2.0;
                    inside = dy * dy + dx * dx <= (s / 2.0) * (s / 2.0);
                    break;
                }
                case Shape::kTriangle:
                    // axis-aligned right triangle
                    inside = c <= r;
                    break;
            }
            if (inside) mask.at(rr, cc) = 1;
        }
    }
    return mask;
}

RgbImage compose(const BinaryMask& mask, const ObjectSpec& obj, double noise, Rng& rng) {
    RgbImage img(mask.h, mask.w);
    for (int r = 0; r < mask.h; ++r) {
        for (int c = 0; c < mask.w; ++c) {
            bool fg = mask.at(r, c);
            for (int ch = 0; ch < 3; ++ch) {
                double base = fg ? obj.color[ch] : obj.bg_color[ch];
                double v = base + noise * (rng.uniform() - 0.5);
                img.at(ch, r, c) = std::clamp(v, 0.0, 1.0);
            }
        }
    }
    return img;
}

ObjectSpec random_object(Rng& rng, int h, int w) {
    ObjectSpec obj;
    obj.shape = static_cast<Shape>(rng.uniform_int(3));
    int lo = std::min(h, w) / 4, hi = std::min(h, w) * 2 / 5;
    obj.size = lo + static_cast<int>(rng.uniform_int(static_cast<uint64_t>(hi - lo + 1)));
    // bright warm object against a dark cool background keeps contrast high
    obj.color[0] = rng.uniform(0.7, 1.0);
    obj.color[1] = rng.uniform(0.5, 0.9);
    obj.color[2] = rng.uniform(0.0, 0.4);
    obj.bg_color[0] = rng.uniform(0.0, 0.2);
    obj.bg_color[1] = rng.uniform(0.1, 0.3);
    obj.bg_color[2] = rng.uniform(0.2, 0.45);
    return obj;
}

// constant displacement delta on a region covering both object footprints
FlowField make_flow(const BinaryMask& obj_src, const BinaryMask& obj_dst, double du, double dv) {
    BinaryMask region(obj_src.h, obj_src.w);
    for (size_t i = 0; i < region.v.size(); ++i)
        region.v[i] = (obj_src.v[i] || obj_dst.v[i]) ? 1 : 0;
    region = dilate(region, 8);
    FlowField flow(obj_src.h, obj_src.w);
    for (size_t i = 0; i < region.v.size(); ++i) {
        if (region.v[i]) {
            flow.u[i] = du;
            flow.vdisp[i] = dv;
        }
    }
    return flow;
}

struct ClipPlan {
    std::string name;
    ObjectSpec obj;
    int start_top = 0, start_left = 0;
    int dy = 0, dx = 0;  // per-frame displacement

    int top(int t) const { return start_top + t * dy; }
    int left(int t) const { return start_left + t * dx; }
};

ClipPlan plan_clip(Rng& rng, const SyntheticSpec& spec, bool moving, int serial) {
    ClipPlan plan;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%02d", moving ? "moving" : "static", serial);
    plan.name = buf;
    plan.obj = random_object(rng, spec.height, spec.width);

    const int last = spec.frames_per_clip - 1;
    if (moving) {
        do {
            plan.dy = static_cast<int>(rng.uniform_int(3)) - 1;
            plan.dx = static_cast<int>(rng.uniform_int(3)) - 1;
        } while (plan.dy == 0 && plan.dx == 0);
    }
    // keep the full trajectory inside the frame with a small border margin
    auto pick_start = [&](int dim, int step) {
        int margin = 2;
        int lo = margin + std::max(0, -step * last);
        int hi = dim - plan.obj.size - margin - std::max(0, step * last);
        if (hi < lo) throw std::runtime_error("synthetic clip does not fit its frame");
        return lo + static_cast<int>(rng.uniform_int(static_cast<uint64_t>(hi - lo + 1)));
    };
    plan.start_top = pick_start(spec.height, plan.dy);
    plan.start_left = pick_start(spec.width, plan.dx);
    return plan;
}

SyntheticSummary write_clip(const fs::path& dir, const ClipPlan& plan, const SyntheticSpec& spec,
                            Rng& rng) {
    SyntheticSummary summary;
    fs::create_directories(dir / "frames");
    fs::create_directories(dir / "flow");
    fs::create_directories(dir / "gt");

    std::vector<BinaryMask> masks;
    masks.reserve(static_cast<size_t>(spec.frames_per_clip));
    for (int t = 0; t < spec.frames_per_clip; ++t) {
        masks.push_back(rasterize(plan.obj, spec.height, spec.width, plan.top(t), plan.left(t)));
        RgbImage frame = compose(masks.back(), plan.obj, spec.noise, rng);
        write_rgb_png((dir / "frames" / (index_name(t) + ".png")).string(), frame);
        write_gray_png((dir / "gt" / (index_name(t) + ".png")).string(), to_gray(masks.back()));
        ++summary.clip_frames;
        ++summary.gt_files;
    }
    for (int a = 0; a < spec.frames_per_clip; ++a) {
        for (int b = std::max(0, a - spec.flow_window);
             b <= std::min(spec.frames_per_clip - 1, a + spec.flow_window); ++b) {
            if (a == b) continue;
            // displacement carrying frame a content onto frame b positions
            double du = static_cast<double>((b - a) * plan.dx);
            double dv = static_cast<double>((b - a) * plan.dy);
            FlowField flow = make_flow(masks[static_cast<size_t>(a)],
                                       masks[static_cast<size_t>(b)], du, dv);
            write_flo((dir / "flow" / (index_name(a) + "_" + index_name(b) + ".flo")).string(),
                      flow);
            ++summary.flow_files;
        }
    }
    return summary;
}

}  // namespace

SyntheticSummary generate_synthetic_corpus(const SyntheticSpec& spec, uint64_t seed,
                                           const std::string& out_dir) {
    if (spec.static_clip_count > spec.clip_count)
        throw std::invalid_argument("synthetic spec: more static clips than clips");
    fs::path root(out_dir);
    fs::create_directories(root / "images");
    fs::create_directories(root / "masks");

    SyntheticSummary summary;
    Rng rng(seed);

    Rng image_rng = rng.fork(1);
    for (int i = 0; i < spec.image_count; ++i) {
        ObjectSpec obj = random_object(image_rng, spec.height, spec.width);
        int margin = 2;
        int top = margin + static_cast<int>(image_rng.uniform_int(
                               static_cast<uint64_t>(spec.height - obj.size - 2 * margin + 1)));
        int left = margin + static_cast<int>(image_rng.uniform_int(
                                static_cast<uint64_t>(spec.width - obj.size - 2 * margin + 1)));
        BinaryMask mask = rasterize(obj, spec.height, spec.width, top, left);
        RgbImage img = compose(mask, obj, spec.noise, image_rng);
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d", i);
        write_rgb_png((root / "images" / (std::string(buf) + ".png")).string(), img);
        write_gray_png((root / "masks" / (std::string(buf) + ".png")).string(), to_gray(mask));
        ++summary.images;
    }

    Rng clip_rng = rng.fork(2);
    int moving_serial = 0, static_serial = 0;
    for (int i = 0; i < spec.clip_count; ++i) {
        bool moving = i >= spec.static_clip_count;
        ClipPlan plan = plan_clip(clip_rng, spec, moving,
                                  moving ? moving_serial++ : static_serial++);
        SyntheticSummary s = write_clip(root / "train_clips" / plan.name, plan, spec, clip_rng);
        summary.clip_frames += s.clip_frames;
        summary.flow_files += s.flow_files;
        summary.gt_files += s.gt_files;
    }

    Rng val_rng = rng.fork(3);
    for (int i = 0; i < spec.val_clip_count; ++i) {
        ClipPlan plan = plan_clip(val_rng, spec, /*moving=*/true, i);
        plan.name = "val_" + plan.name;
        SyntheticSummary s = write_clip(root / "val_clips" / plan.name, plan, spec, val_rng);
        summary.clip_frames += s.clip_frames;
        summary.flow_files += s.flow_files;
        summary.gt_files += s.gt_files;
    }
    return summary;
}

}  // namespace vsod
