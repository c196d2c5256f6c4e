#include "vsod/labels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include "vsod/flow_io.hpp"
#include "vsod/imaging.hpp"
#include "vsod/losses.hpp"
#include "vsod/metrics.hpp"
#include "vsod/png_io.hpp"

namespace fs = std::filesystem;

namespace vsod {

namespace {

std::string index_name(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%05d", index);
    return buf;
}

}  // namespace

std::string VideoClip::flow_path(int src, int dst) const {
    fs::path p = fs::path(root) / "flow" / (index_name(src) + "_" + index_name(dst) + ".flo");
    if (!fs::exists(p)) return {};
    return p.string();
}

VideoClip load_clip(const std::string& clip_dir) {
    fs::path frames_dir = fs::path(clip_dir) / "frames";
    if (!fs::is_directory(frames_dir))
        throw std::runtime_error("clip has no frames directory: " + clip_dir);

    std::map<int, std::string> frames;
    for (const auto& entry : fs::directory_iterator(frames_dir)) {
        if (entry.path().extension() != ".png") continue;
        frames[std::stoi(entry.path().stem().string())] = entry.path().string();
    }
    if (frames.empty()) throw std::runtime_error("clip has no frames: " + clip_dir);

    VideoClip clip;
    clip.name = fs::path(clip_dir).filename().string();
    clip.root = clip_dir;
    clip.first_index = frames.begin()->first;
    int expected = clip.first_index;
    for (const auto& [index, path] : frames) {
        if (index != expected)
            throw std::runtime_error("clip " + clip.name + ": frame indices not contiguous at " +
                                     std::to_string(index));
        ++expected;
        clip.frame_paths.push_back(path);
        fs::path gt = fs::path(clip_dir) / "gt" / (index_name(index) + ".png");
        clip.gt_paths.push_back(fs::exists(gt) ? gt.string() : std::string{});
    }
    return clip;
}

std::vector<VideoClip> load_video_dataset(const std::string& dataset_dir) {
    if (!fs::is_directory(dataset_dir))
        throw std::runtime_error("not a dataset directory: " + dataset_dir);
    std::vector<std::string> clip_dirs;
    for (const auto& entry : fs::directory_iterator(dataset_dir))
        if (entry.is_directory() && fs::is_directory(entry.path() / "frames"))
            clip_dirs.push_back(entry.path().string());
    std::sort(clip_dirs.begin(), clip_dirs.end());
    std::vector<VideoClip> clips;
    clips.reserve(clip_dirs.size());
    for (const auto& dir : clip_dirs) clips.push_back(load_clip(dir));
    if (clips.empty()) throw std::runtime_error("dataset has no clips: " + dataset_dir);
    return clips;
}

GrayMap body_attention_target(const BinaryMask& gt, int dilate_radius, double sigma) {
    if (gt.count() == 0) throw std::invalid_argument("body_attention_target: empty ground truth");
    GrayMap blurred = gaussian_blur(to_gray(dilate(gt, dilate_radius)), sigma);
    double max_v = *std::max_element(blurred.v.begin(), blurred.v.end());
    for (double& v : blurred.v) v /= max_v;
    return blurred;
}

std::optional<HighSaliencyRecord> discriminate_high_saliency(const GrayMap& s, const GrayMap& g,
                                                             double t_thresh) {
    if (t_thresh <= 0.0 || t_thresh >= 1.0)
        throw std::invalid_argument("discriminate_high_saliency: threshold must be in (0,1)");
    SoftIou iou = soft_iou(s, g);
    if (iou.degenerate || iou.value < t_thresh) return std::nullopt;
    HighSaliencyRecord rec;
    rec.static_map = s;
    rec.dynamic_map = g;
    rec.iou = iou.value;
    rec.location = s;  // the static map becomes the label
    return rec;
}

int track_radius(int h, int w) {
    return std::max(1, static_cast<int>(std::lround(2.0 * std::min(h, w) / 256.0)));
}

std::optional<GrayMap> track_to_adjacent(const GrayMap& m0, const FlowField& flow_n_to_0,
                                         const RgbImage& frame_n, const Locator& locator) {
    if (m0.h != frame_n.h || m0.w != frame_n.w)
        throw std::invalid_argument("track_to_adjacent: map/frame size mismatch");

    GrayMap remapped = backward_warp(m0, flow_n_to_0);
    int r = track_radius(m0.h, m0.w);
    BinaryMask mask = erode(dilate(threshold(remapped, 0.5), r), r);
    auto components = connected_components(mask);
    if (components.empty()) return std::nullopt;  // the object left the frame

    GrayMap canvas(m0.h, m0.w, 0.0);
    for (const auto& comp : components) {
        BoundingBox box = expand_box(component_box(comp), frame_n.h, frame_n.w);
        GrayMap located = locator(crop(frame_n, box));
        for (int rr = 0; rr < located.h; ++rr)
            for (int cc = 0; cc < located.w; ++cc) {
                double& dst = canvas.at(box.top + rr, box.left + cc);
                dst = std::max(dst, located.at(rr, cc));  // overlaps keep the stronger call
            }
    }
    return canvas;
}

SpatiotemporalLabel resolve_label_conflicts(const std::vector<SpatiotemporalLabel>& candidates) {
    if (candidates.empty())
        throw std::invalid_argument("resolve_label_conflicts: no candidates");
    const SpatiotemporalLabel* best = nullptr;
    for (const auto& cand : candidates) {
        if (cand.provenance == Provenance::kHighSaliency) return cand;
        if (!best || cand.distance < best->distance ||
            (cand.distance == best->distance && cand.source_index < best->source_index))
            best = &cand;
    }
    return *best;
}

namespace {

void log_line(const LabelGenOptions& opts, const std::string& msg) {
    if (opts.log) *opts.log << msg << '\n';
}

}  // namespace

ClipLabels build_clip_labels(const VideoClip& clip, const Locator& locator,
                             const LabelGenOptions& opts) {
    ClipLabels out;
    out.clip_name = clip.name;
    const int n = clip.frame_count();
    const int first = clip.first_index;

    std::vector<RgbImage> frames(static_cast<size_t>(n));
    std::vector<std::optional<HighSaliencyRecord>> records(static_cast<size_t>(n));

    for (int i = 0; i < n; ++i) {
        frames[static_cast<size_t>(i)] = read_rgb_png(clip.frame_paths[static_cast<size_t>(i)]);
        const RgbImage& frame = frames[static_cast<size_t>(i)];
        GrayMap static_map = locator(frame);

        // dynamic map from the forward pair, backward pair for the last frame
        int index = first + i;
        std::string flow_file = clip.flow_path(index, index + 1);
        if (flow_file.empty()) flow_file = clip.flow_path(index, index - 1);
        if (flow_file.empty()) {
            ++out.skipped_flow_pairs;
            log_line(opts, "warning: no adjacent flow for " + clip.name + " frame " +
                               std::to_string(index) + ", frame cannot be high-saliency");
            continue;
        }
        GrayMap dynamic_map = locator(render_flow(read_flo(flow_file)));
        auto rec = discriminate_high_saliency(static_map, dynamic_map, opts.t_thresh);
        if (rec) {
            rec->frame_index = index;
            records[static_cast<size_t>(i)] = std::move(rec);
        }
    }

    double iou_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        int index = first + i;
        if (records[static_cast<size_t>(i)]) {
            const auto& rec = *records[static_cast<size_t>(i)];
            out.labels.push_back({index, rec.location, Provenance::kHighSaliency, index, 0,
                                  rec.iou});
            ++out.high_saliency_frames;
            iou_sum += rec.iou;
            continue;
        }
        // tracked candidates in resolution-preference order: nearest source
        // first, lower index on ties
        std::optional<SpatiotemporalLabel> tracked;
        for (int d = 1; d <= opts.track_window && !tracked; ++d) {
            for (int source : {index - d, index + d}) {
                if (!clip.in_range(source)) continue;
                const auto& src_rec = records[static_cast<size_t>(source - first)];
                if (!src_rec) continue;
                std::string flow_file = clip.flow_path(index, source);
                if (flow_file.empty()) {
                    ++out.skipped_flow_pairs;
                    log_line(opts, "warning: missing flow " + std::to_string(index) + "->" +
                                       std::to_string(source) + " in " + clip.name +
                                       ", pair skipped");
                    continue;
                }
                auto map = track_to_adjacent(src_rec->location, read_flo(flow_file),
                                             frames[static_cast<size_t>(i)], locator);
                if (!map) continue;
                tracked = SpatiotemporalLabel{index, std::move(*map), Provenance::kTracked,
                                              source, d, src_rec->iou};
                break;
            }
        }
        if (tracked) {
            out.labels.push_back(std::move(*tracked));
            ++out.tracked_frames;
        }
    }
    if (out.high_saliency_frames > 0) out.mean_iou = iou_sum / out.high_saliency_frames;
    return out;
}

std::vector<ClipLabels> build_location_dataset(const std::vector<VideoClip>& clips,
                                               const Locator& locator,
                                               const LabelGenOptions& opts) {
    std::vector<ClipLabels> out;
    out.reserve(clips.size());
    for (const auto& clip : clips) out.push_back(build_clip_labels(clip, locator, opts));
    return out;
}

void write_clip_labels(const std::string& labels_root, const ClipLabels& labels) {
    fs::path dir = fs::path(labels_root) / labels.clip_name;
    fs::create_directories(dir);
    std::ofstream manifest(dir / "manifest.tsv", std::ios::trunc);
    if (!manifest) throw std::runtime_error("cannot write label manifest in " + dir.string());
    manifest << "frame\tprovenance\tsource\tdistance\tiou\n";
    char iou_buf[32];
    for (const auto& label : labels.labels) {
        write_gray_png((dir / (index_name(label.frame_index) + ".png")).string(),
                       label.location);
        std::snprintf(iou_buf, sizeof(iou_buf), "%.6f", label.iou);
        manifest << label.frame_index << '\t'
                 << (label.provenance == Provenance::kHighSaliency ? "high_saliency" : "tracked")
                 << '\t' << label.source_index << '\t' << label.distance << '\t' << iou_buf
                 << '\n';
    }
}

std::vector<LoadedLabel> read_clip_labels(const std::string& labels_root,
                                          const std::string& clip_name) {
    fs::path dir = fs::path(labels_root) / clip_name;
    std::ifstream manifest(dir / "manifest.tsv");
    if (!manifest) throw std::runtime_error("no label manifest in " + dir.string());
    std::string header;
    std::getline(manifest, header);
    std::vector<LoadedLabel> out;
    int frame, source, distance;
    std::string provenance;
    double iou;
    while (manifest >> frame >> provenance >> source >> distance >> iou) {
        LoadedLabel label;
        label.frame_index = frame;
        label.provenance = provenance == "high_saliency" ? Provenance::kHighSaliency
                                                         : Provenance::kTracked;
        label.location = read_gray_png((dir / (index_name(frame) + ".png")).string());
        out.push_back(std::move(label));
    }
    return out;
}

}  // namespace vsod
