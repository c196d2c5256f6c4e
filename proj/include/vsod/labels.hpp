#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vsod/image.hpp"

namespace vsod {

/// Read-only saliency predictor (a trained coarse locator in production,
/// an oracle in tests). Must accept any frame size.
using Locator = std::function<GrayMap(const RgbImage&)>;

/// One clip on disk: frames/%05d.png, flow/%05d_%05d.flo, optional gt/%05d.png.
struct VideoClip {
    std::string name;
    std::string root;
    int first_index = 0;
    std::vector<std::string> frame_paths;
    std::vector<std::string> gt_paths;  // empty string when absent

    int frame_count() const { return static_cast<int>(frame_paths.size()); }
    int last_index() const { return first_index + frame_count() - 1; }
    bool in_range(int index) const { return index >= first_index && index <= last_index(); }
    std::string flow_path(int src, int dst) const;  // empty when the file is absent
};

VideoClip load_clip(const std::string& clip_dir);
std::vector<VideoClip> load_video_dataset(const std::string& dataset_dir);

struct HighSaliencyRecord {
    int frame_index = 0;
    GrayMap static_map;
    GrayMap dynamic_map;
    double iou = 0.0;
    GrayMap location;  // always the static map
};

enum class Provenance { kHighSaliency, kTracked };

struct SpatiotemporalLabel {
    int frame_index = 0;
    GrayMap location;
    Provenance provenance = Provenance::kHighSaliency;
    int source_index = 0;  // frame itself for high-saliency labels
    int distance = 0;      // 0 for high-saliency, else 1..track_window
    double iou = 0.0;      // discriminator score of the source record
};

/// Dilate + Gaussian blur of a nonempty mask, rescaled so the maximum is
/// exactly 1.0 (the saturated plateau seeds the peak set).
GrayMap body_attention_target(const BinaryMask& gt, int dilate_radius, double sigma);

/// Accepts the frame when static and dynamic maps agree (soft IOU >= t).
std::optional<HighSaliencyRecord> discriminate_high_saliency(const GrayMap& s, const GrayMap& g,
                                                             double t_thresh);

/// Morphological cleanup radius for remapped masks: 2 px at 256 resolution,
/// scaled with the frame.
int track_radius(int h, int w);

/// Propagates a location map into an adjacent frame: warp along the flow,
/// close + box the surviving regions, re-locate each doubled box crop, and
/// paste the predictions back (per-pixel max). Empty warps yield nullopt.
std::optional<GrayMap> track_to_adjacent(const GrayMap& m0, const FlowField& flow_n_to_0,
                                         const RgbImage& frame_n, const Locator& locator);

/// High-saliency candidates win; otherwise minimum distance, ties to the
/// lower source index.
SpatiotemporalLabel resolve_label_conflicts(const std::vector<SpatiotemporalLabel>& candidates);

struct ClipLabels {
    std::string clip_name;
    std::vector<SpatiotemporalLabel> labels;  // one per covered frame, ascending index
    int high_saliency_frames = 0;
    int tracked_frames = 0;
    int skipped_flow_pairs = 0;
    double mean_iou = 0.0;  // over accepted high-saliency frames
};

struct LabelGenOptions {
    double t_thresh = 0.7;
    int track_window = 6;
    std::ostream* log = nullptr;
};

ClipLabels build_clip_labels(const VideoClip& clip, const Locator& locator,
                             const LabelGenOptions& opts);

std::vector<ClipLabels> build_location_dataset(const std::vector<VideoClip>& clips,
                                               const Locator& locator,
                                               const LabelGenOptions& opts);

/// labels/<clip>/%05d.png plus manifest.tsv (frame, provenance, source,
/// distance, iou).
void write_clip_labels(const std::string& labels_root, const ClipLabels& labels);

struct LoadedLabel {
    int frame_index = 0;
    GrayMap location;
    Provenance provenance = Provenance::kHighSaliency;
};

std::vector<LoadedLabel> read_clip_labels(const std::string& labels_root,
                                          const std::string& clip_name);

}  // namespace vsod
