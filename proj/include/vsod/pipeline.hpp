#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "vsod/config.hpp"
#include "vsod/labels.hpp"
#include "vsod/metrics.hpp"
#include "vsod/networks.hpp"
#include "vsod/rng.hpp"

namespace vsod {

inline constexpr const char* kVersionStamp = "vsod 0.1.0";

struct ImagePair {
    std::string stem;
    RgbImage image;
    BinaryMask mask;
};

struct IngestStats {
    int loaded = 0;
    int skipped = 0;
    int coerced = 0;  // non-binary masks binarized at 0.5
};

/// Pairs images/<stem>.png with masks/<stem>.png. Corrupt or unpaired files
/// are skipped with a warning; zero usable pairs aborts.
std::vector<ImagePair> ingest_image_dataset(const std::string& root, IngestStats* stats = nullptr,
                                            std::ostream* log = nullptr);

/// Five distinct offsets from {-5..-1,+1..+5}; offsets without a usable flow
/// pair (clip edges, missing files, slots beyond the configured real count)
/// carry fill images: constant random value during training, mid-gray during
/// inference. Pass clip = nullptr for still-image data (all fills).
FlowBundle sample_flow_neighbors(const VideoClip* clip, int frame_index, Rng& rng, bool training,
                                 int real_slots, int out_h, int out_w);

/// Locate -> attention zoom -> fine segment -> restore. No post-processing.
GrayMap progressive_inference(TwoStream& tln, Fsm& fsm, const RgbImage& frame,
                              const FlowBundle& bundle, double lambda);

struct StageResult {
    std::vector<double> loss_trace;  // one entry per optimization step
    std::string checkpoint_path;
};

StageResult train_stage_clm(const RunConfig& cfg, Clm& clm, std::ostream* log = nullptr);
StageResult train_stage_fsm(const RunConfig& cfg, Fsm& fsm, std::ostream* log = nullptr);

struct LabelGenSummary {
    int clips = 0;
    int covered_frames = 0;
    int high_saliency_frames = 0;
    int tracked_frames = 0;
    int skipped_flow_pairs = 0;
    double mean_iou = 0.0;
};

/// Runs the locator over the video root and writes labels + manifests.
LabelGenSummary run_label_generation(const RunConfig& cfg, Clm& clm, std::ostream* log = nullptr);

StageResult train_stage_two_stream(const RunConfig& cfg, TwoStream& tln,
                                   std::ostream* log = nullptr);

struct EvalResult {
    std::string dataset;
    MetricReport report;
    int maps_written = 0;
    int frames_without_gt = 0;
};

/// Saliency maps for every frame; metrics, curve CSV and recall/precision
/// scatter rows for frames that have ground truth.
EvalResult evaluate(const RunConfig& cfg, TwoStream& tln, Fsm& fsm,
                    const std::string& dataset_root, std::ostream* log = nullptr);

/// Maps only (no ground truth required).
int run_inference(const RunConfig& cfg, TwoStream& tln, Fsm& fsm,
                  const std::string& dataset_root, std::ostream* log = nullptr);

/// Collects what a CLI invocation did; serialized as the run manifest.
class RunRecorder {
public:
    RunRecorder(const RunConfig& cfg, std::string stage);
    void add_file(const std::string& path);
    void add_trace(const std::string& name, const std::vector<double>& trace);
    void add_stat(const std::string& key, double value);
    /// Atomic write of <out>/manifest_<stage>.json.
    std::string write() const;

private:
    const RunConfig& cfg_;
    std::string stage_;
    std::vector<std::string> files_;
    std::vector<std::pair<std::string, std::vector<double>>> traces_;
    std::vector<std::pair<std::string, double>> stats_;
};

// Checkpoint names used across stages.
std::string clm_checkpoint(const RunConfig& cfg);
std::string fsm_checkpoint(const RunConfig& cfg);
std::string tln_checkpoint(const RunConfig& cfg);

NetworkConfig network_config_of(const RunConfig& cfg);

}  // namespace vsod
