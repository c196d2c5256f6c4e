#pragma once

#include <cstdint>
#include <string>

#include "vsod/image.hpp"

namespace vsod {

/// Desk-scale corpus: bright textured shapes on darker textured backgrounds.
/// Clips move their object by an integer per-frame displacement so emitted
/// flow fields warp ground truth between frames exactly.
struct SyntheticSpec {
    int image_count = 40;      // still image/mask pairs
    int clip_count = 20;       // training clips
    int val_clip_count = 4;    // held-out clips (with GT)
    int static_clip_count = 4; // of clip_count, zero-motion clips
    int frames_per_clip = 20;
    int height = 64;
    int width = 64;
    int flow_window = 1;       // emit flow pairs up to this frame distance
    double noise = 0.05;       // texture noise amplitude
};

struct SyntheticSummary {
    int images = 0;
    int clip_frames = 0;
    int flow_files = 0;
    int gt_files = 0;
};

// Layout under out_dir:
//   images/%04d.png, masks/%04d.png
//   train_clips/<clip>/{frames,flow,gt}/...
//   val_clips/<clip>/{frames,flow,gt}/...
// Moving clips are named moving_##, zero-motion clips static_##.
SyntheticSummary generate_synthetic_corpus(const SyntheticSpec& spec, uint64_t seed,
                                           const std::string& out_dir);

}  // namespace vsod
