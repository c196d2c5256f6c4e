#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>

#include "vsod/synthetic.hpp"

namespace vsod {

/// Flat key=value run configuration. Defaults carry the reference training
/// recipe (adaptive-moment optimizer, lr 5e-5, weight decay 1e-5, x0.1 decay
/// after 15 of 24 epochs, agreement threshold 0.7, +-6 tracking window, five
/// flow inputs); desk-scale runs override sizes and epoch counts.
struct RunConfig {
    uint64_t seed = 1;
    std::string out_dir = "out";

    std::string image_root;
    std::string video_root;
    std::string eval_root;
    std::string labels_root;   // defaults to <out>/labels
    std::string stage_input;   // directory with upstream checkpoints

    double t_thresh = 0.7;
    int track_window = 6;
    int flow_bundle = 5;

    double lr = 5e-5;
    double weight_decay = 1e-5;
    double lr_decay = 0.1;
    int lr_decay_epoch = 15;
    int epochs = 24;
    int clm_epochs = 0;  // 0 = inherit epochs
    int fsm_epochs = 0;
    int tln_epochs = 0;

    int input_h = 256;
    int input_w = 256;
    std::array<int, 5> widths{16, 32, 64, 128, 256};
    int decoder_width = 32;

    double sampler_lambda = 0.25;
    // dilation must out-reach the 3-sigma blur truncation or the saturated
    // plateau of the target shrinks inside the object
    double body_dilate_frac = 0.10;  // of min(H,W)
    double body_sigma_frac = 0.025;

    SyntheticSpec synth;

    std::string effective_labels_root() const;
    std::string checkpoints_dir() const;
    int stage_epochs(int override_value) const {
        return override_value > 0 ? override_value : epochs;
    }
    int body_dilate_radius() const;
    double body_sigma() const;

    void validate() const;
    std::map<std::string, std::string> as_map() const;
};

/// Parses a key=value file ('#' starts a comment). Unknown keys are errors.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& text);

}  // namespace vsod
