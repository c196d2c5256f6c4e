#pragma once

#include <array>
#include <functional>
#include <string>

#include "vsod/image.hpp"
#include "vsod/nn/adam.hpp"
#include "vsod/nn/ops.hpp"
#include "vsod/nn/params.hpp"
#include "vsod/rng.hpp"

namespace vsod {

struct NetworkConfig {
    int input_h = 256;
    int input_w = 256;
    std::array<int, 5> widths{16, 32, 64, 128, 256};  // pyramid strides 2..32
    int decoder_width = 32;
    uint64_t seed = 1;

    void validate() const;
    std::string serialize() const;
    static NetworkConfig deserialize(const std::string& text);
};

nn::Value rgb_to_value(const RgbImage& img);
GrayMap value_to_gray(const nn::Value& v);  // {1,H,W} -> GrayMap, clamped to [0,1]

struct Conv {
    nn::Value w, b;
    int stride = 1;
    int pad = 1;
    nn::Value operator()(nn::Value x) const { return nn::conv2d(std::move(x), w, b, stride, pad); }
};

Conv make_conv(nn::ParamStore& store, const std::string& name, int in_ch, int out_ch, int k,
               int stride, int pad, Rng& rng);

/// Five stride-2 stages; produces feature maps at strides 2,4,8,16,32.
class Backbone {
public:
    Backbone() = default;
    Backbone(nn::ParamStore& store, const std::string& prefix, const NetworkConfig& cfg, Rng& rng);
    std::array<nn::Value, 5> forward(nn::Value x) const;

private:
    std::array<Conv, 5> entry_;
    std::array<Conv, 5> refine_;
};

/// Side-out aggregation: parallel pooled 3x3 branches summed residually.
class SaModule {
public:
    SaModule(nn::ParamStore& store, const std::string& prefix, int ch, Rng& rng);
    nn::Value forward(nn::Value x) const;

private:
    static constexpr std::array<int, 3> kScales{2, 4, 8};
    std::array<Conv, 3> branch_;
};

/// Top-down decoder over a 5-level pyramid; emits one sigmoid map per level
/// (coarsest first), each upsampled to the network input size. When a motion
/// pyramid is supplied its laterals join each fusion sum.
class FpnDecoder {
public:
    FpnDecoder() = default;
    FpnDecoder(nn::ParamStore& store, const std::string& prefix, const NetworkConfig& cfg,
               Rng& rng, bool with_motion, bool with_edges);

    struct Output {
        std::array<nn::Value, 5> maps;   // [0] stride-32 seed .. [4] finest
        std::array<nn::Value, 5> edges;  // populated only when built with edges
    };

    Output forward(const std::array<nn::Value, 5>& statics,
                   const std::array<nn::Value, 5>* motion, int out_h, int out_w) const;

private:
    std::array<Conv, 5> lateral_;
    std::array<Conv, 5> motion_lateral_;
    std::array<Conv, 5> fuse_;
    std::vector<SaModule> sa_;
    std::array<Conv, 5> head_;
    std::array<Conv, 5> edge_head_;
    bool with_motion_ = false;
    bool with_edges_ = false;
};

/// Coarse locating module: backbone + FPN decoder, five supervision maps.
class Clm {
public:
    explicit Clm(const NetworkConfig& cfg);

    std::array<nn::Value, 5> forward(const RgbImage& frame);
    GrayMap predict(const RgbImage& frame);          // finest map
    GrayMap predict_resized(const RgbImage& frame);  // any size in, same size out

    nn::ParamStore& params() { return store_; }
    const nn::ParamStore& params() const { return store_; }
    const NetworkConfig& config() const { return cfg_; }

    /// Locator closure for label generation (read-only use).
    std::function<GrayMap(const RgbImage&)> locator();

private:
    NetworkConfig cfg_;
    nn::ParamStore store_;
    Backbone backbone_;
    FpnDecoder decoder_;
};

/// Fine segmenting module: CLM topology plus per-level edge heads.
class Fsm {
public:
    explicit Fsm(const NetworkConfig& cfg);

    struct Output {
        std::array<nn::Value, 5> maps;
        std::array<nn::Value, 5> edges;
    };
    Output forward(const RgbImage& frame);
    GrayMap predict(const RgbImage& frame);

    nn::ParamStore& params() { return store_; }
    const NetworkConfig& config() const { return cfg_; }

private:
    NetworkConfig cfg_;
    nn::ParamStore store_;
    Backbone backbone_;
    FpnDecoder decoder_;
};

/// Five rendered flow images feeding the dynamic branch. Slots whose flow
/// pair does not exist carry a fill image and valid = false.
struct FlowBundle {
    std::array<RgbImage, 5> images;
    std::array<bool, 5> valid{};
    std::array<int, 5> offsets{};
};

class TwoStream {
public:
    explicit TwoStream(const NetworkConfig& cfg);

    std::array<nn::Value, 5> forward(const RgbImage& frame, const FlowBundle& bundle);
    GrayMap predict(const RgbImage& frame, const FlowBundle& bundle);

    /// Shared-weight encoder pass over each bundle slot.
    std::array<std::array<nn::Value, 5>, 5> flow_branch_forward(const FlowBundle& bundle);

    /// Per-flow scalar weights from the top pyramid level, and the weighted
    /// level-wise sum of the five pyramids.
    struct Weighted {
        std::array<nn::Value, 5> weights;
        std::array<nn::Value, 5> combined;
    };
    Weighted flow_weighting(const std::array<std::array<nn::Value, 5>, 5>& pyramids);

    std::array<nn::Value, 5> fuse_features(const std::array<nn::Value, 5>& statics,
                                           const std::array<nn::Value, 5>& motion);

    /// Copies backbone and decoder weights from a trained CLM (both branches
    /// share the CLM encoder weights at initialization).
    void init_from_clm(const Clm& clm);

    nn::ParamStore& params() { return store_; }
    const NetworkConfig& config() const { return cfg_; }

private:
    NetworkConfig cfg_;
    nn::ParamStore store_;
    Backbone static_enc_;
    Backbone flow_enc_;
    Conv flow_weight_;  // 1x1 compression of the top level
    FpnDecoder decoder_;
};

}  // namespace vsod
