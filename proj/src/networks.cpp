#include "vsod/networks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "vsod/imaging.hpp"

namespace vsod {

void NetworkConfig::validate() const {
    if (input_h < 64 || input_w < 64)
        throw std::invalid_argument("NetworkConfig: input must be at least 64x64");
    if (input_h % 32 != 0 || input_w % 32 != 0)
        throw std::invalid_argument("NetworkConfig: input size must be divisible by 32");
    for (int w : widths)
        if (w < 1) throw std::invalid_argument("NetworkConfig: channel widths must be positive");
    if (decoder_width < 1)
        throw std::invalid_argument("NetworkConfig: decoder width must be positive");
}

std::string NetworkConfig::serialize() const {
    std::ostringstream out;
    out << "input_h=" << input_h << ";input_w=" << input_w << ";widths=" << widths[0] << ","
        << widths[1] << "," << widths[2] << "," << widths[3] << "," << widths[4]
        << ";decoder_width=" << decoder_width << ";seed=" << seed;
    return out.str();
}

NetworkConfig NetworkConfig::deserialize(const std::string& text) {
    NetworkConfig cfg;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ';')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw std::runtime_error("bad network config: " + item);
        std::string key = item.substr(0, eq), val = item.substr(eq + 1);
        if (key == "input_h")
            cfg.input_h = std::stoi(val);
        else if (key == "input_w")
            cfg.input_w = std::stoi(val);
        else if (key == "decoder_width")
            cfg.decoder_width = std::stoi(val);
        else if (key == "seed")
            cfg.seed = std::stoull(val);
        else if (key == "widths") {
            std::istringstream ws(val);
            std::string tok;
            for (auto& w : cfg.widths) {
                if (!std::getline(ws, tok, ',')) throw std::runtime_error("bad widths list");
                w = std::stoi(tok);
            }
        } else
            throw std::runtime_error("unknown network config key: " + key);
    }
    cfg.validate();
    return cfg;
}

nn::Value rgb_to_value(const RgbImage& img) {
    return nn::make_const(nn::Tensor({3, img.h, img.w}, img.v));
}

GrayMap value_to_gray(const nn::Value& v) {
    const nn::Tensor& t = v->val;
    if (t.rank() != 3 || t.dim(0) != 1)
        throw std::invalid_argument("value_to_gray: expected {1,H,W}");
    GrayMap m(t.dim(1), t.dim(2));
    for (size_t i = 0; i < m.v.size(); ++i) m.v[i] = std::clamp(t[i], 0.0, 1.0);
    return m;
}

Conv make_conv(nn::ParamStore& store, const std::string& name, int in_ch, int out_ch, int k,
               int stride, int pad, Rng& rng) {
    Conv conv;
    conv.w = store.create(name + ".w", {out_ch, in_ch, k, k});
    conv.b = store.create(name + ".b", {out_ch});
    conv.stride = stride;
    conv.pad = pad;
    nn::he_normal_init(conv.w->val, in_ch * k * k, rng);
    return conv;
}

Backbone::Backbone(nn::ParamStore& store, const std::string& prefix, const NetworkConfig& cfg,
                   Rng& rng) {
    int in_ch = 3;
    for (int i = 0; i < 5; ++i) {
        int out_ch = cfg.widths[static_cast<size_t>(i)];
        entry_[i] = make_conv(store, prefix + ".s" + std::to_string(i) + ".entry", in_ch, out_ch,
                              3, 2, 1, rng);
        refine_[i] = make_conv(store, prefix + ".s" + std::to_string(i) + ".refine", out_ch,
                               out_ch, 3, 1, 1, rng);
        in_ch = out_ch;
    }
}

std::array<nn::Value, 5> Backbone::forward(nn::Value x) const {
    std::array<nn::Value, 5> pyramid;
    for (int i = 0; i < 5; ++i) {
        x = nn::leaky_relu(entry_[i](x));
        x = nn::leaky_relu(refine_[i](x));
        pyramid[i] = x;
    }
    return pyramid;
}

SaModule::SaModule(nn::ParamStore& store, const std::string& prefix, int ch, Rng& rng) {
    for (size_t i = 0; i < kScales.size(); ++i)
        branch_[i] = make_conv(store, prefix + ".p" + std::to_string(kScales[i]), ch, ch, 3, 1, 1,
                               rng);
}

nn::Value SaModule::forward(nn::Value x) const {
    const int h = x->val.dim(1), w = x->val.dim(2);
    nn::Value out = x;
    for (size_t i = 0; i < kScales.size(); ++i) {
        nn::Value pooled = nn::avg_pool(x, kScales[i]);
        nn::Value conv = branch_[i](pooled);
        out = nn::add(out, nn::resize_bilinear(conv, h, w));
    }
    return out;
}

FpnDecoder::FpnDecoder(nn::ParamStore& store, const std::string& prefix, const NetworkConfig& cfg,
                       Rng& rng, bool with_motion, bool with_edges)
    : with_motion_(with_motion), with_edges_(with_edges) {
    const int d = cfg.decoder_width;
    for (int i = 0; i < 5; ++i) {
        std::string level = prefix + ".l" + std::to_string(i);
        lateral_[i] =
            make_conv(store, level + ".lat", cfg.widths[static_cast<size_t>(i)], d, 1, 1, 0, rng);
        if (with_motion)
            motion_lateral_[i] = make_conv(store, level + ".mlat",
                                           cfg.widths[static_cast<size_t>(i)], d, 1, 1, 0, rng);
        fuse_[i] = make_conv(store, level + ".fuse", d, d, 3, 1, 1, rng);
        sa_.emplace_back(store, level + ".sa", d, rng);
        head_[i] = make_conv(store, level + ".head", d, 1, 1, 1, 0, rng);
        if (with_edges)
            edge_head_[i] = make_conv(store, level + ".edge", d, 1, 1, 1, 0, rng);
    }
}

FpnDecoder::Output FpnDecoder::forward(const std::array<nn::Value, 5>& statics,
                                       const std::array<nn::Value, 5>* motion, int out_h,
                                       int out_w) const {
    if (motion && !with_motion_)
        throw std::logic_error("FpnDecoder: built without motion laterals");
    Output out;
    nn::Value carry;
    for (int level = 4; level >= 0; --level) {
        nn::Value x = lateral_[level](statics[static_cast<size_t>(level)]);
        if (motion)
            x = nn::add(x, motion_lateral_[level]((*motion)[static_cast<size_t>(level)]));
        if (carry) {
            carry = nn::resize_bilinear(carry, x->val.dim(1), x->val.dim(2));
            x = nn::add(x, carry);
        }
        x = nn::leaky_relu(fuse_[level](x));
        x = sa_[static_cast<size_t>(level)].forward(x);
        carry = x;

        // supervision taps sit after the aggregation module
        size_t slot = static_cast<size_t>(4 - level);  // coarsest first
        out.maps[slot] = nn::resize_bilinear(nn::sigmoid(head_[level](x)), out_h, out_w);
        if (with_edges_)
            out.edges[slot] = nn::resize_bilinear(nn::sigmoid(edge_head_[level](x)), out_h, out_w);
    }
    return out;
}

namespace {

void require_input_size(const RgbImage& frame, const NetworkConfig& cfg, const char* who) {
    if (frame.h != cfg.input_h || frame.w != cfg.input_w)
        throw std::invalid_argument(std::string(who) + ": frame is " + std::to_string(frame.h) +
                                    "x" + std::to_string(frame.w) + ", configured input is " +
                                    std::to_string(cfg.input_h) + "x" +
                                    std::to_string(cfg.input_w));
}

}  // namespace

Clm::Clm(const NetworkConfig& cfg) : cfg_(cfg), store_(), backbone_(), decoder_() {
    cfg_.validate();
    Rng rng(cfg_.seed);
    backbone_ = Backbone(store_, "enc", cfg_, rng);
    decoder_ = FpnDecoder(store_, "dec", cfg_, rng, /*with_motion=*/false, /*with_edges=*/false);
}

std::array<nn::Value, 5> Clm::forward(const RgbImage& frame) {
    require_input_size(frame, cfg_, "clm_forward");
    auto pyramid = backbone_.forward(rgb_to_value(frame));
    return decoder_.forward(pyramid, nullptr, cfg_.input_h, cfg_.input_w).maps;
}

GrayMap Clm::predict(const RgbImage& frame) { return value_to_gray(forward(frame).back()); }

GrayMap Clm::predict_resized(const RgbImage& frame) {
    if (frame.h == cfg_.input_h && frame.w == cfg_.input_w) return predict(frame);
    GrayMap map = predict(resize_bilinear(frame, cfg_.input_h, cfg_.input_w));
    return resize_bilinear(map, frame.h, frame.w);
}

std::function<GrayMap(const RgbImage&)> Clm::locator() {
    return [this](const RgbImage& img) { return predict_resized(img); };
}

Fsm::Fsm(const NetworkConfig& cfg) : cfg_(cfg), store_(), backbone_(), decoder_() {
    cfg_.validate();
    Rng rng(cfg_.seed);
    backbone_ = Backbone(store_, "enc", cfg_, rng);
    decoder_ = FpnDecoder(store_, "dec", cfg_, rng, /*with_motion=*/false, /*with_edges=*/true);
}

Fsm::Output Fsm::forward(const RgbImage& frame) {
    require_input_size(frame, cfg_, "fsm_forward");
    auto pyramid = backbone_.forward(rgb_to_value(frame));
    auto dec = decoder_.forward(pyramid, nullptr, cfg_.input_h, cfg_.input_w);
    return {dec.maps, dec.edges};
}

GrayMap Fsm::predict(const RgbImage& frame) { return value_to_gray(forward(frame).maps.back()); }

TwoStream::TwoStream(const NetworkConfig& cfg)
    : cfg_(cfg), store_(), static_enc_(), flow_enc_(), flow_weight_(), decoder_() {
    cfg_.validate();
    Rng rng(cfg_.seed);
    static_enc_ = Backbone(store_, "enc", cfg_, rng);
    flow_enc_ = Backbone(store_, "flow_enc", cfg_, rng);
    flow_weight_ = make_conv(store_, "flow_w", cfg_.widths[4], 1, 1, 1, 0, rng);
    decoder_ = FpnDecoder(store_, "dec", cfg_, rng, /*with_motion=*/true, /*with_edges=*/false);
}

std::array<std::array<nn::Value, 5>, 5> TwoStream::flow_branch_forward(const FlowBundle& bundle) {
    std::array<std::array<nn::Value, 5>, 5> pyramids;
    for (size_t i = 0; i < 5; ++i) {
        require_input_size(bundle.images[i], cfg_, "flow_branch_forward");
        pyramids[i] = flow_enc_.forward(rgb_to_value(bundle.images[i]));
    }
    return pyramids;
}

TwoStream::Weighted TwoStream::flow_weighting(
    const std::array<std::array<nn::Value, 5>, 5>& pyramids) {
    Weighted out;
    for (size_t i = 0; i < 5; ++i)
        out.weights[i] = nn::global_avg_pool(flow_weight_(pyramids[i][4]));
    for (size_t level = 0; level < 5; ++level) {
        nn::Value acc;
        for (size_t i = 0; i < 5; ++i) {
            nn::Value term = nn::mul_s(pyramids[i][level], out.weights[i]);
            acc = acc ? nn::add(acc, term) : term;
        }
        out.combined[level] = acc;
    }
    return out;
}

std::array<nn::Value, 5> TwoStream::fuse_features(const std::array<nn::Value, 5>& statics,
                                                  const std::array<nn::Value, 5>& motion) {
    return decoder_.forward(statics, &motion, cfg_.input_h, cfg_.input_w).maps;
}

std::array<nn::Value, 5> TwoStream::forward(const RgbImage& frame, const FlowBundle& bundle) {
    require_input_size(frame, cfg_, "two_stream_forward");
    auto statics = static_enc_.forward(rgb_to_value(frame));
    auto weighted = flow_weighting(flow_branch_forward(bundle));
    return fuse_features(statics, weighted.combined);
}

GrayMap TwoStream::predict(const RgbImage& frame, const FlowBundle& bundle) {
    return value_to_gray(forward(frame, bundle).back());
}

void TwoStream::init_from_clm(const Clm& clm) {
    if (clm.config().widths != cfg_.widths || clm.config().decoder_width != cfg_.decoder_width)
        throw std::invalid_argument("init_from_clm: incompatible channel configuration");
    for (const auto& [name, value] : store_.entries()) {
        std::string source;
        if (name.rfind("enc.", 0) == 0 || name.rfind("dec.", 0) == 0)
            source = name;
        else if (name.rfind("flow_enc.", 0) == 0)
            source = "enc." + name.substr(9);
        else
            continue;  // motion laterals and flow weighting keep their init
        if (source.find(".mlat.") != std::string::npos) continue;
        nn::Value src = clm.params().find(source);
        if (!src) continue;
        if (!src->val.same_shape(value->val))
            throw std::runtime_error("init_from_clm: shape mismatch for " + name);
        value->val = src->val;
    }
}

}  // namespace vsod
