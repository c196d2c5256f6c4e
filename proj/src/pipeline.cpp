#include "vsod/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "vsod/flow_io.hpp"
#include "vsod/imaging.hpp"
#include "vsod/losses.hpp"
#include "vsod/nn/checkpoint.hpp"
#include "vsod/png_io.hpp"
#include "vsod/sampler.hpp"

namespace fs = std::filesystem;

namespace vsod {

namespace {

std::string index_name(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%05d", index);
    return buf;
}

void log_line(std::ostream* log, const std::string& msg) {
    if (log) *log << msg << '\n';
}

BinaryMask resize_mask(const BinaryMask& mask, int h, int w) {
    if (mask.h == h && mask.w == w) return mask;
    return threshold(resize_bilinear(to_gray(mask), h, w), 0.5);
}

GrayMap resize_map(const GrayMap& m, int h, int w) {
    if (m.h == h && m.w == w) return m;
    return resize_bilinear(m, h, w);
}

/// Supervision targets read back from files may top out below the 8-bit
/// maximum; rescaling to max 1.0 restores a well-defined peak set.
GrayMap saturate_target(GrayMap m) {
    double max_v = *std::max_element(m.v.begin(), m.v.end());
    if (max_v <= 0.0) throw std::invalid_argument("saturate_target: empty target");
    if (max_v != 1.0)
        for (double& v : m.v) v /= max_v;
    return m;
}

BinaryMask edge_target(const BinaryMask& mask) {
    // morphological gradient, radius 1
    BinaryMask grown = dilate(mask, 1);
    BinaryMask shrunk = erode(mask, 1);
    BinaryMask edge(mask.h, mask.w);
    for (size_t i = 0; i < edge.v.size(); ++i) edge.v[i] = grown.v[i] && !shrunk.v[i] ? 1 : 0;
    return edge;
}

double scheduled_lr(const RunConfig& cfg, int epoch) {
    return epoch >= cfg.lr_decay_epoch ? cfg.lr * cfg.lr_decay : cfg.lr;
}

template <typename T>
void shuffle_in_place(std::vector<T>& items, Rng& rng) {
    for (size_t i = items.size(); i > 1; --i)
        std::swap(items[i - 1], items[rng.uniform_int(i)]);
}

RgbImage constant_image(int h, int w, double value) {
    RgbImage img(h, w);
    std::fill(img.v.begin(), img.v.end(), value);
    return img;
}

}  // namespace

NetworkConfig network_config_of(const RunConfig& cfg) {
    NetworkConfig net;
    net.input_h = cfg.input_h;
    net.input_w = cfg.input_w;
    net.widths = cfg.widths;
    net.decoder_width = cfg.decoder_width;
    net.seed = cfg.seed;
    return net;
}

std::string clm_checkpoint(const RunConfig& cfg) { return cfg.checkpoints_dir() + "/clm.ckpt"; }
std::string fsm_checkpoint(const RunConfig& cfg) { return cfg.checkpoints_dir() + "/fsm.ckpt"; }
std::string tln_checkpoint(const RunConfig& cfg) { return cfg.checkpoints_dir() + "/tln.ckpt"; }

FlowBundle sample_flow_neighbors(const VideoClip* clip, int frame_index, Rng& rng, bool training,
                                 int real_slots, int out_h, int out_w) {
    static constexpr std::array<int, 10> kOffsets{-5, -4, -3, -2, -1, 1, 2, 3, 4, 5};
    std::array<int, 10> pool = kOffsets;
    FlowBundle bundle;
    for (int slot = 0; slot < 5; ++slot) {
        size_t pick = slot + rng.uniform_int(pool.size() - static_cast<size_t>(slot));
        std::swap(pool[static_cast<size_t>(slot)], pool[pick]);
        bundle.offsets[static_cast<size_t>(slot)] = pool[static_cast<size_t>(slot)];
    }
    for (int slot = 0; slot < 5; ++slot) {
        int offset = bundle.offsets[static_cast<size_t>(slot)];
        std::string flow_file;
        if (clip && slot < real_slots && clip->in_range(frame_index + offset))
            flow_file = clip->flow_path(frame_index, frame_index + offset);
        if (!flow_file.empty()) {
            RgbImage rendered = render_flow(read_flo(flow_file));
            bundle.images[static_cast<size_t>(slot)] =
                (rendered.h == out_h && rendered.w == out_w)
                    ? std::move(rendered)
                    : resize_bilinear(rendered, out_h, out_w);
            bundle.valid[static_cast<size_t>(slot)] = true;
        } else {
            // boundary convention: random constant in training, fixed mid-gray
            // at inference
            double fill = training ? rng.uniform() : 0.5;
            bundle.images[static_cast<size_t>(slot)] = constant_image(out_h, out_w, fill);
            bundle.valid[static_cast<size_t>(slot)] = false;
        }
    }
    return bundle;
}

GrayMap progressive_inference(TwoStream& tln, Fsm& fsm, const RgbImage& frame,
                              const FlowBundle& bundle, double lambda) {
    const NetworkConfig& net = tln.config();
    const RgbImage* input = &frame;
    RgbImage resized;
    if (frame.h != net.input_h || frame.w != net.input_w) {
        resized = resize_bilinear(frame, net.input_h, net.input_w);
        input = &resized;
    }
    GrayMap located = tln.predict(*input, bundle);
    GrayMap attention = resize_map(located, frame.h, frame.w);

    auto [sampled, grid] =
        attention_sample(frame, attention, fsm.config().input_h, fsm.config().input_w, lambda);
    GrayMap fine = fsm.predict(sampled);
    return attention_restore(fine, grid);
}

StageResult train_stage_clm(const RunConfig& cfg, Clm& clm, std::ostream* log) {
    IngestStats stats;
    auto pairs = ingest_image_dataset(cfg.image_root, &stats, log);
    log_line(log, "clm: training on " + std::to_string(pairs.size()) + " image pairs");

    Rng rng = Rng(cfg.seed).fork(11);
    nn::Adam adam(clm.params().values(), cfg.lr, cfg.weight_decay);
    StageResult result;

    const int epochs = cfg.stage_epochs(cfg.clm_epochs);
    std::vector<size_t> order(pairs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < epochs; ++epoch) {
        adam.set_lr(scheduled_lr(cfg, epoch));
        shuffle_in_place(order, rng);
        for (size_t idx : order) {
            const ImagePair& pair = pairs[idx];
            RgbImage frame = resize_bilinear(pair.image, cfg.input_h, cfg.input_w);
            BinaryMask mask = resize_mask(pair.mask, cfg.input_h, cfg.input_w);
            if (mask.count() == 0) continue;
            GrayMap target =
                body_attention_target(mask, cfg.body_dilate_radius(), cfg.body_sigma());

            auto stack = clm.forward(frame);
            nn::Value loss = total_locating_loss(stack, target);
            adam.zero_grad();
            nn::backward(loss);
            adam.step();
            result.loss_trace.push_back(loss->val.item());
        }
        log_line(log, "clm: epoch " + std::to_string(epoch + 1) + "/" + std::to_string(epochs) +
                          " loss " + std::to_string(result.loss_trace.back()));
    }

    fs::create_directories(cfg.checkpoints_dir());
    result.checkpoint_path = clm_checkpoint(cfg);
    nn::save_checkpoint(result.checkpoint_path, clm.params(),
                        {{"stage", "clm"}, {"network", clm.config().serialize()}});
    return result;
}

StageResult train_stage_fsm(const RunConfig& cfg, Fsm& fsm, std::ostream* log) {
    IngestStats stats;
    auto pairs = ingest_image_dataset(cfg.image_root, &stats, log);
    log_line(log, "fsm: training on " + std::to_string(pairs.size()) + " image pairs");

    Rng rng = Rng(cfg.seed).fork(12);
    nn::Adam adam(fsm.params().values(), cfg.lr, cfg.weight_decay);
    StageResult result;

    const int epochs = cfg.stage_epochs(cfg.fsm_epochs);
    std::vector<size_t> order(pairs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < epochs; ++epoch) {
        adam.set_lr(scheduled_lr(cfg, epoch));
        shuffle_in_place(order, rng);
        for (size_t idx : order) {
            const ImagePair& pair = pairs[idx];
            RgbImage frame = resize_bilinear(pair.image, cfg.input_h, cfg.input_w);
            BinaryMask mask = resize_mask(pair.mask, cfg.input_h, cfg.input_w);
            if (mask.count() == 0) continue;

            // the sampler zooms on the GT-derived body attention during
            // image-stage training
            GrayMap attention =
                body_attention_target(mask, cfg.body_dilate_radius(), cfg.body_sigma());
            auto [sampled, grid] = attention_sample(frame, attention, cfg.input_h, cfg.input_w,
                                                    cfg.sampler_lambda);
            BinaryMask sampled_mask = threshold(sample_gray(to_gray(mask), grid), 0.5);
            if (sampled_mask.count() == 0) continue;
            GrayMap sampled_target = to_gray(sampled_mask);
            BinaryMask edges = edge_target(sampled_mask);

            auto out = fsm.forward(sampled);
            nn::Value loss = total_locating_loss(out.maps, sampled_target);
            for (const auto& edge_map : out.edges) {
                auto bce = balanced_bce(edge_map, edges);
                if (bce) loss = nn::add(loss, *bce);
            }
            adam.zero_grad();
            nn::backward(loss);
            adam.step();
            result.loss_trace.push_back(loss->val.item());
        }
        log_line(log, "fsm: epoch " + std::to_string(epoch + 1) + "/" + std::to_string(epochs) +
                          " loss " + std::to_string(result.loss_trace.back()));
    }

    fs::create_directories(cfg.checkpoints_dir());
    result.checkpoint_path = fsm_checkpoint(cfg);
    nn::save_checkpoint(result.checkpoint_path, fsm.params(),
                        {{"stage", "fsm"}, {"network", fsm.config().serialize()}});
    return result;
}

LabelGenSummary run_label_generation(const RunConfig& cfg, Clm& clm, std::ostream* log) {
    auto clips = load_video_dataset(cfg.video_root);
    LabelGenOptions opts;
    opts.t_thresh = cfg.t_thresh;
    opts.track_window = cfg.track_window;
    opts.log = log;

    LabelGenSummary summary;
    Locator locator = clm.locator();
    double iou_sum = 0.0;
    for (const auto& clip : clips) {
        ClipLabels labels = build_clip_labels(clip, locator, opts);
        write_clip_labels(cfg.effective_labels_root(), labels);
        ++summary.clips;
        summary.covered_frames += static_cast<int>(labels.labels.size());
        summary.high_saliency_frames += labels.high_saliency_frames;
        summary.tracked_frames += labels.tracked_frames;
        summary.skipped_flow_pairs += labels.skipped_flow_pairs;
        iou_sum += labels.mean_iou * labels.high_saliency_frames;
        log_line(log, "labels: " + clip.name + " high-saliency " +
                          std::to_string(labels.high_saliency_frames) + " tracked " +
                          std::to_string(labels.tracked_frames));
    }
    if (summary.high_saliency_frames > 0)
        summary.mean_iou = iou_sum / summary.high_saliency_frames;
    return summary;
}

StageResult train_stage_two_stream(const RunConfig& cfg, TwoStream& tln, std::ostream* log) {
    auto clips = load_video_dataset(cfg.video_root);

    struct Sample {
        const VideoClip* clip;
        int frame_index;
        GrayMap target;
    };
    std::vector<Sample> samples;
    for (const auto& clip : clips) {
        std::vector<LoadedLabel> labels;
        try {
            labels = read_clip_labels(cfg.effective_labels_root(), clip.name);
        } catch (const std::exception& e) {
            log_line(log, std::string("tln: skipping clip without labels: ") + e.what());
            continue;
        }
        for (auto& label : labels) {
            GrayMap target = resize_map(label.location, cfg.input_h, cfg.input_w);
            double max_v = *std::max_element(target.v.begin(), target.v.end());
            if (max_v <= 0.0) continue;  // degenerate label carries no signal
            samples.push_back(Sample{&clip, label.frame_index, saturate_target(std::move(target))});
        }
    }
    if (samples.empty()) throw std::runtime_error("tln: no labeled frames to train on");
    log_line(log, "tln: training on " + std::to_string(samples.size()) + " labeled frames");

    Rng rng = Rng(cfg.seed).fork(13);
    nn::Adam adam(tln.params().values(), cfg.lr, cfg.weight_decay);
    StageResult result;

    const int epochs = cfg.stage_epochs(cfg.tln_epochs);
    std::vector<size_t> order(samples.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < epochs; ++epoch) {
        adam.set_lr(scheduled_lr(cfg, epoch));
        shuffle_in_place(order, rng);
        for (size_t idx : order) {
            const Sample& sample = samples[idx];
            RgbImage frame = resize_bilinear(
                read_rgb_png(sample.clip->frame_paths[static_cast<size_t>(
                    sample.frame_index - sample.clip->first_index)]),
                cfg.input_h, cfg.input_w);
            FlowBundle bundle =
                sample_flow_neighbors(sample.clip, sample.frame_index, rng, /*training=*/true,
                                      cfg.flow_bundle, cfg.input_h, cfg.input_w);
            auto stack = tln.forward(frame, bundle);
            nn::Value loss = total_locating_loss(stack, sample.target);
            adam.zero_grad();
            nn::backward(loss);
            adam.step();
            result.loss_trace.push_back(loss->val.item());
        }
        log_line(log, "tln: epoch " + std::to_string(epoch + 1) + "/" + std::to_string(epochs) +
                          " loss " + std::to_string(result.loss_trace.back()));
    }

    fs::create_directories(cfg.checkpoints_dir());
    result.checkpoint_path = tln_checkpoint(cfg);
    nn::save_checkpoint(result.checkpoint_path, tln.params(),
                        {{"stage", "tln"}, {"network", tln.config().serialize()}});
    return result;
}

namespace {

struct FrameEval {
    double s = 0.0;
    double mae_v = 0.0;
    PrCurve curve;
    double recall = 0.0;
    double precision = 0.0;
    bool degenerate = false;
};

}  // namespace

EvalResult evaluate(const RunConfig& cfg, TwoStream& tln, Fsm& fsm,
                    const std::string& dataset_root, std::ostream* log) {
    auto clips = load_video_dataset(dataset_root);
    EvalResult result;
    result.dataset = fs::path(dataset_root).filename().string();

    fs::path maps_root = fs::path(cfg.out_dir) / "maps" / result.dataset;
    fs::path curves_dir = fs::path(cfg.out_dir) / "curves";
    fs::create_directories(curves_dir);

    Rng rng = Rng(cfg.seed).fork(14);
    std::vector<FrameEval> evals;
    std::ofstream scatter(fs::path(cfg.out_dir) / "scatter.tsv", std::ios::trunc);
    scatter << "clip\tframe\td_recall\td_precision\n";

    for (const auto& clip : clips) {
        fs::create_directories(maps_root / clip.name);
        for (int i = 0; i < clip.frame_count(); ++i) {
            int index = clip.first_index + i;
            RgbImage frame = read_rgb_png(clip.frame_paths[static_cast<size_t>(i)]);
            FlowBundle bundle = sample_flow_neighbors(&clip, index, rng, /*training=*/false,
                                                      cfg.flow_bundle, cfg.input_h, cfg.input_w);
            GrayMap pred = progressive_inference(tln, fsm, frame, bundle, cfg.sampler_lambda);
            write_gray_png((maps_root / clip.name / (index_name(index) + ".png")).string(), pred);
            ++result.maps_written;

            const std::string& gt_path = clip.gt_paths[static_cast<size_t>(i)];
            if (gt_path.empty()) {
                ++result.frames_without_gt;
                continue;
            }
            GrayMap gt_gray = read_gray_png(gt_path);
            BinaryMask gt = threshold(gt_gray, 0.5);
            FrameEval fe;
            if (gt.count() == 0) {
                fe.degenerate = true;
            } else {
                fe.s = s_measure(pred, gt);
                fe.mae_v = mae(pred, to_gray(gt));
                fe.curve = f_measure_curve(pred, gt);
                fe.recall = d_recall(pred, to_gray(gt)).value_or(0.0);
                fe.precision = d_precision(pred, to_gray(gt)).value_or(0.0);
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%.6f\t%.6f", fe.recall, fe.precision);
                scatter << clip.name << '\t' << index << '\t' << buf << '\n';
            }
            evals.push_back(std::move(fe));
        }
    }

    MetricReport& report = result.report;
    std::vector<double> s_vals, mae_vals;
    for (const auto& fe : evals) {
        ++report.frames;
        if (fe.degenerate) {
            ++report.degenerate_frames;
            continue;
        }
        s_vals.push_back(fe.s);
        mae_vals.push_back(fe.mae_v);
        for (int k = 0; k < 256; ++k) {
            report.curve.precision[k] += fe.curve.precision[k];
            report.curve.recall[k] += fe.curve.recall[k];
        }
    }
    int usable = report.frames - report.degenerate_frames;
    if (usable > 0) {
        report.s_measure = accurate_sum(s_vals) / usable;
        report.mae = accurate_sum(mae_vals) / usable;
        for (int k = 0; k < 256; ++k) {
            report.curve.precision[k] /= usable;
            report.curve.recall[k] /= usable;
        }
        report.f_max = f_max(report.curve);
    }

    // Table-style report row
    {
        std::ofstream table(fs::path(cfg.out_dir) / "report.txt", std::ios::trunc);
        char buf[160];
        table << "dataset\tS_measure\tF_max\tMAE\tframes\tdegenerate\n";
        std::snprintf(buf, sizeof(buf), "%s\t%.3f\t%.3f\t%.3f\t%d\t%d", result.dataset.c_str(),
                      report.s_measure, report.f_max, report.mae, report.frames,
                      report.degenerate_frames);
        table << buf << '\n';
    }
    {
        std::ofstream csv(curves_dir / (result.dataset + ".csv"), std::ios::trunc);
        csv << "threshold,precision,recall\n";
        char buf[80];
        for (int k = 0; k < 256; ++k) {
            std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f", k, report.curve.precision[k],
                          report.curve.recall[k]);
            csv << buf << '\n';
        }
    }
    log_line(log, "eval: " + result.dataset + " S " + std::to_string(report.s_measure) +
                      " F_max " + std::to_string(report.f_max) + " MAE " +
                      std::to_string(report.mae));
    return result;
}

int run_inference(const RunConfig& cfg, TwoStream& tln, Fsm& fsm,
                  const std::string& dataset_root, std::ostream* log) {
    auto clips = load_video_dataset(dataset_root);
    std::string dataset = fs::path(dataset_root).filename().string();
    fs::path maps_root = fs::path(cfg.out_dir) / "maps" / dataset;
    Rng rng = Rng(cfg.seed).fork(14);
    int written = 0;
    for (const auto& clip : clips) {
        fs::create_directories(maps_root / clip.name);
        for (int i = 0; i < clip.frame_count(); ++i) {
            int index = clip.first_index + i;
            RgbImage frame = read_rgb_png(clip.frame_paths[static_cast<size_t>(i)]);
            FlowBundle bundle = sample_flow_neighbors(&clip, index, rng, /*training=*/false,
                                                      cfg.flow_bundle, cfg.input_h, cfg.input_w);
            GrayMap pred = progressive_inference(tln, fsm, frame, bundle, cfg.sampler_lambda);
            write_gray_png((maps_root / clip.name / (index_name(index) + ".png")).string(), pred);
            ++written;
        }
        log_line(log, "infer: " + clip.name + " done");
    }
    return written;
}

RunRecorder::RunRecorder(const RunConfig& cfg, std::string stage)
    : cfg_(cfg), stage_(std::move(stage)) {}

void RunRecorder::add_file(const std::string& path) { files_.push_back(path); }

void RunRecorder::add_trace(const std::string& name, const std::vector<double>& trace) {
    traces_.emplace_back(name, trace);
}

void RunRecorder::add_stat(const std::string& key, double value) {
    stats_.emplace_back(key, value);
}

std::string RunRecorder::write() const {
    nlohmann::ordered_json doc;
    doc["version"] = kVersionStamp;
    doc["stage"] = stage_;
    doc["seed"] = cfg_.seed;
    nlohmann::ordered_json config;
    for (const auto& [k, v] : cfg_.as_map()) config[k] = v;
    doc["config"] = config;
    nlohmann::ordered_json stats;
    for (const auto& [k, v] : stats_) stats[k] = v;
    doc["stats"] = stats;
    for (const auto& [name, trace] : traces_) {
        // keep manifests small: first/last window of each loss trace
        nlohmann::ordered_json t;
        t["steps"] = trace.size();
        size_t head = std::min<size_t>(trace.size(), 20);
        t["head"] = std::vector<double>(trace.begin(), trace.begin() + head);
        t["tail"] = std::vector<double>(trace.end() - head, trace.end());
        doc["traces"][name] = t;
    }
    doc["files"] = files_;

    fs::create_directories(cfg_.out_dir);
    fs::path path = fs::path(cfg_.out_dir) / ("manifest_" + stage_ + ".json");
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << doc.dump(2) << '\n';
        if (!out) throw std::runtime_error("cannot write manifest: " + tmp.string());
    }
    fs::rename(tmp, path);
    return path.string();
}

}  // namespace vsod
