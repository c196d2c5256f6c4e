#include "vsod/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vsod {

std::string RunConfig::effective_labels_root() const {
    return labels_root.empty() ? out_dir + "/labels" : labels_root;
}

std::string RunConfig::checkpoints_dir() const {
    return stage_input.empty() ? out_dir + "/checkpoints" : stage_input;
}

int RunConfig::body_dilate_radius() const {
    return std::max(1, static_cast<int>(std::lround(body_dilate_frac * std::min(input_h, input_w))));
}

double RunConfig::body_sigma() const {
    return std::max(0.5, body_sigma_frac * std::min(input_h, input_w));
}

void RunConfig::validate() const {
    if (t_thresh <= 0.0 || t_thresh >= 1.0)
        throw std::invalid_argument("config: t_thresh must be in (0,1)");
    if (track_window < 1 || track_window > 32)
        throw std::invalid_argument("config: track_window out of range");
    if (flow_bundle < 1 || flow_bundle > 5)
        throw std::invalid_argument("config: flow_bundle must be in [1,5]");
    if (sampler_lambda <= 0.0 || sampler_lambda > 1.0)
        throw std::invalid_argument("config: sampler_lambda must be in (0,1]");
    if (epochs < 1) throw std::invalid_argument("config: epochs must be >= 1");
    if (lr <= 0.0) throw std::invalid_argument("config: lr must be positive");
}

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T out;
    in >> out;
    if (in.fail() || !in.eof())
        throw std::runtime_error("config: bad value for " + key + ": '" + value + "'");
    return out;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        auto is_space = [](unsigned char c) { return std::isspace(c); };
        line.erase(line.begin(), std::find_if_not(line.begin(), line.end(), is_space));
        line.erase(std::find_if_not(line.rbegin(), line.rend(), is_space).base(), line.end());
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        key.erase(std::find_if_not(key.rbegin(), key.rend(), is_space).base(), key.end());
        value.erase(value.begin(), std::find_if_not(value.begin(), value.end(), is_space));

        if (key == "seed")
            cfg.seed = parse_number<uint64_t>(key, value);
        else if (key == "out")
            cfg.out_dir = value;
        else if (key == "image_root")
            cfg.image_root = value;
        else if (key == "video_root")
            cfg.video_root = value;
        else if (key == "eval_root")
            cfg.eval_root = value;
        else if (key == "labels_root")
            cfg.labels_root = value;
        else if (key == "stage_input")
            cfg.stage_input = value;
        else if (key == "t_thresh")
            cfg.t_thresh = parse_number<double>(key, value);
        else if (key == "track_window")
            cfg.track_window = parse_number<int>(key, value);
        else if (key == "flow_bundle")
            cfg.flow_bundle = parse_number<int>(key, value);
        else if (key == "lr")
            cfg.lr = parse_number<double>(key, value);
        else if (key == "weight_decay")
            cfg.weight_decay = parse_number<double>(key, value);
        else if (key == "lr_decay")
            cfg.lr_decay = parse_number<double>(key, value);
        else if (key == "lr_decay_epoch")
            cfg.lr_decay_epoch = parse_number<int>(key, value);
        else if (key == "epochs")
            cfg.epochs = parse_number<int>(key, value);
        else if (key == "clm_epochs")
            cfg.clm_epochs = parse_number<int>(key, value);
        else if (key == "fsm_epochs")
            cfg.fsm_epochs = parse_number<int>(key, value);
        else if (key == "tln_epochs")
            cfg.tln_epochs = parse_number<int>(key, value);
        else if (key == "input_h")
            cfg.input_h = parse_number<int>(key, value);
        else if (key == "input_w")
            cfg.input_w = parse_number<int>(key, value);
        else if (key == "widths") {
            std::istringstream ws(value);
            std::string tok;
            for (auto& w : cfg.widths) {
                if (!std::getline(ws, tok, ','))
                    throw std::runtime_error("config: widths needs 5 comma-separated values");
                w = parse_number<int>(key, tok);
            }
        } else if (key == "decoder_width")
            cfg.decoder_width = parse_number<int>(key, value);
        else if (key == "sampler_lambda")
            cfg.sampler_lambda = parse_number<double>(key, value);
        else if (key == "body_dilate_frac")
            cfg.body_dilate_frac = parse_number<double>(key, value);
        else if (key == "body_sigma_frac")
            cfg.body_sigma_frac = parse_number<double>(key, value);
        else if (key == "synth_images")
            cfg.synth.image_count = parse_number<int>(key, value);
        else if (key == "synth_clips")
            cfg.synth.clip_count = parse_number<int>(key, value);
        else if (key == "synth_val_clips")
            cfg.synth.val_clip_count = parse_number<int>(key, value);
        else if (key == "synth_static_clips")
            cfg.synth.static_clip_count = parse_number<int>(key, value);
        else if (key == "synth_frames")
            cfg.synth.frames_per_clip = parse_number<int>(key, value);
        else if (key == "synth_height")
            cfg.synth.height = parse_number<int>(key, value);
        else if (key == "synth_width")
            cfg.synth.width = parse_number<int>(key, value);
        else if (key == "synth_flow_window")
            cfg.synth.flow_window = parse_number<int>(key, value);
        else if (key == "synth_noise")
            cfg.synth.noise = parse_number<double>(key, value);
        else
            throw std::runtime_error("config: unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

std::map<std::string, std::string> RunConfig::as_map() const {
    std::map<std::string, std::string> m;
    auto num = [](auto v) {
        std::ostringstream out;
        out << v;
        return out.str();
    };
    m["seed"] = num(seed);
    m["out"] = out_dir;
    m["image_root"] = image_root;
    m["video_root"] = video_root;
    m["eval_root"] = eval_root;
    m["labels_root"] = effective_labels_root();
    m["stage_input"] = stage_input;
    m["t_thresh"] = num(t_thresh);
    m["track_window"] = num(track_window);
    m["flow_bundle"] = num(flow_bundle);
    m["lr"] = num(lr);
    m["weight_decay"] = num(weight_decay);
    m["lr_decay"] = num(lr_decay);
    m["lr_decay_epoch"] = num(lr_decay_epoch);
    m["epochs"] = num(epochs);
    m["clm_epochs"] = num(clm_epochs);
    m["fsm_epochs"] = num(fsm_epochs);
    m["tln_epochs"] = num(tln_epochs);
    m["input_h"] = num(input_h);
    m["input_w"] = num(input_w);
    m["widths"] = num(widths[0]) + "," + num(widths[1]) + "," + num(widths[2]) + "," +
                  num(widths[3]) + "," + num(widths[4]);
    m["decoder_width"] = num(decoder_width);
    m["sampler_lambda"] = num(sampler_lambda);
    m["body_dilate_frac"] = num(body_dilate_frac);
    m["body_sigma_frac"] = num(body_sigma_frac);
    m["synth_images"] = num(synth.image_count);
    m["synth_clips"] = num(synth.clip_count);
    m["synth_val_clips"] = num(synth.val_clip_count);
    m["synth_static_clips"] = num(synth.static_clip_count);
    m["synth_frames"] = num(synth.frames_per_clip);
    m["synth_height"] = num(synth.height);
    m["synth_width"] = num(synth.width);
    m["synth_flow_window"] = num(synth.flow_window);
    m["synth_noise"] = num(synth.noise);
    return m;
}

}  // namespace vsod
