// Command-line front end for the progressive video saliency pipeline:
//   synth        generate the synthetic image+video corpus
//   train-images train the coarse locating and fine segmenting modules
//   gen-labels   build spatiotemporal location labels from unlabeled clips
//   train-video  train the two-stream locating network on those labels
//   eval         run progressive inference and score against ground truth
//   infer        run progressive inference, maps only

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "vsod/nn/checkpoint.hpp"
#include "vsod/pipeline.hpp"

namespace fs = std::filesystem;
using namespace vsod;

namespace {

struct CliArgs {
    std::string config_path;
    std::string out_dir;
    std::string stage_input;
    uint64_t seed = 0;
    bool seed_set = false;
    bool out_set = false;
};

RunConfig resolve_config(const CliArgs& args) {
    RunConfig cfg = args.config_path.empty() ? RunConfig{} : load_run_config(args.config_path);
    if (args.seed_set) cfg.seed = args.seed;
    if (args.out_set) cfg.out_dir = args.out_dir;
    if (!args.stage_input.empty()) cfg.stage_input = args.stage_input;
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    return cfg;
}

Clm load_clm(const RunConfig& cfg) {
    Clm clm(network_config_of(cfg));
    nn::load_checkpoint(clm_checkpoint(cfg), clm.params());
    return clm;
}

Fsm load_fsm(const RunConfig& cfg) {
    Fsm fsm(network_config_of(cfg));
    nn::load_checkpoint(fsm_checkpoint(cfg), fsm.params());
    return fsm;
}

TwoStream load_tln(const RunConfig& cfg) {
    TwoStream tln(network_config_of(cfg));
    nn::load_checkpoint(tln_checkpoint(cfg), tln.params());
    return tln;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"progressive video salient object detection pipeline"};
    app.require_subcommand(1);

    CliArgs args;
    app.add_option("--config", args.config_path, "run configuration file (key=value lines)");
    auto* seed_opt = app.add_option("--seed", args.seed, "override the run seed");
    auto* out_opt = app.add_option("--out", args.out_dir, "output directory");
    app.add_option("--stage-input", args.stage_input,
                   "directory holding checkpoints from earlier stages");

    auto* synth = app.add_subcommand("synth", "generate the synthetic corpus");
    auto* train_images = app.add_subcommand("train-images", "train CLM and FSM on image pairs");
    auto* gen_labels = app.add_subcommand("gen-labels", "generate spatiotemporal location labels");
    auto* train_video = app.add_subcommand("train-video", "train the two-stream locating network");
    auto* eval_cmd = app.add_subcommand("eval", "evaluate progressive inference against GT");
    auto* infer_cmd = app.add_subcommand("infer", "write saliency maps for a clip directory");

    std::string eval_root_arg;
    eval_cmd->add_option("--dataset", eval_root_arg, "clip directory to evaluate (defaults to eval_root)");
    infer_cmd->add_option("--dataset", eval_root_arg, "clip directory to process");

    CLI11_PARSE(app, argc, argv);
    args.seed_set = seed_opt->count() > 0;
    args.out_set = out_opt->count() > 0;

    try {
        RunConfig cfg = resolve_config(args);
        std::ostream* log = &std::cerr;

        if (synth->parsed()) {
            RunRecorder rec(cfg, "synth");
            std::string corpus_dir = cfg.out_dir + "/corpus";
            SyntheticSummary s = generate_synthetic_corpus(cfg.synth, cfg.seed, corpus_dir);
            rec.add_stat("images", s.images);
            rec.add_stat("clip_frames", s.clip_frames);
            rec.add_stat("flow_files", s.flow_files);
            rec.add_stat("gt_files", s.gt_files);
            rec.add_file(corpus_dir);
            std::cout << "corpus written to " << corpus_dir << ": " << s.images << " images, "
                      << s.clip_frames << " clip frames, " << s.flow_files << " flow files\n"
                      << "manifest: " << rec.write() << "\n";
        } else if (train_images->parsed()) {
            RunRecorder rec(cfg, "train-images");
            Clm clm(network_config_of(cfg));
            StageResult clm_result = train_stage_clm(cfg, clm, log);
            rec.add_trace("clm_loss", clm_result.loss_trace);
            rec.add_file(clm_result.checkpoint_path);

            Fsm fsm(network_config_of(cfg));
            StageResult fsm_result = train_stage_fsm(cfg, fsm, log);
            rec.add_trace("fsm_loss", fsm_result.loss_trace);
            rec.add_file(fsm_result.checkpoint_path);
            std::cout << "checkpoints: " << clm_result.checkpoint_path << ", "
                      << fsm_result.checkpoint_path << "\nmanifest: " << rec.write() << "\n";
        } else if (gen_labels->parsed()) {
            RunRecorder rec(cfg, "gen-labels");
            Clm clm = load_clm(cfg);
            LabelGenSummary s = run_label_generation(cfg, clm, log);
            rec.add_stat("clips", s.clips);
            rec.add_stat("covered_frames", s.covered_frames);
            rec.add_stat("high_saliency_frames", s.high_saliency_frames);
            rec.add_stat("tracked_frames", s.tracked_frames);
            rec.add_stat("skipped_flow_pairs", s.skipped_flow_pairs);
            rec.add_stat("mean_iou", s.mean_iou);
            rec.add_file(cfg.effective_labels_root());
            std::cout << "labels for " << s.clips << " clips (" << s.covered_frames
                      << " frames covered, mean IOU " << s.mean_iou
                      << ")\nmanifest: " << rec.write() << "\n";
        } else if (train_video->parsed()) {
            RunRecorder rec(cfg, "train-video");
            TwoStream tln(network_config_of(cfg));
            {
                Clm clm = load_clm(cfg);
                tln.init_from_clm(clm);
            }
            StageResult result = train_stage_two_stream(cfg, tln, log);
            rec.add_trace("tln_loss", result.loss_trace);
            rec.add_file(result.checkpoint_path);
            std::cout << "checkpoint: " << result.checkpoint_path
                      << "\nmanifest: " << rec.write() << "\n";
        } else if (eval_cmd->parsed()) {
            RunRecorder rec(cfg, "eval");
            TwoStream tln = load_tln(cfg);
            Fsm fsm = load_fsm(cfg);
            std::string root = eval_root_arg.empty() ? cfg.eval_root : eval_root_arg;
            if (root.empty()) throw std::runtime_error("eval: no dataset directory configured");
            EvalResult result = evaluate(cfg, tln, fsm, root, log);
            rec.add_stat("s_measure", result.report.s_measure);
            rec.add_stat("f_max", result.report.f_max);
            rec.add_stat("mae", result.report.mae);
            rec.add_stat("frames", result.report.frames);
            rec.add_stat("degenerate_frames", result.report.degenerate_frames);
            rec.add_file(cfg.out_dir + "/report.txt");
            rec.add_file(cfg.out_dir + "/curves/" + result.dataset + ".csv");
            rec.add_file(cfg.out_dir + "/scatter.tsv");
            std::cout << result.dataset << ": S " << result.report.s_measure << " F_max "
                      << result.report.f_max << " MAE " << result.report.mae
                      << "\nmanifest: " << rec.write() << "\n";
        } else if (infer_cmd->parsed()) {
            RunRecorder rec(cfg, "infer");
            TwoStream tln = load_tln(cfg);
            Fsm fsm = load_fsm(cfg);
            std::string root = eval_root_arg.empty() ? cfg.eval_root : eval_root_arg;
            if (root.empty()) throw std::runtime_error("infer: no dataset directory configured");
            int written = run_inference(cfg, tln, fsm, root, log);
            rec.add_stat("maps_written", written);
            rec.add_file(cfg.out_dir + "/maps");
            std::cout << written << " maps written\nmanifest: " << rec.write() << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
