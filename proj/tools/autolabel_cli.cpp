// Command-line surface for the auto-labeling pipeline. Subcommands mirror the
// stage boundaries: synth, ppscore, cluster, lift, fuse, selfpace, eval.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "autolabel/pipeline.hpp"

using namespace autolabel;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string config_path;
    int threads = -1;             // -1: not set on the command line
    std::optional<uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "pipeline config JSON");
    cmd->add_option("--threads", opts.threads, "worker threads (0 = library default)");
    cmd->add_option("--seed", opts.seed, "seed override");
}

io::PipelineConfig resolve_config(const CommonOpts& opts) {
    io::PipelineConfig cfg;
    std::string path = opts.config_path;
    if (path.empty())
        if (const char* env = std::getenv("AUTOLABEL_CONFIG")) path = env;
    if (!path.empty()) cfg = io::load_config(path);
    if (opts.threads >= 0) cfg.threads = opts.threads;
    if (opts.seed) cfg.seed = *opts.seed;
    set_worker_threads(cfg.threads);
    std::cerr << "config: " << io::config_to_json(cfg).dump() << "\n";
    return cfg;
}

json meta_for(const io::PipelineConfig& cfg) { return json{{"config", io::config_to_json(cfg)}}; }

std::vector<Label> load_gt(const fs::path& path, const std::string& split) {
    // accept either a label JSONL file or a dataset manifest
    if (path.extension() == ".json") {
        const io::Manifest manifest = io::load_manifest(path);
        return pipeline::ground_truth_labels(manifest, split);
    }
    return io::load_labels(path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LiDAR + 2D auto-labeling pipeline"};
    app.require_subcommand(1);

    // --- synth ---
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    CommonOpts synth_opts;
    std::string synth_spec, synth_out;
    synth->add_option("--spec", synth_spec, "scene spec JSON (defaults used when omitted)");
    synth->add_option("--out", synth_out, "output dataset directory")->required();
    add_common(synth, synth_opts);

    // --- ppscore ---
    auto* pp = app.add_subcommand("ppscore", "compute persistency scores per frame");
    CommonOpts pp_opts;
    std::string pp_manifest, pp_out;
    pp->add_option("--manifest", pp_manifest, "dataset manifest")->required();
    pp->add_option("--out", pp_out, "output directory for scored clouds")->required();
    add_common(pp, pp_opts);

    // --- cluster ---
    auto* cluster = app.add_subcommand("cluster", "cluster scored clouds into lidar labels");
    CommonOpts cluster_opts;
    std::string cluster_cloud, cluster_frame, cluster_manifest, cluster_scored, cluster_out;
    cluster->add_option("--cloud", cluster_cloud, "one scored cloud CSV");
    cluster->add_option("--frame", cluster_frame, "frame id for --cloud");
    cluster->add_option("--manifest", cluster_manifest, "dataset manifest (batch mode)");
    cluster->add_option("--scored", cluster_scored, "scored-cloud directory (batch mode)");
    cluster->add_option("--out", cluster_out, "output labels JSONL")->required();
    add_common(cluster, cluster_opts);

    // --- lift ---
    auto* lift = app.add_subcommand("lift", "lift 2D masks to image labels");
    CommonOpts lift_opts;
    std::string lift_manifest, lift_out;
    lift->add_option("--manifest", lift_manifest, "dataset manifest")->required();
    lift->add_option("--out", lift_out, "output labels JSONL")->required();
    add_common(lift, lift_opts);

    // --- fuse ---
    auto* fuse = app.add_subcommand("fuse", "distance-aware label fusion");
    CommonOpts fuse_opts;
    std::string fuse_lidar, fuse_image, fuse_out;
    std::optional<double> fuse_dmin;
    bool fuse_nms = false;
    fuse->add_option("--lidar", fuse_lidar, "lidar labels JSONL")->required();
    fuse->add_option("--image", fuse_image, "image labels JSONL")->required();
    fuse->add_option("--out", fuse_out, "output labels JSONL")->required();
    fuse->add_option("--dmin", fuse_dmin, "distance gate for image labels, meters");
    fuse->add_flag("--nms", fuse_nms, "suppress image labels overlapping lidar labels");
    add_common(fuse, fuse_opts);

    // --- selfpace ---
    auto* sp = app.add_subcommand("selfpace", "run the self-paced training loop");
    CommonOpts sp_opts;
    std::string sp_manifest, sp_labels, sp_out, sp_weights, sp_detector = "synthetic";
    sp->add_option("--manifest", sp_manifest, "dataset manifest with ground truth")->required();
    sp->add_option("--labels", sp_labels, "fused seed labels JSONL")->required();
    sp->add_option("--out", sp_out, "round reports JSONL")->required();
    sp->add_option("--weights-out", sp_weights, "final model weights JSON");
    sp->add_option("--detector", sp_detector, "detector implementation (synthetic)");
    add_common(sp, sp_opts);

    // --- eval ---
    auto* ev = app.add_subcommand("eval", "rotated-IoU AP over distance buckets");
    CommonOpts ev_opts;
    std::string ev_pred, ev_gt, ev_out, ev_split;
    ev->add_option("--pred", ev_pred, "prediction labels JSONL")->required();
    ev->add_option("--gt", ev_gt, "ground-truth labels JSONL or dataset manifest")->required();
    ev->add_option("--out", ev_out, "metrics JSON")->required();
    ev->add_option("--split", ev_split, "restrict manifest ground truth to a split");
    add_common(ev, ev_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) {
            const io::PipelineConfig cfg = resolve_config(synth_opts);
            SceneSpec spec;
            if (!synth_spec.empty()) spec = io::load_scene_spec(synth_spec);
            if (synth_opts.seed) spec.seed = *synth_opts.seed;
            const GeneratedScene scene = generate(spec);
            io::write_dataset(synth_out, scene);
            io::write_file_atomic(fs::path(synth_out) / "scene_spec.json",
                                  io::scene_spec_to_json(spec).dump(2) + "\n");
            std::cout << "wrote " << scene.frames.size() << " frames to " << synth_out << "\n";
        } else if (*pp) {
            const io::PipelineConfig cfg = resolve_config(pp_opts);
            const io::Manifest manifest = io::load_manifest(pp_manifest);
            fs::create_directories(pp_out);
            for (const io::ManifestFrame& mf : manifest.frames) {
                const PointCloud scored = pipeline::score_frame(manifest, mf.id, cfg.persistency);
                io::save_cloud_csv(fs::path(pp_out) / (mf.id + ".csv"), scored);
            }
            std::cout << "scored " << manifest.frames.size() << " frames\n";
        } else if (*cluster) {
            const io::PipelineConfig cfg = resolve_config(cluster_opts);
            std::vector<Label> labels;
            if (!cluster_cloud.empty()) {
                if (cluster_frame.empty())
                    throw ConfigError("--cloud requires --frame");
                labels = pipeline::lidar_labels(io::load_cloud(cluster_cloud), cluster_frame,
                                                cfg.clustering, cfg.boxfit);
            } else if (!cluster_manifest.empty() && !cluster_scored.empty()) {
                const io::Manifest manifest = io::load_manifest(cluster_manifest);
                for (const io::ManifestFrame& mf : manifest.frames) {
                    const PointCloud scored =
                        io::load_cloud(fs::path(cluster_scored) / (mf.id + ".csv"));
                    std::vector<Label> frame_labels =
                        pipeline::lidar_labels(scored, mf.id, cfg.clustering, cfg.boxfit);
                    labels.insert(labels.end(), frame_labels.begin(), frame_labels.end());
                }
            } else {
                throw ConfigError("cluster needs --cloud/--frame or --manifest/--scored");
            }
            const json meta = meta_for(cfg);
            io::save_labels(cluster_out, labels, &meta);
            std::cout << "wrote " << labels.size() << " lidar labels\n";
        } else if (*lift) {
            const io::PipelineConfig cfg = resolve_config(lift_opts);
            const io::Manifest manifest = io::load_manifest(lift_manifest);
            const std::vector<Label> labels = pipeline::image_labels_all(manifest, cfg);
            const json meta = meta_for(cfg);
            io::save_labels(lift_out, labels, &meta);
            std::cout << "wrote " << labels.size() << " image labels\n";
        } else if (*fuse) {
            io::PipelineConfig cfg = resolve_config(fuse_opts);
            if (fuse_dmin) cfg.fusion.d_min = *fuse_dmin;
            if (fuse_nms) cfg.fusion_nms = true;
            const std::vector<Label> fused =
                pipeline::fuse_all(io::load_labels(fuse_lidar), io::load_labels(fuse_image), cfg);
            const json meta = meta_for(cfg);
            io::save_labels(fuse_out, fused, &meta);
            std::cout << "wrote " << fused.size() << " fused labels\n";
        } else if (*sp) {
            const io::PipelineConfig cfg = resolve_config(sp_opts);
            if (sp_detector != "synthetic")
                throw ConfigError("unknown detector '" + sp_detector + "'");
            const io::Manifest manifest = io::load_manifest(sp_manifest);
            const SelfPaceDataset ds =
                pipeline::make_dataset(manifest, io::load_labels(sp_labels));
            LearnerParams learner = cfg.learner;
            learner.seed = cfg.seed;
            SyntheticLearner detector(learner);
            const SelfPaceResult result =
                run_self_paced(ds, detector, cfg.selfpace, cfg.eval, cfg.seed);
            const json meta = meta_for(cfg);
            io::save_round_reports(sp_out, result.rounds, meta);
            if (!sp_weights.empty()) io::save_weights(sp_weights, result.final_weights, meta);
            std::cout << "ran " << result.rounds.size() << " rounds\n";
        } else if (*ev) {
            const io::PipelineConfig cfg = resolve_config(ev_opts);
            const std::vector<Label> pred = io::load_labels(ev_pred);
            const std::vector<Label> gt = load_gt(ev_gt, ev_split);
            const EvalSummary summary = evaluate(pred, gt, cfg.eval);
            io::save_metrics(ev_out, summary, meta_for(cfg));
            for (const BucketResult& b : summary.buckets) {
                std::cout << b.bucket.name() << "m: AP_BEV=";
                if (b.ap_bev)
                    std::cout << *b.ap_bev;
                else
                    std::cout << "n/a";
                std::cout << " AP_3D=";
                if (b.ap_3d)
                    std::cout << *b.ap_3d;
                else
                    std::cout << "n/a";
                std::cout << " gt=" << b.num_gt << " pred=" << b.num_pred << "\n";
            }
        }
    } catch (const std::exception& e) {
        const char* type = "error";
        if (dynamic_cast<const ValidationError*>(&e))
            type = "validation";
        else if (dynamic_cast<const ConfigError*>(&e))
            type = "config";
        else if (dynamic_cast<const ParseError*>(&e))
            type = "parse";
        std::cerr << json{{"error", {{"type", type}, {"message", e.what()}}}}.dump() << "\n";
        return 1;
    }
    return 0;
}
