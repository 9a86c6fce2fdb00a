#include "autolabel/pipeline.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

namespace autolabel {
namespace pipeline {

PointCloud score_frame(const io::Manifest& manifest, const std::string& frame_id,
                       const PersistencyParams& params) {
    const std::vector<std::string> group = manifest.group_of(frame_id);
    TraversalSet traversals;
    PointCloud query;
    for (const std::string& id : group) {
        const io::ManifestFrame& mf = manifest.frame(id);
        PointCloud world = transform_to_world(io::load_cloud(mf.cloud), io::load_pose(mf.pose));
        if (id == frame_id) query = world;
        traversals.traversals.push_back(std::move(world));
    }
    return score_cloud(query, traversals, params);
}

std::vector<Label> lidar_labels(const PointCloud& scored_world, const std::string& frame_id,
                                const ClusterParams& cluster_params, const FitParams& fit_params) {
    const std::vector<std::vector<int>> clusters = foreground_clusters(scored_world, cluster_params);
    std::vector<Label> labels;
    for (const std::vector<int>& cluster : clusters) {
        if (int(cluster.size()) < fit_params.min_points) continue;
        PointCloud pts;
        pts.points.reserve(cluster.size());
        for (int idx : cluster) pts.points.push_back(scored_world.points[idx]);
        Label l;
        l.box = fit_box(pts, fit_params).box;
        l.source = LabelSource::lidar;
        l.confidence = 1.0;
        l.frame = frame_id;
        labels.push_back(std::move(l));
    }
    return labels;
}

std::vector<Label> image_labels(const io::Manifest& manifest, const std::string& frame_id,
                                const LiftParams& lift_params, const FitParams& fit_params) {
    const io::ManifestFrame& mf = manifest.frame(frame_id);
    const PointCloud world = transform_to_world(io::load_cloud(mf.cloud), io::load_pose(mf.pose));
    const CameraModel camera = io::load_camera(mf.camera);
    const std::vector<Mask2D> masks = io::load_masks(mf.masks);

    std::vector<Label> labels;
    for (const Mask2D& mask : masks) {
        const auto lifted = lift_mask_to_box(world, camera, mask, lift_params, fit_params);
        if (!lifted) continue;
        Label l;
        l.box = lifted->box;
        l.source = LabelSource::image;
        l.confidence = mask.confidence;
        l.frame = frame_id;
        labels.push_back(std::move(l));
    }
    return labels;
}

std::vector<Label> fuse_frame(const std::vector<Label>& lidar, const std::vector<Label>& image,
                              const FusionParams& params, bool nms, double nms_iou) {
    std::vector<Label> fused = fuse_labels(lidar, image, params);
    if (!nms) return fused;
    std::vector<Label> kept;
    for (const Label& l : fused) {
        if (l.source == LabelSource::image) {
            bool overlaps = false;
            for (const Label& other : fused)
                if (other.source == LabelSource::lidar && bev_iou(l.box, other.box) >= nms_iou)
                    overlaps = true;
            if (overlaps) continue;
        }
        kept.push_back(l);
    }
    return kept;
}

namespace {

// Runs fn per frame in parallel, pools results in manifest order.
template <class Fn>
std::vector<Label> pooled_over_frames(const io::Manifest& manifest, Fn&& fn) {
    std::vector<std::vector<Label>> per_frame(manifest.frames.size());
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (int64_t i = 0; i < int64_t(manifest.frames.size()); ++i) {
        try {
            per_frame[i] = fn(manifest.frames[i].id);
        } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    std::vector<Label> pooled;
    for (std::vector<Label>& f : per_frame) pooled.insert(pooled.end(), f.begin(), f.end());
    return pooled;
}

}  // namespace

std::vector<Label> lidar_labels_all(const io::Manifest& manifest, const io::PipelineConfig& cfg) {
    return pooled_over_frames(manifest, [&](const std::string& id) {
        const PointCloud scored = score_frame(manifest, id, cfg.persistency);
        return lidar_labels(scored, id, cfg.clustering, cfg.boxfit);
    });
}

std::vector<Label> image_labels_all(const io::Manifest& manifest, const io::PipelineConfig& cfg) {
    return pooled_over_frames(
        manifest, [&](const std::string& id) { return image_labels(manifest, id, cfg.lift, cfg.boxfit); });
}

std::vector<Label> fuse_all(const std::vector<Label>& lidar, const std::vector<Label>& image,
                            const io::PipelineConfig& cfg) {
    // frames in first-appearance order over both inputs
    std::vector<std::string> order;
    std::map<std::string, std::pair<std::vector<Label>, std::vector<Label>>> by_frame;
    auto add = [&](const Label& l, bool is_lidar) {
        auto it = by_frame.find(l.frame);
        if (it == by_frame.end()) {
            order.push_back(l.frame);
            it = by_frame.emplace(l.frame, std::pair<std::vector<Label>, std::vector<Label>>{})
                     .first;
        }
        (is_lidar ? it->second.first : it->second.second).push_back(l);
    };
    for (const Label& l : lidar) add(l, true);
    for (const Label& l : image) add(l, false);

    std::vector<Label> fused;
    for (const std::string& frame : order) {
        const auto& [lf, imf] = by_frame[frame];
        std::vector<Label> f = fuse_frame(lf, imf, cfg.fusion, cfg.fusion_nms, cfg.fusion_nms_iou);
        fused.insert(fused.end(), f.begin(), f.end());
    }
    return fused;
}

std::vector<Label> ground_truth_labels(const io::Manifest& manifest, const std::string& split) {
    std::vector<Label> out;
    for (const io::ManifestFrame& mf : manifest.frames) {
        if (!split.empty() && mf.split != split) continue;
        if (mf.ground_truth.empty())
            throw ValidationError("frame '" + mf.id + "' has no ground-truth file");
        std::vector<Label> labels = io::load_labels(mf.ground_truth);
        out.insert(out.end(), labels.begin(), labels.end());
    }
    return out;
}

SelfPaceDataset make_dataset(const io::Manifest& manifest, const std::vector<Label>& fused) {
    SelfPaceDataset ds;
    std::map<std::string, bool> split_of;
    for (const io::ManifestFrame& mf : manifest.frames) {
        Frame frame;
        frame.id = mf.id;
        if (mf.ground_truth.empty())
            throw ValidationError("selfpace needs ground-truth object lists; frame '" + mf.id +
                                  "' has none");
        frame.objects = io::load_labels(mf.ground_truth);
        split_of[mf.id] = mf.split == "test";
        (mf.split == "test" ? ds.heldout : ds.training).push_back(std::move(frame));
    }
    for (const Label& l : fused) {
        auto it = split_of.find(l.frame);
        if (it == split_of.end())
            throw ValidationError("fused label references unknown frame '" + l.frame + "'");
        if (!it->second) ds.seed_labels.push_back(l);
    }
    return ds;
}

void run_full(const io::Manifest& manifest, const io::PipelineConfig& cfg,
              const io::fs::path& out_dir) {
    const nlohmann::json meta{{"config", io::config_to_json(cfg)}};

    io::fs::create_directories(out_dir / "scored");
    for (const io::ManifestFrame& mf : manifest.frames)
        io::save_cloud_csv(out_dir / "scored" / (mf.id + ".csv"),
                           score_frame(manifest, mf.id, cfg.persistency));

    const std::vector<Label> lidar = lidar_labels_all(manifest, cfg);
    io::save_labels(out_dir / "lidar_labels.jsonl", lidar, &meta);

    const std::vector<Label> image = image_labels_all(manifest, cfg);
    io::save_labels(out_dir / "image_labels.jsonl", image, &meta);

    const std::vector<Label> fused = fuse_all(lidar, image, cfg);
    io::save_labels(out_dir / "fused_labels.jsonl", fused, &meta);

    SelfPaceDataset ds = make_dataset(manifest, fused);
    LearnerParams learner = cfg.learner;
    learner.seed = cfg.seed;
    SyntheticLearner detector(learner);
    const SelfPaceResult result = run_self_paced(ds, detector, cfg.selfpace, cfg.eval, cfg.seed);
    io::save_round_reports(out_dir / "rounds.jsonl", result.rounds, meta);
    io::save_weights(out_dir / "final_weights.json", result.final_weights, meta);

    const std::vector<Label> gt = ground_truth_labels(manifest);
    io::save_metrics(out_dir / "seed_metrics.json", evaluate(fused, gt, cfg.eval), meta);
}

}  // namespace pipeline
}  // namespace autolabel
