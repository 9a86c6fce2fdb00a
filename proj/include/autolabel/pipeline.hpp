#pragma once

#include <string>
#include <vector>

#include "autolabel/io.hpp"

namespace autolabel {
namespace pipeline {

// Persistency scores for one frame: the frame's cloud, aligned to world,
// scored against every traversal of its group (the group includes the frame
// itself).
PointCloud score_frame(const io::Manifest& manifest, const std::string& frame_id,
                       const PersistencyParams& params);

// LiDAR branch: foreground clusters of a scored world-frame cloud, fitted to
// boxes. Clusters below min_points are skipped.
std::vector<Label> lidar_labels(const PointCloud& scored_world, const std::string& frame_id,
                                const ClusterParams& cluster_params, const FitParams& fit_params);

// Image branch: every mask of the frame lifted to a box (mask order kept).
std::vector<Label> image_labels(const io::Manifest& manifest, const std::string& frame_id,
                                const LiftParams& lift_params, const FitParams& fit_params);

// Eq.-style fusion per frame plus the optional overlap suppression post-step
// (drops image labels whose BEV IoU with a lidar label reaches nms_iou).
std::vector<Label> fuse_frame(const std::vector<Label>& lidar, const std::vector<Label>& image,
                              const FusionParams& params, bool nms, double nms_iou);

// Batch variants over every manifest frame, pooled in manifest order.
std::vector<Label> lidar_labels_all(const io::Manifest& manifest, const io::PipelineConfig& cfg);
std::vector<Label> image_labels_all(const io::Manifest& manifest, const io::PipelineConfig& cfg);
std::vector<Label> fuse_all(const std::vector<Label>& lidar, const std::vector<Label>& image,
                            const io::PipelineConfig& cfg);

// Self-paced dataset from a manifest with ground truth: train-split frames
// drive the loop, test-split frames are held out, seed labels are the fused
// labels of train frames.
SelfPaceDataset make_dataset(const io::Manifest& manifest, const std::vector<Label>& fused);

std::vector<Label> ground_truth_labels(const io::Manifest& manifest, const std::string& split = "");

// Chains ppscore -> cluster -> lift -> fuse -> selfpace -> eval over a
// dataset directory, writing every artifact under out_dir.
void run_full(const io::Manifest& manifest, const io::PipelineConfig& cfg,
              const io::fs::path& out_dir);

}  // namespace pipeline
}  // namespace autolabel
