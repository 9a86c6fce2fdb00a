#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autolabel/label_fusion.hpp"

namespace autolabel {

struct EvalBucket {
    double lo = 0.0, hi = 0.0;  // [lo, hi) meters

    std::string name() const;
};

struct EvalConfig {
    double iou_threshold = 0.25;
    std::vector<EvalBucket> buckets = {{0, 30}, {30, 50}, {50, 80}, {0, 80}};
    int interpolation_points = 40;  // 11 selects the classic {0, 0.1, ..., 1} grid
    bool bucket_by_gt = false;      // sensitivity flag: bucket matched preds by their GT

    void validate() const;
};

// Rotated footprint IoU via convex polygon clipping.
double bev_iou(const OrientedBox& a, const OrientedBox& b);

// BEV intersection extruded by the vertical overlap.
double iou_3d(const OrientedBox& a, const OrientedBox& b);

struct BucketResult {
    EvalBucket bucket;
    std::optional<double> ap_bev;  // absent when the bucket has no ground truth
    std::optional<double> ap_3d;
    int num_gt = 0;
    int num_pred = 0;
};

struct EvalSummary {
    std::vector<BucketResult> buckets;
    EvalConfig config;

    // Result for the widest bucket (used as the headline metric).
    const BucketResult* full_range() const;
};

// Class-agnostic AP at the configured IoU threshold. Matching is greedy in
// descending confidence, per frame; predictions join buckets by their own
// center distance (or by their matched GT under bucket_by_gt).
EvalSummary evaluate(std::span<const Label> predictions, std::span<const Label> ground_truth,
                     const EvalConfig& config);

// Fraction of ground-truth boxes matched at the threshold (greedy, BEV IoU),
// per distance-volume group. Groups without ground truth report 0 matched of 0.
struct GroupRecall {
    std::array<int, 4> matched{};
    std::array<int, 4> total{};

    double recall(int group) const {
        return total[group] > 0 ? double(matched[group]) / total[group] : 0.0;
    }
};
GroupRecall group_recall(std::span<const Label> predictions, std::span<const Label> ground_truth,
                         double iou_threshold);

// Same matching, restricted to ground truth within [lo, hi) meters.
double bucket_recall(std::span<const Label> predictions, std::span<const Label> ground_truth,
                     double iou_threshold, const EvalBucket& bucket);

}  // namespace autolabel
