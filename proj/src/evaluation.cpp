#include "autolabel/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "autolabel/selfpace.hpp"

namespace autolabel {

std::string EvalBucket::name() const {
    auto fmt = [](double v) {
        if (v == std::floor(v)) return std::to_string(int64_t(v));
        return std::to_string(v);
    };
    return fmt(lo) + "-" + fmt(hi);
}

void EvalConfig::validate() const {
    if (!(iou_threshold > 0.0) || iou_threshold > 1.0)
        throw ConfigError("iou_threshold must be in (0, 1]");
    if (buckets.empty()) throw ConfigError("at least one distance bucket is required");
    for (const EvalBucket& b : buckets)
        if (!(b.lo < b.hi)) throw ConfigError("bucket [" + b.name() + ") must have lo < hi");
    if (interpolation_points < 1) throw ConfigError("interpolation_points must be >= 1");
}

double bev_iou(const OrientedBox& a, const OrientedBox& b) {
    const auto ca = box_corners_bev(a);
    const auto cb = box_corners_bev(b);
    const std::vector<Point2> pa(ca.begin(), ca.end());
    const std::vector<Point2> pb(cb.begin(), cb.end());
    const double inter = std::max(0.0, polygon_signed_area(clip_convex_polygon(pa, pb)));
    const double uni = a.length * a.width + b.length * b.width - inter;
    if (!(uni > 0.0)) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

double iou_3d(const OrientedBox& a, const OrientedBox& b) {
    const auto ca = box_corners_bev(a);
    const auto cb = box_corners_bev(b);
    const std::vector<Point2> pa(ca.begin(), ca.end());
    const std::vector<Point2> pb(cb.begin(), cb.end());
    const double inter_bev = std::max(0.0, polygon_signed_area(clip_convex_polygon(pa, pb)));
    const double dz = std::min(a.z_max(), b.z_max()) - std::max(a.z_min(), b.z_min());
    const double inter = inter_bev * std::max(0.0, dz);
    const double uni = box_volume(a) + box_volume(b) - inter;
    if (!(uni > 0.0)) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

namespace {

struct IndexedLabel {
    const Label* label;
    int order;  // stable input position
};

// Greedy matching inside one frame: predictions in descending confidence
// (input position breaks ties) claim the unmatched GT of highest IoU above
// the threshold. Returns tp flag per prediction (in the given order).
void match_frame(std::vector<IndexedLabel>& preds, const std::vector<IndexedLabel>& gts,
                 double threshold, bool use_3d, std::vector<char>& tp_by_order,
                 std::vector<int>* matched_gt_order = nullptr) {
    std::sort(preds.begin(), preds.end(), [](const IndexedLabel& a, const IndexedLabel& b) {
        if (a.label->confidence != b.label->confidence)
            return a.label->confidence > b.label->confidence;
        return a.order < b.order;
    });
    std::vector<char> gt_used(gts.size(), 0);
    for (const IndexedLabel& p : preds) {
        double best = 0.0;
        int best_gt = -1;
        for (size_t g = 0; g < gts.size(); ++g) {
            if (gt_used[g]) continue;
            const double iou = use_3d ? iou_3d(p.label->box, gts[g].label->box)
                                      : bev_iou(p.label->box, gts[g].label->box);
            if (iou > best) {
                best = iou;
                best_gt = int(g);
            }
        }
        if (best_gt >= 0 && best >= threshold) {
            gt_used[best_gt] = 1;
            tp_by_order[p.order] = 1;
            if (matched_gt_order) (*matched_gt_order)[p.order] = gts[best_gt].order;
        }
    }
}

std::vector<double> recall_levels(int n) {
    std::vector<double> levels;
    if (n == 11) {
        for (int i = 0; i <= 10; ++i) levels.push_back(i / 10.0);
    } else {
        for (int i = 1; i <= n; ++i) levels.push_back(double(i) / n);
    }
    return levels;
}

// N-point interpolated AP from per-prediction (confidence-ordered) tp flags.
double interpolated_ap(const std::vector<char>& tp_sorted, int num_gt,
                       const std::vector<double>& levels) {
    std::vector<double> precision, recall;
    int tp = 0;
    for (size_t i = 0; i < tp_sorted.size(); ++i) {
        tp += tp_sorted[i];
        precision.push_back(double(tp) / double(i + 1));
        recall.push_back(double(tp) / double(num_gt));
    }
    double ap = 0.0;
    for (double level : levels) {
        double best = 0.0;
        for (size_t i = 0; i < recall.size(); ++i)
            if (recall[i] >= level - 1e-12) best = std::max(best, precision[i]);
        ap += best;
    }
    return ap / double(levels.size());
}

struct FrameSet {
    std::vector<IndexedLabel> preds;
    std::vector<IndexedLabel> gts;
};

bool in_bucket(double d, const EvalBucket& b) { return d >= b.lo && d < b.hi; }

}  // namespace

const BucketResult* EvalSummary::full_range() const {
    const BucketResult* widest = nullptr;
    for (const BucketResult& b : buckets)
        if (!widest || b.bucket.hi - b.bucket.lo > widest->bucket.hi - widest->bucket.lo)
            widest = &b;
    return widest;
}

EvalSummary evaluate(std::span<const Label> predictions, std::span<const Label> ground_truth,
                     const EvalConfig& config) {
    config.validate();
    for (const Label& l : predictions) l.validate();
    for (const Label& l : ground_truth) l.validate();

    EvalSummary summary;
    summary.config = config;

    // With bucket_by_gt, predictions inherit the bucket of the GT they match
    // in a full-range pass; unmatched ones fall back to their own distance.
    std::vector<double> pred_bucket_dist(predictions.size());
    for (size_t i = 0; i < predictions.size(); ++i)
        pred_bucket_dist[i] = box_distance(predictions[i].box);
    if (config.bucket_by_gt) {
        std::map<std::string, FrameSet> frames;
        for (int i = 0; i < int(predictions.size()); ++i)
            frames[predictions[i].frame].preds.push_back({&predictions[i], i});
        for (int g = 0; g < int(ground_truth.size()); ++g)
            frames[ground_truth[g].frame].gts.push_back({&ground_truth[g], g});
        std::vector<char> tp(predictions.size(), 0);
        std::vector<int> matched(predictions.size(), -1);
        for (auto& [id, fs] : frames)
            match_frame(fs.preds, fs.gts, config.iou_threshold, false, tp, &matched);
        for (size_t i = 0; i < predictions.size(); ++i)
            if (matched[i] >= 0) pred_bucket_dist[i] = box_distance(ground_truth[matched[i]].box);
    }

    const std::vector<double> levels = recall_levels(config.interpolation_points);
    for (const EvalBucket& bucket : config.buckets) {
        BucketResult result;
        result.bucket = bucket;

        std::map<std::string, FrameSet> frames;
        std::vector<const Label*> bucket_preds;
        std::vector<int> bucket_order;
        for (int i = 0; i < int(predictions.size()); ++i) {
            if (!in_bucket(pred_bucket_dist[i], bucket)) continue;
            const int order = int(bucket_preds.size());
            bucket_preds.push_back(&predictions[i]);
            bucket_order.push_back(i);
            frames[predictions[i].frame].preds.push_back({&predictions[i], order});
        }
        for (int g = 0; g < int(ground_truth.size()); ++g) {
            if (!in_bucket(box_distance(ground_truth[g].box), bucket)) continue;
            frames[ground_truth[g].frame].gts.push_back({&ground_truth[g], g});
            ++result.num_gt;
        }
        result.num_pred = int(bucket_preds.size());

        if (result.num_gt > 0) {
            for (const bool use_3d : {false, true}) {
                std::vector<char> tp(bucket_preds.size(), 0);
                for (auto& [id, fs] : frames) {
                    std::vector<IndexedLabel> preds = fs.preds;
                    match_frame(preds, fs.gts, config.iou_threshold, use_3d, tp);
                }
                // global confidence ordering across frames (stable by input position)
                std::vector<int> order(bucket_preds.size());
                std::iota(order.begin(), order.end(), 0);
                std::sort(order.begin(), order.end(), [&](int a, int b) {
                    if (bucket_preds[a]->confidence != bucket_preds[b]->confidence)
                        return bucket_preds[a]->confidence > bucket_preds[b]->confidence;
                    return bucket_order[a] < bucket_order[b];
                });
                std::vector<char> tp_sorted(order.size());
                for (size_t i = 0; i < order.size(); ++i) tp_sorted[i] = tp[order[i]];
                const double ap = interpolated_ap(tp_sorted, result.num_gt, levels);
                (use_3d ? result.ap_3d : result.ap_bev) = ap;
            }
        }
        summary.buckets.push_back(std::move(result));
    }
    return summary;
}

GroupRecall group_recall(std::span<const Label> predictions, std::span<const Label> ground_truth,
                         double iou_threshold) {
    std::map<std::string, FrameSet> frames;
    for (int i = 0; i < int(predictions.size()); ++i)
        frames[predictions[i].frame].preds.push_back({&predictions[i], i});
    for (int g = 0; g < int(ground_truth.size()); ++g)
        frames[ground_truth[g].frame].gts.push_back({&ground_truth[g], g});

    std::vector<char> tp(predictions.size(), 0);
    std::vector<int> matched(predictions.size(), -1);
    for (auto& [id, fs] : frames)
        match_frame(fs.preds, fs.gts, iou_threshold, false, tp, &matched);

    std::vector<char> gt_matched(ground_truth.size(), 0);
    for (size_t i = 0; i < predictions.size(); ++i)
        if (matched[i] >= 0) gt_matched[matched[i]] = 1;

    GroupRecall out;
    for (size_t g = 0; g < ground_truth.size(); ++g) {
        const int group = assign_group(ground_truth[g]).index();
        ++out.total[group];
        if (gt_matched[g]) ++out.matched[group];
    }
    return out;
}

double bucket_recall(std::span<const Label> predictions, std::span<const Label> ground_truth,
                     double iou_threshold, const EvalBucket& bucket) {
    std::map<std::string, FrameSet> frames;
    for (int i = 0; i < int(predictions.size()); ++i)
        frames[predictions[i].frame].preds.push_back({&predictions[i], i});
    int num_gt = 0;
    for (int g = 0; g < int(ground_truth.size()); ++g) {
        if (!in_bucket(box_distance(ground_truth[g].box), bucket)) continue;
        frames[ground_truth[g].frame].gts.push_back({&ground_truth[g], g});
        ++num_gt;
    }
    if (num_gt == 0) return 0.0;
    std::vector<char> tp(predictions.size(), 0);
    for (auto& [id, fs] : frames) match_frame(fs.preds, fs.gts, iou_threshold, false, tp);
    const int matched = int(std::count(tp.begin(), tp.end(), char(1)));
    return double(matched) / double(num_gt);
}

}  // namespace autolabel
