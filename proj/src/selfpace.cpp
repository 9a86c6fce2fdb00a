#include "autolabel/selfpace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace autolabel {

std::string GroupId::name() const {
    return std::string(near ? "near" : "far") + "_" + (small ? "small" : "large");
}

GroupId assign_group(const Label& label) {
    label.validate();
    GroupId g;
    g.near = box_distance(label.box) < kNearFarSplit;
    g.small = box_volume(label.box) < kSmallLargeSplit;
    return g;
}

GroupDistribution distribution(std::span<const Label> labels) {
    if (labels.empty()) throw EmptyDistribution("distribution of an empty label set");
    GroupDistribution q{};
    for (const Label& l : labels) q[assign_group(l).index()] += 1.0;
    for (double& v : q) v /= double(labels.size());
    return q;
}

static void check_normalized(const GroupDistribution& q, const char* what) {
    double sum = 0.0;
    for (double v : q) {
        if (v < 0.0 || !std::isfinite(v))
            throw ValidationError(std::string(what) + " has a negative or non-finite entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ValidationError(std::string(what) + " does not sum to 1");
}

GroupDistribution sampling_scores(const GroupDistribution& q_init, const GroupDistribution& q) {
    check_normalized(q_init, "Q_init");
    check_normalized(q, "Q");
    GroupDistribution rates{};
    for (int g = 0; g < GroupId::kCount; ++g) {
        if (q[g] > q_init[g])
            rates[g] = 1.0 - (q[g] - q_init[g]);
        else
            rates[g] = 1.0 + (q_init[g] - q[g]);
    }
    return rates;
}

std::vector<Label> resample(std::span<const Label> labels, const GroupDistribution& rates,
                            uint64_t seed) {
    for (double r : rates)
        if (r < 0.0 || r > 2.0 || !std::isfinite(r))
            throw ValidationError("sampling score outside [0, 2]");

    // stable per-frame position, assigned by input order
    std::unordered_map<std::string, uint64_t> next_in_frame;
    std::vector<uint64_t> frame_index(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) frame_index[i] = next_in_frame[labels[i].frame]++;

    std::vector<Label> out;
    out.reserve(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) {
        const Label& l = labels[i];
        const double r = rates[assign_group(l).index()];
        rng::CounterRng gen({seed, rng::hash_string(l.frame), frame_index[i]});
        const double u = gen.next_uniform();
        if (r <= 1.0) {
            if (u < r) out.push_back(l);
        } else {
            out.push_back(l);
            if (u < r - 1.0) out.push_back(l);
        }
    }
    return out;
}

void RoundConfig::validate() const {
    if (total_rounds < 0) throw ConfigError("total_rounds must be >= 0");
    if (aggregation_start < 1) throw ConfigError("aggregation_start must be >= 1");
    if (total_rounds >= 1 && aggregation_start > total_rounds)
        throw ConfigError("aggregation_start must be <= total_rounds");
    if (!(lambda > 0.0) || !(lambda < 1.0)) throw ConfigError("lambda must be in (0, 1)");
}

ModelWeights aggregate(const ModelWeights& prev_strong, const ModelWeights& weak, int round,
                       const RoundConfig& config) {
    config.validate();
    if (round < 1 || round > config.total_rounds)
        throw ConfigError("round " + std::to_string(round) + " outside [1, " +
                          std::to_string(config.total_rounds) + "]");
    if (prev_strong.size() != weak.size())
        throw ValidationError("weight dimension mismatch: " + std::to_string(prev_strong.size()) +
                              " vs " + std::to_string(weak.size()));
    if (round < config.aggregation_start) return weak;
    ModelWeights out(weak.size());
    for (size_t i = 0; i < weak.size(); ++i)
        out[i] = config.lambda * prev_strong[i] + (1.0 - config.lambda) * weak[i];
    return out;
}

void LearnerParams::validate() const {
    for (double s : initial_skills)
        if (s < 0.0 || s > 1.0) throw ConfigError("initial skills must be in [0, 1]");
    if (!(learning_rate >= 0.0) || learning_rate > 1.0)
        throw ConfigError("learning_rate must be in [0, 1]");
    if (!(saturation > 0.0)) throw ConfigError("saturation must be positive");
}

std::array<double, 4> learner_train_step(const std::array<double, 4>& skills,
                                         std::span<const Label> labels, double learning_rate,
                                         double saturation) {
    const GroupDistribution f = distribution(labels);
    std::array<double, 4> out{};
    for (int g = 0; g < GroupId::kCount; ++g) {
        const double target = f[g] / (f[g] + saturation);
        out[g] = std::clamp((1.0 - learning_rate) * skills[g] + learning_rate * target, 0.0, 1.0);
    }
    return out;
}

std::vector<Label> learner_infer(const Frame& frame, const std::array<double, 4>& skills,
                                 const LearnerParams& params) {
    // bucket latent objects by group, nearest first
    std::array<std::vector<int>, 4> by_group;
    for (int i = 0; i < int(frame.objects.size()); ++i)
        by_group[assign_group(frame.objects[i]).index()].push_back(i);
    for (auto& idxs : by_group)
        std::sort(idxs.begin(), idxs.end(), [&](int a, int b) {
            const double da = box_distance(frame.objects[a].box);
            const double db = box_distance(frame.objects[b].box);
            if (da != db) return da < db;
            return a < b;
        });

    std::vector<int> recalled;
    for (int g = 0; g < GroupId::kCount; ++g) {
        const double s = std::clamp(skills[g], 0.0, 1.0);
        const int n = int(by_group[g].size());
        const int k = std::clamp(int(std::ceil(s * n - 1e-9)), 0, n);
        for (int i = 0; i < k; ++i) recalled.push_back(by_group[g][i]);
    }
    std::sort(recalled.begin(), recalled.end());

    std::vector<Label> out;
    out.reserve(recalled.size());
    for (int idx : recalled) {
        const Label& gt = frame.objects[idx];
        rng::CounterRng gen({params.seed, rng::hash_string(frame.id), uint64_t(idx)});
        Label l;
        l.frame = frame.id;
        l.source = LabelSource::model;
        l.confidence = std::clamp(skills[assign_group(gt).index()], 0.0, 1.0);
        l.box = gt.box;
        l.box.center.x += params.pos_sigma * gen.next_gaussian();
        l.box.center.y += params.pos_sigma * gen.next_gaussian();
        l.box.center.z += params.pos_sigma * gen.next_gaussian();
        l.box.length = std::max(0.05, l.box.length * (1.0 + params.dim_sigma * gen.next_gaussian()));
        l.box.width = std::max(0.05, l.box.width * (1.0 + params.dim_sigma * gen.next_gaussian()));
        l.box.height = std::max(0.05, l.box.height * (1.0 + params.dim_sigma * gen.next_gaussian()));
        l.box.yaw += params.yaw_sigma_deg * M_PI / 180.0 * gen.next_gaussian();
        l.box = l.box.canonical();
        out.push_back(std::move(l));
    }
    return out;
}

SyntheticLearner::SyntheticLearner(LearnerParams params) : params_(params) {
    params_.validate();
}

ModelWeights SyntheticLearner::initial_weights() const {
    return ModelWeights(params_.initial_skills.begin(), params_.initial_skills.end());
}

static std::array<double, 4> to_skills(const ModelWeights& w) {
    if (w.size() != 4) throw ValidationError("synthetic learner expects 4 weights");
    return {w[0], w[1], w[2], w[3]};
}

ModelWeights SyntheticLearner::train(std::span<const Label> labels, const ModelWeights& init,
                                     uint64_t) const {
    const std::array<double, 4> next =
        learner_train_step(to_skills(init), labels, params_.learning_rate, params_.saturation);
    return ModelWeights(next.begin(), next.end());
}

std::vector<Label> SyntheticLearner::infer(const Frame& frame,
                                           const ModelWeights& weights) const {
    return learner_infer(frame, to_skills(weights), params_);
}

// Pools detector output over frames; frame order is preserved so the result
// is identical for any worker count.
static std::vector<Label> infer_all(const Detector& detector, std::span<const Frame> frames,
                                    const ModelWeights& weights) {
    std::vector<std::vector<Label>> per_frame(frames.size());
    const int64_t n = int64_t(frames.size());
#pragma omp parallel for schedule(dynamic)
    for (int64_t i = 0; i < n; ++i) per_frame[i] = detector.infer(frames[i], weights);
    std::vector<Label> pooled;
    for (std::vector<Label>& f : per_frame)
        pooled.insert(pooled.end(), f.begin(), f.end());
    return pooled;
}

static std::vector<Label> frame_truths(std::span<const Frame> frames) {
    std::vector<Label> out;
    for (const Frame& f : frames) out.insert(out.end(), f.objects.begin(), f.objects.end());
    return out;
}

SelfPaceResult run_self_paced(const SelfPaceDataset& dataset, const Detector& detector,
                              const RoundConfig& config, const EvalConfig& eval_config,
                              uint64_t seed) {
    config.validate();
    eval_config.validate();

    SelfPaceResult result;
    result.seed_weights = detector.train(dataset.seed_labels, detector.initial_weights(), seed);
    result.q_init = distribution(dataset.seed_labels);

    const std::vector<Label> heldout_gt = frame_truths(dataset.heldout);

    ModelWeights strong = result.seed_weights;
    ModelWeights weak = result.seed_weights;
    std::vector<Label> prev_labels = dataset.seed_labels;

    for (int t = 1; t <= config.total_rounds; ++t) {
        RoundReport report;
        report.round = t;
        report.q_init = result.q_init;

        std::vector<Label> pseudo = infer_all(detector, dataset.training, strong);
        report.degenerate = pseudo.empty();
        if (report.degenerate) pseudo = prev_labels;

        report.q = distribution(pseudo);
        report.rates = config.adaptive_sampling ? sampling_scores(result.q_init, report.q)
                                                : GroupDistribution{1.0, 1.0, 1.0, 1.0};
        const std::vector<Label> resampled = resample(pseudo, report.rates, seed ^ uint64_t(t));

        weak = detector.train(resampled, weak, seed ^ uint64_t(t));
        strong = aggregate(strong, weak, t, config);

        report.weights = strong;
        if (!dataset.heldout.empty()) {
            report.metrics =
                evaluate(infer_all(detector, dataset.heldout, strong), heldout_gt, eval_config);
            report.weak_metrics =
                evaluate(infer_all(detector, dataset.heldout, weak), heldout_gt, eval_config);
        }
        prev_labels = std::move(pseudo);
        result.rounds.push_back(std::move(report));
    }

    result.final_weights = strong;
    return result;
}

}  // namespace autolabel
