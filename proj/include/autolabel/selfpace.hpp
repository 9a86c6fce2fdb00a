#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "autolabel/evaluation.hpp"
#include "autolabel/label_fusion.hpp"

namespace autolabel {

// Distance-volume group: near/far split at 30 m, small/large at 5 m^3.
// Boundary values go to far / large.
struct GroupId {
    bool near = true;
    bool small = true;

    static constexpr int kCount = 4;
    // order: near-large, near-small, far-large, far-small
    int index() const { return (near ? 0 : 2) + (small ? 1 : 0); }
    static GroupId from_index(int i) { return GroupId{i < 2, (i & 1) == 1}; }
    std::string name() const;
};

constexpr double kNearFarSplit = 30.0;     // meters
constexpr double kSmallLargeSplit = 5.0;   // cubic meters

GroupId assign_group(const Label& label);

using GroupDistribution = std::array<double, GroupId::kCount>;

// Group counts normalized to sum 1. Throws EmptyDistribution on empty input.
GroupDistribution distribution(std::span<const Label> labels);

// Sampling score per group: both printed branches reduce to
// 1 + Q_init(g) - Q(g). Inputs must each sum to 1 (tol 1e-9).
GroupDistribution sampling_scores(const GroupDistribution& q_init, const GroupDistribution& q);

// Keep/duplicate resampling. R <= 1 keeps a label with probability R;
// R > 1 keeps it and duplicates with probability R - 1. Randomness is
// counter-based, keyed by (seed, frame, index within frame), so the result
// does not depend on how iteration is sharded.
std::vector<Label> resample(std::span<const Label> labels, const GroupDistribution& rates,
                            uint64_t seed);

using ModelWeights = std::vector<double>;

struct RoundConfig {
    int total_rounds = 10;      // T
    int aggregation_start = 8;  // T_s
    double lambda = 0.999;
    bool adaptive_sampling = true;

    void validate() const;
};

// Weak model aggregation: pass-through before aggregation_start, then the
// lambda-weighted average of the previous strong model and the new weak one.
ModelWeights aggregate(const ModelWeights& prev_strong, const ModelWeights& weak, int round,
                       const RoundConfig& config);

// One synthetic frame: id plus the latent objects the detector can recall.
struct Frame {
    std::string id;
    std::vector<Label> objects;
};

class Detector {
public:
    virtual ~Detector() = default;
    virtual ModelWeights initial_weights() const = 0;
    virtual ModelWeights train(std::span<const Label> labels, const ModelWeights& init,
                               uint64_t seed) const = 0;
    virtual std::vector<Label> infer(const Frame& frame, const ModelWeights& weights) const = 0;
};

struct LearnerParams {
    std::array<double, 4> initial_skills{0.5, 0.5, 0.5, 0.5};
    double learning_rate = 0.3;  // eta
    double saturation = 0.1;     // f_0
    double pos_sigma = 0.2;      // meters
    double dim_sigma = 0.05;     // relative
    double yaw_sigma_deg = 2.0;
    uint64_t seed = 0;

    void validate() const;
};

// Skill update toward f_g / (f_g + f_0) where f_g is the group's share of the
// training labels; clamped to [0, 1].
std::array<double, 4> learner_train_step(const std::array<double, 4>& skills,
                                         std::span<const Label> labels, double learning_rate,
                                         double saturation);

// Recalls the ceil(s_g * n_g) latent objects nearest the ego per group and
// emits them with seeded Gaussian noise; confidence = s_g.
std::vector<Label> learner_infer(const Frame& frame, const std::array<double, 4>& skills,
                                 const LearnerParams& params);

// Deterministic stand-in detector whose weights are 4 per-group skills.
class SyntheticLearner : public Detector {
public:
    explicit SyntheticLearner(LearnerParams params = {});

    ModelWeights initial_weights() const override;
    ModelWeights train(std::span<const Label> labels, const ModelWeights& init,
                       uint64_t seed) const override;
    std::vector<Label> infer(const Frame& frame, const ModelWeights& weights) const override;

private:
    LearnerParams params_;
};

struct RoundReport {
    int round = 0;
    GroupDistribution q_init{}, q{}, rates{};
    ModelWeights weights;        // strong model after aggregation
    EvalSummary metrics;         // strong model on the held-out split
    EvalSummary weak_metrics;    // this round's weak model on the held-out split
    bool degenerate = false;     // inference produced no labels this round
};

struct SelfPaceDataset {
    std::vector<Frame> training;
    std::vector<Frame> heldout;
    std::vector<Label> seed_labels;  // fused pseudo labels for seed training
};

struct SelfPaceResult {
    ModelWeights seed_weights;   // Theta_0
    ModelWeights final_weights;  // Theta_T
    GroupDistribution q_init{};
    std::vector<RoundReport> rounds;
};

// Seed training on the fused labels, then total_rounds of infer -> adaptive
// resample -> warm-start retrain -> aggregate. Bit-reproducible for a fixed
// seed regardless of worker count.
SelfPaceResult run_self_paced(const SelfPaceDataset& dataset, const Detector& detector,
                              const RoundConfig& config, const EvalConfig& eval_config,
                              uint64_t seed);

}  // namespace autolabel
