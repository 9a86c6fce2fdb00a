#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "autolabel/boxfit.hpp"
#include "autolabel/clustering.hpp"
#include "autolabel/evaluation.hpp"
#include "autolabel/image_lift.hpp"
#include "autolabel/label_fusion.hpp"
#include "autolabel/persistency.hpp"
#include "autolabel/scene_synth.hpp"
#include "autolabel/selfpace.hpp"

namespace autolabel {
namespace io {

namespace fs = std::filesystem;

// Binary clouds are little-endian float32 records, xyz (12 bytes) preferred;
// xyzi (16 bytes, intensity ignored) accepted when 12 does not divide the
// file. ".csv" paths go through the CSV reader (header with x,y,z[,score]).
PointCloud load_cloud(const fs::path& path);
void save_cloud(const fs::path& path, const PointCloud& cloud);          // binary xyz
void save_cloud_csv(const fs::path& path, const PointCloud& cloud);      // x,y,z[,score]

Pose load_pose(const fs::path& path);  // JSON 4x4 row-major matrix
void save_pose(const fs::path& path, const Pose& pose);

CameraModel load_camera(const fs::path& path);
void save_camera(const fs::path& path, const CameraModel& camera);

std::vector<Mask2D> load_masks(const fs::path& path);
void save_masks(const fs::path& path, const std::vector<Mask2D>& masks, int image_w, int image_h);

// JSON lines, one label per line; lines holding a "meta" object are skipped.
std::vector<Label> load_labels(const fs::path& path);
void save_labels(const fs::path& path, const std::vector<Label>& labels,
                 const nlohmann::json* meta = nullptr);

struct ManifestFrame {
    std::string id;
    std::string location;
    int traversal = 0;
    std::string split = "train";  // train | test
    fs::path cloud, pose, camera, masks, ground_truth;
};

struct Manifest {
    std::vector<ManifestFrame> frames;
    std::vector<std::vector<std::string>> traversal_groups;

    const ManifestFrame& frame(const std::string& id) const;
    std::vector<std::string> group_of(const std::string& frame_id) const;
};

Manifest load_manifest(const fs::path& path);
void save_manifest(const fs::path& path, const Manifest& manifest);

// Writes a generated scene as a dataset directory the pipeline can ingest.
Manifest write_dataset(const fs::path& root, const GeneratedScene& scene);

// Full pipeline configuration; one JSON file, flags override fields.
struct PipelineConfig {
    PersistencyParams persistency;
    ClusterParams clustering;
    FitParams boxfit;
    LiftParams lift;
    FusionParams fusion;
    bool fusion_nms = false;
    double fusion_nms_iou = 0.5;
    RoundConfig selfpace;
    LearnerParams learner;
    EvalConfig eval;
    uint64_t seed = 0;
    int threads = 0;  // 0 = library default
};

PipelineConfig load_config(const fs::path& path);
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& config);

nlohmann::json summary_to_json(const EvalSummary& summary);
nlohmann::json round_report_to_json(const RoundReport& report);
void save_round_reports(const fs::path& path, const std::vector<RoundReport>& reports,
                        const nlohmann::json& meta);
void save_metrics(const fs::path& path, const EvalSummary& summary, const nlohmann::json& meta);

void save_weights(const fs::path& path, const ModelWeights& weights, const nlohmann::json& meta);
ModelWeights load_weights(const fs::path& path);

SceneSpec load_scene_spec(const fs::path& path);
nlohmann::json scene_spec_to_json(const SceneSpec& spec);

// Atomic text write (temp file + rename).
void write_file_atomic(const fs::path& path, const std::string& contents);

}  // namespace io
}  // namespace autolabel
