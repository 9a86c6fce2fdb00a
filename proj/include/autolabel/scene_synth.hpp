#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "autolabel/image_lift.hpp"
#include "autolabel/label_fusion.hpp"

namespace autolabel {

struct ObjectSpec {
    int count = 0;
    double min_dist = 0.0, max_dist = 0.0;  // BEV placement range, meters
    std::array<double, 2> length_range{1, 1};
    std::array<double, 2> width_range{1, 1};
    std::array<double, 2> height_range{1, 1};
};

struct SensorSpec {
    int azimuth_steps = 1024;
    int rings = 72;
    double fov_up_deg = -0.5;
    double fov_down_deg = -24.5;
    double max_range = 120.0;  // meters
    double dropout = 0.05;
    double mount_height = 1.8;  // meters above ground
};

struct CameraSpec {
    double focal = 600.0;  // pixels, fx = fy
    int width = 960;
    int height = 600;
    double mount_height = 1.6;
};

struct SceneSpec {
    double world_extent = 150.0;  // ground half-extent, meters
    int locations = 1;
    int heldout_locations = 0;  // extra locations marked split=test
    int traversals = 4;
    // order: near-large, near-small, far-large, far-small
    std::array<ObjectSpec, 4> objects = {
        ObjectSpec{4, 7.0, 28.0, {3.8, 4.8}, {1.7, 2.0}, {1.4, 1.9}},
        ObjectSpec{4, 7.0, 28.0, {0.6, 1.1}, {0.5, 0.9}, {1.0, 1.8}},
        ObjectSpec{2, 32.0, 74.0, {3.8, 4.8}, {1.7, 2.0}, {1.4, 1.9}},
        ObjectSpec{3, 32.0, 74.0, {0.7, 1.2}, {0.6, 1.0}, {1.2, 1.9}},
    };
    double placement_azimuth_deg = 38.0;  // objects within +-this of the camera axis
    // static walls sit outside the placement wedge so far objects stay visible
    std::vector<OrientedBox> walls = {
        OrientedBox{{10.0, 30.0, 2.0}, 36.0, 0.6, 4.0, 0.0},
        OrientedBox{{8.0, -26.0, 1.75}, 30.0, 0.6, 3.5, 0.15},
        OrientedBox{{-16.0, 4.0, 2.5}, 0.8, 28.0, 5.0, 0.0},
    };
    SensorSpec sensor;
    CameraSpec camera;
    double mask_noise = 0.0;  // 0 disables boundary jitter and false masks
    uint64_t seed = 0;

    void validate() const;
};

struct GeneratedFrame {
    std::string id;
    std::string location;
    int traversal = 0;
    bool heldout = false;
    PointCloud cloud_sensor;  // sensor frame; pose maps it to world
    Pose pose;
    CameraModel camera;             // extrinsic maps world -> camera
    std::vector<Mask2D> masks;      // one per camera-visible object
    std::vector<Label> ground_truth;  // this traversal's placed boxes, world frame
    std::vector<int> point_source;  // per point: -1 ground, -2-k wall k, else object idx
};

struct GeneratedScene {
    std::vector<GeneratedFrame> frames;
    std::vector<std::vector<int>> traversal_groups;  // frame indices per location
};

// Deterministic world generator: static walls and ground are identical across
// a location's traversals while objects are re-placed per traversal, so
// persistency separates them. Returns byte-identical output for equal specs.
GeneratedScene generate(const SceneSpec& spec);

}  // namespace autolabel
