#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "autolabel/boxfit.hpp"
#include "autolabel/geometry.hpp"

namespace autolabel {

// 2D instance mask, run-length encoded over row-major 0-based pixel indices.
// Runs are normalized (sorted, merged) on construction.
struct Mask2D {
    int width = 0, height = 0;
    std::vector<std::pair<int64_t, int64_t>> runs;  // (start, length)
    std::string label;
    double confidence = 1.0;

    void normalize();       // sort + merge runs, then validate
    void validate() const;  // bounds, non-empty foreground
    bool contains(int u, int v) const;
    int64_t foreground_pixels() const;

    static Mask2D from_pixels(int width, int height, std::span<const int64_t> pixel_indices,
                              std::string label = {}, double confidence = 1.0);
};

struct LiftParams {
    double grow_radius = 0.5;  // meters
    int min_cluster = 5;       // lifted boxes need at least this many points
    double min_depth = 0.1;    // meters, camera-frame depth cutoff

    void validate() const;
};

struct PointProjection {
    double u = 0.0, v = 0.0;  // pixels
    double depth = 0.0;       // camera-frame z, meters
    bool valid = false;       // depth > min_depth and rounded pixel in bounds
};

struct ProjectionSet {
    std::vector<PointProjection> items;
    int image_w = 0, image_h = 0;
};

ProjectionSet project_points(const PointCloud& cloud, const CameraModel& camera,
                             double min_depth = 0.1);
ProjectionSet project_points_serial(const PointCloud& cloud, const CameraModel& camera,
                                    double min_depth = 0.1);

// Indices of valid projections whose rounded pixel lies on mask foreground.
std::vector<int> points_in_mask(const ProjectionSet& projections, const Mask2D& mask);

// Largest connected component under distance <= grow_radius; ties go to the
// component containing the smallest point index. Returns ascending indices.
std::vector<int> region_grow(const PointCloud& points, double grow_radius);

// project -> mask frustum -> region grow -> fit. Absent (not an error) when
// the mask catches no points or the grown cluster is smaller than min_cluster.
std::optional<FitResult> lift_mask_to_box(const PointCloud& cloud, const CameraModel& camera,
                                          const Mask2D& mask, const LiftParams& params,
                                          FitParams fit = {});

}  // namespace autolabel
