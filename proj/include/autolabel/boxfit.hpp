#pragma once

#include <span>

#include "autolabel/geometry.hpp"

namespace autolabel {

enum class FitCriterion { closeness, variance, area };

struct FitParams {
    double angle_step = M_PI / 180.0;  // theta grid resolution
    FitCriterion criterion = FitCriterion::closeness;
    int min_points = 5;

    void validate() const;
};

struct FitResult {
    OrientedBox box;
    bool degenerate = false;  // a footprint dimension hit the 0.05 m clamp
};

// Scores one rotation of the yaw-search rectangle fit; higher is better.
// closeness: sum of inverse clipped distances to the nearest rectangle edge;
// variance: negative summed variance of the two nearest-edge distance groups;
// area: negative bounding-rectangle area.
double lshape_criterion(std::span<const Point2> points_bev, double theta, FitCriterion criterion);

// Tight yaw-oriented box around a cluster: yaw from an angle-grid search over
// [0, pi/2), footprint from the min/max projections at the winning angle
// (ties take the smallest angle), height from the z span. Near-collinear
// footprints are clamped to 0.05 m and flagged.
FitResult fit_box(const PointCloud& cluster, const FitParams& params);

}  // namespace autolabel
