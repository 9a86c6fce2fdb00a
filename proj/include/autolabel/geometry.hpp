#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <vector>

#include "autolabel/common.hpp"

namespace autolabel {

struct Point2 {
    double x = 0.0, y = 0.0;
};

struct Point3 {
    double x = 0.0, y = 0.0, z = 0.0;

    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
    Eigen::Vector3d vec() const { return {x, y, z}; }
    static Point3 from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
};

// Ordered point set with an optional parallel persistency-score channel
// (empty scores == absent; otherwise scores.size() == points.size()).
struct PointCloud {
    std::vector<Point3> points;
    std::vector<double> scores;

    size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    bool has_scores() const { return !scores.empty(); }
    void validate() const;
};

// Rigid transform. rotation must be orthonormal with det +1 (tol 1e-9).
struct Pose {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    void validate(double tol = 1e-9) const;
    Pose compose(const Pose& inner) const;  // this applied after inner
    Pose inverse() const;
    Point3 apply(const Point3& p) const { return Point3::from(rotation * p.vec() + translation); }

    static Pose yaw_about_z(double yaw, const Eigen::Vector3d& t = Eigen::Vector3d::Zero());
};

// Pinhole camera. extrinsic maps world coordinates into the camera frame
// (z forward, x right, y down).
struct CameraModel {
    Eigen::Matrix3d intrinsic = Eigen::Matrix3d::Identity();
    Pose extrinsic;
    int width = 0, height = 0;

    void validate() const;
};

// Yaw-only 3D box. Canonical form has length >= width and yaw in [-pi/2, pi/2);
// boxes are identical under yaw +- pi.
struct OrientedBox {
    Point3 center;
    double length = 0.0, width = 0.0, height = 0.0;
    double yaw = 0.0;

    void validate() const;
    OrientedBox canonical() const;
    double z_min() const { return center.z - 0.5 * height; }
    double z_max() const { return center.z + 0.5 * height; }
};

// Wraps yaw into [-pi/2, pi/2); boxes have 180-degree symmetry so pi is the period.
double normalize_yaw(double yaw);

PointCloud transform_to_world(const PointCloud& cloud, const Pose& pose);
PointCloud transform_to_world_serial(const PointCloud& cloud, const Pose& pose);

// Footprint corners in the ground plane, counter-clockwise.
std::array<Point2, 4> box_corners_bev(const OrientedBox& box);

double box_volume(const OrientedBox& box);

// Shoelace signed area; positive for counter-clockwise rings.
double polygon_signed_area(const std::vector<Point2>& poly);

// Clips a convex polygon against a convex counter-clockwise clip ring
// (Sutherland-Hodgman).
std::vector<Point2> clip_convex_polygon(const std::vector<Point2>& subject,
                                        const std::vector<Point2>& clip);

}  // namespace autolabel
