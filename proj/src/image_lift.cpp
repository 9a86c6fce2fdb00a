#include "autolabel/image_lift.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "autolabel/voxel_grid.hpp"

namespace autolabel {

void Mask2D::normalize() {
    std::sort(runs.begin(), runs.end());
    std::vector<std::pair<int64_t, int64_t>> merged;
    for (const auto& [start, len] : runs) {
        if (len <= 0) throw ValidationError("mask run with non-positive length");
        if (!merged.empty() && start <= merged.back().first + merged.back().second) {
            merged.back().second =
                std::max(merged.back().second, start + len - merged.back().first);
        } else {
            merged.emplace_back(start, len);
        }
    }
    runs = std::move(merged);
    validate();
}

void Mask2D::validate() const {
    if (width <= 0 || height <= 0) throw ValidationError("mask dimensions must be positive");
    if (runs.empty()) throw ValidationError("mask has empty foreground");
    const int64_t total = int64_t(width) * int64_t(height);
    for (const auto& [start, len] : runs) {
        if (start < 0 || len <= 0 || start + len > total)
            throw ValidationError("mask run [" + std::to_string(start) + ", +" +
                                  std::to_string(len) + ") outside image of " +
                                  std::to_string(total) + " pixels");
    }
    if (!std::isfinite(confidence) || confidence < 0.0 || confidence > 1.0)
        throw ValidationError("mask confidence must be in [0, 1]");
}

bool Mask2D::contains(int u, int v) const {
    if (u < 0 || v < 0 || u >= width || v >= height) return false;
    const int64_t idx = int64_t(v) * width + u;
    auto it = std::upper_bound(runs.begin(), runs.end(), std::make_pair(idx, INT64_MAX));
    if (it == runs.begin()) return false;
    --it;
    return idx < it->first + it->second;
}

int64_t Mask2D::foreground_pixels() const {
    int64_t total = 0;
    for (const auto& [start, len] : runs) total += len;
    return total;
}

Mask2D Mask2D::from_pixels(int width, int height, std::span<const int64_t> pixel_indices,
                           std::string label, double confidence) {
    std::vector<int64_t> px(pixel_indices.begin(), pixel_indices.end());
    std::sort(px.begin(), px.end());
    px.erase(std::unique(px.begin(), px.end()), px.end());
    Mask2D m;
    m.width = width;
    m.height = height;
    m.label = std::move(label);
    m.confidence = confidence;
    for (size_t i = 0; i < px.size();) {
        size_t j = i + 1;
        while (j < px.size() && px[j] == px[j - 1] + 1) ++j;
        m.runs.emplace_back(px[i], int64_t(j - i));
        i = j;
    }
    m.normalize();
    return m;
}

void LiftParams::validate() const {
    if (!(grow_radius > 0.0)) throw ConfigError("grow_radius must be positive");
    if (min_cluster < 3) throw ConfigError("min_cluster must be >= 3");
    if (!(min_depth > 0.0)) throw ConfigError("min_depth must be positive");
}

static ProjectionSet project_impl(const PointCloud& cloud, const CameraModel& camera,
                                  double min_depth, bool parallel) {
    camera.validate();
    cloud.validate();
    ProjectionSet out;
    out.image_w = camera.width;
    out.image_h = camera.height;
    out.items.resize(cloud.size());

    const Eigen::Matrix3d& rot = camera.extrinsic.rotation;
    const Eigen::Vector3d& t = camera.extrinsic.translation;
    const Eigen::Matrix3d& k = camera.intrinsic;
    const int64_t n = int64_t(cloud.size());

#pragma omp parallel for if (parallel)
    for (int64_t i = 0; i < n; ++i) {
        const Eigen::Vector3d pc = rot * cloud.points[i].vec() + t;
        PointProjection& pp = out.items[i];
        pp.depth = pc.z();
        if (pc.z() <= min_depth) {
            pp.valid = false;
            continue;
        }
        const Eigen::Vector3d uvw = k * pc;
        pp.u = uvw.x() / uvw.z();
        pp.v = uvw.y() / uvw.z();
        const long pu = std::lround(pp.u), pv = std::lround(pp.v);
        pp.valid = pu >= 0 && pu < camera.width && pv >= 0 && pv < camera.height;
    }
    return out;
}

ProjectionSet project_points(const PointCloud& cloud, const CameraModel& camera,
                             double min_depth) {
    return project_impl(cloud, camera, min_depth, true);
}

ProjectionSet project_points_serial(const PointCloud& cloud, const CameraModel& camera,
                                    double min_depth) {
    return project_impl(cloud, camera, min_depth, false);
}

std::vector<int> points_in_mask(const ProjectionSet& projections, const Mask2D& mask) {
    mask.validate();
    if (mask.width != projections.image_w || mask.height != projections.image_h)
        throw ValidationError("mask is " + std::to_string(mask.width) + "x" +
                              std::to_string(mask.height) + " but image is " +
                              std::to_string(projections.image_w) + "x" +
                              std::to_string(projections.image_h));
    std::vector<int> selected;
    for (int i = 0; i < int(projections.items.size()); ++i) {
        const PointProjection& pp = projections.items[i];
        if (!pp.valid) continue;
        if (mask.contains(int(std::lround(pp.u)), int(std::lround(pp.v)))) selected.push_back(i);
    }
    return selected;
}

std::vector<int> region_grow(const PointCloud& points, double grow_radius) {
    if (points.empty()) throw EmptyFrustum("region_grow: no points");
    if (!(grow_radius > 0.0)) throw ConfigError("grow_radius must be positive");
    points.validate();

    const int n = int(points.size());
    VoxelGridIndex index(std::span<const Point3>(points.points), grow_radius);
    std::vector<int> component(size_t(n), -1);
    int best = -1, best_size = 0;

    for (int seed = 0, comp = 0; seed < n; ++seed) {
        if (component[seed] >= 0) continue;
        int size = 0;
        std::queue<int> frontier;
        component[seed] = comp;
        frontier.push(seed);
        while (!frontier.empty()) {
            const int u = frontier.front();
            frontier.pop();
            ++size;
            index.for_each_in_radius(points.points[u], grow_radius, [&](int v, double) {
                if (component[v] < 0) {
                    component[v] = comp;
                    frontier.push(v);
                }
            });
        }
        // ties: the earlier component wins, it contains the smaller index
        if (size > best_size) {
            best_size = size;
            best = comp;
        }
        ++comp;
    }

    std::vector<int> out;
    out.reserve(best_size);
    for (int i = 0; i < n; ++i)
        if (component[i] == best) out.push_back(i);
    return out;
}

std::optional<FitResult> lift_mask_to_box(const PointCloud& cloud, const CameraModel& camera,
                                          const Mask2D& mask, const LiftParams& params,
                                          FitParams fit) {
    params.validate();
    const ProjectionSet proj = project_points(cloud, camera, params.min_depth);
    const std::vector<int> in_mask = points_in_mask(proj, mask);
    if (in_mask.empty()) return std::nullopt;

    PointCloud frustum;
    frustum.points.reserve(in_mask.size());
    for (int idx : in_mask) frustum.points.push_back(cloud.points[idx]);

    const std::vector<int> grown = region_grow(frustum, params.grow_radius);
    if (int(grown.size()) < params.min_cluster) return std::nullopt;

    PointCloud cluster;
    cluster.points.reserve(grown.size());
    for (int idx : grown) cluster.points.push_back(frustum.points[idx]);

    fit.min_points = std::min(fit.min_points, params.min_cluster);
    return fit_box(cluster, fit);
}

}  // namespace autolabel
