#include "autolabel/geometry.hpp"

#include <string>

namespace autolabel {

void PointCloud::validate() const {
    if (has_scores() && scores.size() != points.size())
        throw ValidationError("point cloud has " + std::to_string(points.size()) + " points but " +
                              std::to_string(scores.size()) + " scores");
    for (size_t i = 0; i < points.size(); ++i)
        if (!points[i].finite())
            throw ValidationError("non-finite point at index " + std::to_string(i));
}

void Pose::validate(double tol) const {
    Eigen::Matrix3d err = rotation * rotation.transpose() - Eigen::Matrix3d::Identity();
    if (err.cwiseAbs().maxCoeff() > tol)
        throw ValidationError("pose rotation is not orthonormal");
    if (std::abs(rotation.determinant() - 1.0) > tol)
        throw ValidationError("pose rotation determinant is not +1");
    if (!translation.allFinite()) throw ValidationError("pose translation is not finite");
}

Pose Pose::compose(const Pose& inner) const {
    return Pose{rotation * inner.rotation, rotation * inner.translation + translation};
}

Pose Pose::inverse() const {
    Eigen::Matrix3d rt = rotation.transpose();
    return Pose{rt, -(rt * translation)};
}

Pose Pose::yaw_about_z(double yaw, const Eigen::Vector3d& t) {
    Pose p;
    p.rotation = Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    p.translation = t;
    return p;
}

void CameraModel::validate() const {
    if (width <= 0 || height <= 0) throw ValidationError("camera image dimensions must be positive");
    const Eigen::Matrix3d& k = intrinsic;
    if (!(k(0, 0) > 0.0) || !(k(1, 1) > 0.0))
        throw ValidationError("camera focal entries must be positive");
    if (k(1, 0) != 0.0 || k(2, 0) != 0.0 || k(2, 1) != 0.0)
        throw ValidationError("camera intrinsic must have zero lower-left entries");
    if (k(2, 2) != 1.0) throw ValidationError("camera intrinsic (2,2) must be 1");
    extrinsic.validate();
}

void OrientedBox::validate() const {
    if (!(length > 0.0) || !(width > 0.0) || !(height > 0.0))
        throw ValidationError("box dimensions must be positive");
    if (!center.finite() || !std::isfinite(yaw)) throw ValidationError("box has non-finite fields");
}

double normalize_yaw(double yaw) {
    double y = std::fmod(yaw + M_PI_2, M_PI);
    if (y < 0.0) y += M_PI;
    return y - M_PI_2;
}

OrientedBox OrientedBox::canonical() const {
    OrientedBox b = *this;
    if (b.length < b.width) {
        std::swap(b.length, b.width);
        b.yaw += M_PI_2;
    }
    b.yaw = normalize_yaw(b.yaw);
    return b;
}

static PointCloud transform_impl(const PointCloud& cloud, const Pose& pose, bool parallel) {
    pose.validate();
    cloud.validate();
    PointCloud out;
    out.points.resize(cloud.points.size());
    out.scores = cloud.scores;
    const int64_t n = int64_t(cloud.points.size());
    if (parallel) {
#pragma omp parallel for
        for (int64_t i = 0; i < n; ++i) out.points[i] = pose.apply(cloud.points[i]);
    } else {
        for (int64_t i = 0; i < n; ++i) out.points[i] = pose.apply(cloud.points[i]);
    }
    return out;
}

PointCloud transform_to_world(const PointCloud& cloud, const Pose& pose) {
    return transform_impl(cloud, pose, true);
}

PointCloud transform_to_world_serial(const PointCloud& cloud, const Pose& pose) {
    return transform_impl(cloud, pose, false);
}

std::array<Point2, 4> box_corners_bev(const OrientedBox& box) {
    box.validate();
    const double c = std::cos(box.yaw), s = std::sin(box.yaw);
    const double hl = 0.5 * box.length, hw = 0.5 * box.width;
    // local corners in counter-clockwise order
    const double lx[4] = {hl, -hl, -hl, hl};
    const double ly[4] = {hw, hw, -hw, -hw};
    std::array<Point2, 4> out;
    for (int i = 0; i < 4; ++i)
        out[i] = {box.center.x + c * lx[i] - s * ly[i], box.center.y + s * lx[i] + c * ly[i]};
    return out;
}

double box_volume(const OrientedBox& box) {
    box.validate();
    return box.length * box.width * box.height;
}

double polygon_signed_area(const std::vector<Point2>& poly) {
    const size_t n = poly.size();
    if (n < 3) return 0.0;
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const Point2& a = poly[i];
        const Point2& b = poly[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    return 0.5 * acc;
}

std::vector<Point2> clip_convex_polygon(const std::vector<Point2>& subject,
                                        const std::vector<Point2>& clip) {
    std::vector<Point2> poly = subject;
    const size_t m = clip.size();
    for (size_t e = 0; e < m && !poly.empty(); ++e) {
        const Point2& c1 = clip[e];
        const Point2& c2 = clip[(e + 1) % m];
        const double ex = c2.x - c1.x, ey = c2.y - c1.y;
        auto inside = [&](const Point2& p) { return ex * (p.y - c1.y) - ey * (p.x - c1.x) >= 0.0; };
        auto intersect = [&](const Point2& a, const Point2& b) {
            const double dx = b.x - a.x, dy = b.y - a.y;
            const double denom = ex * dy - ey * dx;
            // edges near-parallel: either endpoint works, both lie on the boundary
            if (std::abs(denom) < 1e-300) return a;
            const double t = (ex * (a.y - c1.y) - ey * (a.x - c1.x)) / denom;
            return Point2{a.x - t * dx, a.y - t * dy};
        };
        std::vector<Point2> next;
        next.reserve(poly.size() + 4);
        for (size_t i = 0; i < poly.size(); ++i) {
            const Point2& cur = poly[i];
            const Point2& prev = poly[(i + poly.size() - 1) % poly.size()];
            const bool cur_in = inside(cur), prev_in = inside(prev);
            if (cur_in) {
                if (!prev_in) next.push_back(intersect(prev, cur));
                next.push_back(cur);
            } else if (prev_in) {
                next.push_back(intersect(prev, cur));
            }
        }
        poly.swap(next);
    }
    return poly;
}

}  // namespace autolabel
