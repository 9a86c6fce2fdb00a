#include "autolabel/boxfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace autolabel {

namespace {

constexpr double kClipFloor = 0.01;  // closeness distance clip, meters
constexpr double kMinDim = 0.05;     // degenerate dimension clamp, meters

struct Projection {
    double min1, max1, min2, max2;
};

Projection project(std::span<const Point2> pts, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    Projection pr{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest(),
                  std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest()};
    for (const Point2& p : pts) {
        const double c1 = p.x * c + p.y * s;
        const double c2 = -p.x * s + p.y * c;
        pr.min1 = std::min(pr.min1, c1);
        pr.max1 = std::max(pr.max1, c1);
        pr.min2 = std::min(pr.min2, c2);
        pr.max2 = std::max(pr.max2, c2);
    }
    return pr;
}

double variance(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= double(v.size());
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return acc / double(v.size());
}

}  // namespace

void FitParams::validate() const {
    if (!(angle_step > 0.0) || angle_step > M_PI / 8.0)
        throw ConfigError("angle_step must be in (0, pi/8]");
    if (min_points < 3) throw ConfigError("min_points must be >= 3");
}

double lshape_criterion(std::span<const Point2> points_bev, double theta, FitCriterion criterion) {
    if (points_bev.size() < 3)
        throw TooFewPoints("lshape_criterion needs >= 3 points, got " +
                           std::to_string(points_bev.size()));
    const double c = std::cos(theta), s = std::sin(theta);
    const Projection pr = project(points_bev, theta);

    if (criterion == FitCriterion::area) return -(pr.max1 - pr.min1) * (pr.max2 - pr.min2);

    if (criterion == FitCriterion::closeness) {
        double score = 0.0;
        for (const Point2& p : points_bev) {
            const double c1 = p.x * c + p.y * s;
            const double c2 = -p.x * s + p.y * c;
            const double d1 = std::min(c1 - pr.min1, pr.max1 - c1);
            const double d2 = std::min(c2 - pr.min2, pr.max2 - c2);
            score += 1.0 / std::max(std::min(d1, d2), kClipFloor);
        }
        return score;
    }

    // variance: group each point by its nearer axis, penalize spread within groups
    std::vector<double> g1, g2;
    g1.reserve(points_bev.size());
    g2.reserve(points_bev.size());
    for (const Point2& p : points_bev) {
        const double c1 = p.x * c + p.y * s;
        const double c2 = -p.x * s + p.y * c;
        const double d1 = std::min(c1 - pr.min1, pr.max1 - c1);
        const double d2 = std::min(c2 - pr.min2, pr.max2 - c2);
        if (d1 < d2)
            g1.push_back(d1);
        else
            g2.push_back(d2);
    }
    return -(variance(g1) + variance(g2));
}

FitResult fit_box(const PointCloud& cluster, const FitParams& params) {
    params.validate();
    cluster.validate();
    if (int(cluster.size()) < params.min_points)
        throw TooFewPoints("fit_box needs >= " + std::to_string(params.min_points) +
                           " points, got " + std::to_string(cluster.size()));

    std::vector<Point2> bev(cluster.size());
    double z_min = std::numeric_limits<double>::max();
    double z_max = std::numeric_limits<double>::lowest();
    for (size_t i = 0; i < cluster.size(); ++i) {
        bev[i] = {cluster.points[i].x, cluster.points[i].y};
        z_min = std::min(z_min, cluster.points[i].z);
        z_max = std::max(z_max, cluster.points[i].z);
    }

    double best_theta = 0.0;
    double best_score = std::numeric_limits<double>::lowest();
    for (double theta = 0.0; theta < M_PI_2 - 1e-12; theta += params.angle_step) {
        const double score = lshape_criterion(bev, theta, params.criterion);
        if (score > best_score) {
            best_score = score;
            best_theta = theta;
        }
    }

    const Projection pr = project(bev, best_theta);
    const double c = std::cos(best_theta), s = std::sin(best_theta);
    const double m1 = 0.5 * (pr.min1 + pr.max1);
    const double m2 = 0.5 * (pr.min2 + pr.max2);

    FitResult out;
    out.box.center = {c * m1 - s * m2, s * m1 + c * m2, 0.5 * (z_min + z_max)};
    out.box.length = pr.max1 - pr.min1;
    out.box.width = pr.max2 - pr.min2;
    out.box.height = z_max - z_min;
    out.box.yaw = best_theta;

    if (out.box.length < kMinDim) {
        out.box.length = kMinDim;
        out.degenerate = true;
    }
    if (out.box.width < kMinDim) {
        out.box.width = kMinDim;
        out.degenerate = true;
    }
    if (out.box.height < kMinDim) out.box.height = kMinDim;

    out.box = out.box.canonical();
    return out;
}

}  // namespace autolabel
