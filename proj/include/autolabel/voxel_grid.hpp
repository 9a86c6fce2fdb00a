#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "autolabel/geometry.hpp"

namespace autolabel {

// Uniform voxel hash over a fixed point set. Cells are cubes of edge `cell`;
// a radius query visits ceil(r/cell) shells of cells around the query point.
// Candidate lookup is O(1) per cell, which keeps neighbor counting at
// O(m log n)-ish instead of O(m*n).
class VoxelGridIndex {
public:
    VoxelGridIndex() = default;

    VoxelGridIndex(std::span<const Point3> points, double cell) : cell_(cell) {
        if (!(cell > 0.0)) throw ConfigError("voxel cell size must be positive");
        cells_.reserve(points.size());
        for (int i = 0; i < int(points.size()); ++i) cells_[key_of(points[i])].push_back(i);
        points_.assign(points.begin(), points.end());
    }

    size_t size() const { return points_.size(); }

    // Calls f(index, squared_distance) for every indexed point within `radius`
    // (inclusive) of q. Visit order follows cell layout; callers needing a
    // canonical order should collect and sort.
    template <class F>
    void for_each_in_radius(const Point3& q, double radius, F&& f) const {
        const double r2 = radius * radius;
        const int span = int(std::ceil(radius / cell_));
        const int64_t cx = coord(q.x), cy = coord(q.y), cz = coord(q.z);
        for (int64_t ix = cx - span; ix <= cx + span; ++ix)
            for (int64_t iy = cy - span; iy <= cy + span; ++iy)
                for (int64_t iz = cz - span; iz <= cz + span; ++iz) {
                    auto it = cells_.find(pack(ix, iy, iz));
                    if (it == cells_.end()) continue;
                    for (int idx : it->second) {
                        const Point3& p = points_[idx];
                        const double dx = p.x - q.x, dy = p.y - q.y, dz = p.z - q.z;
                        const double d2 = dx * dx + dy * dy + dz * dz;
                        if (d2 <= r2) f(idx, d2);
                    }
                }
    }

    int count_in_radius(const Point3& q, double radius) const {
        int n = 0;
        for_each_in_radius(q, radius, [&](int, double) { ++n; });
        return n;
    }

    // Indices within radius, ascending (deterministic regardless of hash order).
    std::vector<int> radius_indices(const Point3& q, double radius) const {
        std::vector<int> out;
        for_each_in_radius(q, radius, [&](int idx, double) { out.push_back(idx); });
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    int64_t coord(double v) const { return int64_t(std::floor(v / cell_)); }

    static uint64_t pack(int64_t ix, int64_t iy, int64_t iz) {
        // 21 bits per axis, offset to keep coordinates positive
        const uint64_t off = uint64_t(1) << 20;
        return ((uint64_t(ix) + off) & 0x1fffff) << 42 | ((uint64_t(iy) + off) & 0x1fffff) << 21 |
               ((uint64_t(iz) + off) & 0x1fffff);
    }

    uint64_t key_of(const Point3& p) const { return pack(coord(p.x), coord(p.y), coord(p.z)); }

    double cell_ = 1.0;
    std::vector<Point3> points_;
    std::unordered_map<uint64_t, std::vector<int>> cells_;
};

}  // namespace autolabel
