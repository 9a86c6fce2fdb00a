#include "autolabel/persistency.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "autolabel/voxel_grid.hpp"

namespace autolabel {

void TraversalSet::validate() const {
    if (traversals.size() < 2)
        throw ConfigError("persistency requires at least 2 traversals, got " +
                          std::to_string(traversals.size()));
    for (size_t t = 0; t < traversals.size(); ++t) {
        if (traversals[t].empty())
            throw ValidationError("traversal " + std::to_string(t) + " is empty");
        traversals[t].validate();
    }
}

void PersistencyParams::validate() const {
    if (!(neighbor_radius > 0.0)) throw ConfigError("neighbor_radius must be positive");
    if (!(smoothing > 0.0)) throw ConfigError("smoothing must be positive");
}

static std::vector<int> counts_impl(const PointCloud& query, const TraversalSet& traversals,
                                    const PersistencyParams& params, bool parallel) {
    params.validate();
    traversals.validate();
    query.validate();

    const size_t T = traversals.count();
    const int64_t m = int64_t(query.size());
    std::vector<int> counts(size_t(m) * T, 0);
    if (m == 0) return counts;

    std::vector<VoxelGridIndex> indices;
    indices.reserve(T);
    for (const PointCloud& c : traversals.traversals)
        indices.emplace_back(std::span<const Point3>(c.points), params.neighbor_radius);

#pragma omp parallel for if (parallel)
    for (int64_t i = 0; i < m; ++i)
        for (size_t t = 0; t < T; ++t)
            counts[size_t(i) * T + t] =
                indices[t].count_in_radius(query.points[i], params.neighbor_radius);
    return counts;
}

std::vector<int> neighbor_counts(const PointCloud& query, const TraversalSet& traversals,
                                 const PersistencyParams& params) {
    return counts_impl(query, traversals, params, true);
}

std::vector<int> neighbor_counts_serial(const PointCloud& query, const TraversalSet& traversals,
                                        const PersistencyParams& params) {
    return counts_impl(query, traversals, params, false);
}

std::vector<double> ppscore(std::span<const int> counts, size_t traversal_count, double smoothing) {
    if (traversal_count < 2) throw ConfigError("ppscore requires at least 2 traversals");
    if (!(smoothing > 0.0)) throw ConfigError("smoothing must be positive");
    if (counts.size() % traversal_count != 0)
        throw ValidationError("count matrix size is not a multiple of the traversal count");

    const size_t T = traversal_count;
    const int64_t m = int64_t(counts.size() / T);
    const double log_t = std::log(double(T));
    std::vector<double> tau(static_cast<size_t>(m));

#pragma omp parallel for
    for (int64_t i = 0; i < m; ++i) {
        double total = 0.0;
        for (size_t t = 0; t < T; ++t) total += counts[size_t(i) * T + t] + smoothing;
        double entropy = 0.0;
        for (size_t t = 0; t < T; ++t) {
            const double p = (counts[size_t(i) * T + t] + smoothing) / total;
            entropy -= p * std::log(p);
        }
        tau[i] = std::clamp(entropy / log_t, 0.0, 1.0);
    }
    return tau;
}

PointCloud score_cloud(const PointCloud& query, const TraversalSet& traversals,
                       const PersistencyParams& params) {
    std::vector<int> counts = neighbor_counts(query, traversals, params);
    PointCloud out = query;
    out.scores = ppscore(counts, traversals.count(), params.smoothing);
    return out;
}

}  // namespace autolabel
