#pragma once

#include <span>
#include <vector>

#include "autolabel/geometry.hpp"

namespace autolabel {

// Aligned passes over the same location. All clouds share the query frame.
struct TraversalSet {
    std::vector<PointCloud> traversals;

    size_t count() const { return traversals.size(); }
    void validate() const;  // requires >= 2 non-empty traversals
};

struct PersistencyParams {
    double neighbor_radius = 0.3;  // meters
    double smoothing = 1.0;        // epsilon added to every count

    void validate() const;
};

// Per-point neighbor counts against each traversal: row-major [m x T],
// counts[i*T + t] = points of traversal t within neighbor_radius of query i.
std::vector<int> neighbor_counts(const PointCloud& query, const TraversalSet& traversals,
                                 const PersistencyParams& params);
std::vector<int> neighbor_counts_serial(const PointCloud& query, const TraversalSet& traversals,
                                        const PersistencyParams& params);

// Normalized neighbor-count entropy across traversals; 1 = present everywhere
// (static), ~0 = concentrated in one traversal (dynamic). counts is the
// [m x T] matrix from neighbor_counts.
std::vector<double> ppscore(std::span<const int> counts, size_t traversal_count, double smoothing);

// Convenience: counts + scores in one pass; returns a copy of `query` with
// the score channel filled in.
PointCloud score_cloud(const PointCloud& query, const TraversalSet& traversals,
                       const PersistencyParams& params);

}  // namespace autolabel
