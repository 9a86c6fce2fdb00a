#pragma once

#include <span>
#include <vector>

#include "autolabel/geometry.hpp"

namespace autolabel {

// Undirected proximity graph in CSR form. Each edge carries the absolute
// persistency-score difference of its endpoints.
struct ClusterGraph {
    int num_nodes = 0;
    std::vector<int> offsets;     // size num_nodes + 1
    std::vector<int> neighbors;   // ascending within each node's range
    std::vector<double> weights;  // |tau(u) - tau(v)|, parallel to neighbors

    size_t num_edges() const { return neighbors.size() / 2; }
};

struct ClusterParams {
    double radius = 0.5;        // r_t: edge when Euclidean distance <= radius
    double score_eps = 0.1;     // max edge weight that still connects
    int min_pts = 5;            // neighbors needed for a core node
    double alpha = 0.7;         // static score threshold
    double top_k_percent = 20;  // K

    void validate() const;
};

constexpr int kNoise = -1;

ClusterGraph build_graph(const PointCloud& cloud, double radius);
ClusterGraph build_graph_serial(const PointCloud& cloud, double radius);

// DBSCAN over the graph with connectivity restricted to edges whose weight is
// <= score_eps. A node is core when it has at least min_pts admissible
// neighbors. Border nodes join the first cluster that reaches them under
// ascending node-index seeding; unreachable nodes stay kNoise.
std::vector<int> graph_dbscan(const ClusterGraph& graph, double score_eps, int min_pts);

std::vector<std::vector<int>> clusters_from_labels(std::span<const int> labels);

// Drops static clusters: a cluster is static when the smallest of its top-K%
// scores (nearest-rank on descending tau) exceeds alpha. Returns the
// surviving clusters in input order.
std::vector<std::vector<int>> filter_static(const std::vector<std::vector<int>>& clusters,
                                            std::span<const double> tau, double alpha,
                                            double top_k_percent);

// build_graph + graph_dbscan + filter_static for a scored cloud.
std::vector<std::vector<int>> foreground_clusters(const PointCloud& scored,
                                                  const ClusterParams& params);

}  // namespace autolabel
