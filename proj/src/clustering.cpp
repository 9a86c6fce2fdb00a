#include "autolabel/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "autolabel/voxel_grid.hpp"

namespace autolabel {

void ClusterParams::validate() const {
    if (!(radius > 0.0)) throw ConfigError("cluster radius must be positive");
    if (!(score_eps > 0.0) || score_eps > 1.0) throw ConfigError("score_eps must be in (0, 1]");
    if (min_pts < 1) throw ConfigError("min_pts must be >= 1");
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw ConfigError("alpha must be in (0, 1)");
    if (!(top_k_percent > 0.0) || !(top_k_percent < 100.0))
        throw ConfigError("top_k_percent must be in (0, 100)");
}

static ClusterGraph build_graph_impl(const PointCloud& cloud, double radius, bool parallel) {
    if (!cloud.has_scores()) throw ValidationError("build_graph requires a scored cloud");
    if (!(radius > 0.0)) throw ConfigError("graph radius must be positive");
    cloud.validate();

    const int64_t n = int64_t(cloud.size());
    VoxelGridIndex index(std::span<const Point3>(cloud.points), radius);

    std::vector<std::vector<int>> adj(static_cast<size_t>(n));
#pragma omp parallel for schedule(dynamic, 256) if (parallel)
    for (int64_t i = 0; i < n; ++i) {
        std::vector<int>& nbrs = adj[i];
        index.for_each_in_radius(cloud.points[i], radius, [&](int j, double) {
            if (j != i) nbrs.push_back(j);
        });
        std::sort(nbrs.begin(), nbrs.end());
    }

    ClusterGraph g;
    g.num_nodes = int(n);
    g.offsets.resize(size_t(n) + 1, 0);
    for (int64_t i = 0; i < n; ++i) g.offsets[i + 1] = g.offsets[i] + int(adj[i].size());
    g.neighbors.resize(size_t(g.offsets[n]));
    g.weights.resize(size_t(g.offsets[n]));
#pragma omp parallel for if (parallel)
    for (int64_t i = 0; i < n; ++i) {
        int at = g.offsets[i];
        for (int j : adj[i]) {
            g.neighbors[at] = j;
            g.weights[at] = std::abs(cloud.scores[i] - cloud.scores[j]);
            ++at;
        }
    }
    return g;
}

ClusterGraph build_graph(const PointCloud& cloud, double radius) {
    return build_graph_impl(cloud, radius, true);
}

ClusterGraph build_graph_serial(const PointCloud& cloud, double radius) {
    return build_graph_impl(cloud, radius, false);
}

std::vector<int> graph_dbscan(const ClusterGraph& graph, double score_eps, int min_pts) {
    const int n = graph.num_nodes;
    // admissible degree per node
    std::vector<int> degree(size_t(n), 0);
    for (int u = 0; u < n; ++u)
        for (int e = graph.offsets[u]; e < graph.offsets[u + 1]; ++e)
            if (graph.weights[e] <= score_eps) ++degree[u];

    constexpr int kUnvisited = -2;
    std::vector<int> labels(size_t(n), kUnvisited);
    auto is_core = [&](int u) { return degree[u] >= min_pts; };

    int cluster = 0;
    std::queue<int> frontier;
    for (int seed = 0; seed < n; ++seed) {
        if (labels[seed] != kUnvisited) continue;
        if (!is_core(seed)) {
            labels[seed] = kNoise;
            continue;
        }
        labels[seed] = cluster;
        frontier.push(seed);
        while (!frontier.empty()) {
            const int u = frontier.front();
            frontier.pop();
            for (int e = graph.offsets[u]; e < graph.offsets[u + 1]; ++e) {
                if (graph.weights[e] > score_eps) continue;
                const int v = graph.neighbors[e];
                if (labels[v] != kUnvisited && labels[v] != kNoise) continue;
                labels[v] = cluster;
                if (is_core(v)) frontier.push(v);
            }
        }
        ++cluster;
    }
    return labels;
}

std::vector<std::vector<int>> clusters_from_labels(std::span<const int> labels) {
    int max_label = -1;
    for (int l : labels) max_label = std::max(max_label, l);
    std::vector<std::vector<int>> clusters(size_t(max_label + 1));
    for (int i = 0; i < int(labels.size()); ++i)
        if (labels[i] >= 0) clusters[labels[i]].push_back(i);
    return clusters;
}

std::vector<std::vector<int>> filter_static(const std::vector<std::vector<int>>& clusters,
                                            std::span<const double> tau, double alpha,
                                            double top_k_percent) {
    std::vector<std::vector<int>> kept;
    kept.reserve(clusters.size());
    std::vector<double> scores;
    for (const std::vector<int>& cluster : clusters) {
        if (cluster.empty()) throw ValidationError("filter_static: empty cluster");
        scores.clear();
        for (int idx : cluster) scores.push_back(tau[idx]);
        std::sort(scores.begin(), scores.end(), std::greater<>());
        const size_t n = scores.size();
        size_t k = size_t(std::ceil(top_k_percent * double(n) / 100.0));
        k = std::clamp<size_t>(k, 1, n);
        const double top_k_min = scores[k - 1];
        if (!(top_k_min > alpha)) kept.push_back(cluster);
    }
    return kept;
}

std::vector<std::vector<int>> foreground_clusters(const PointCloud& scored,
                                                  const ClusterParams& params) {
    params.validate();
    ClusterGraph g = build_graph(scored, params.radius);
    std::vector<int> labels = graph_dbscan(g, params.score_eps, params.min_pts);
    std::vector<std::vector<int>> clusters = clusters_from_labels(labels);
    return filter_static(clusters, scored.scores, params.alpha, params.top_k_percent);
}

}  // namespace autolabel
