#include "scaffold/dbscan.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace scaffold {

DbscanResult dbscan(const PointCloud& cloud, const SpatialIndex& index, double eps, int min_pts) {
    if (!(eps > 0.0)) throw std::invalid_argument("dbscan eps must be positive");
    if (min_pts < 1) throw std::invalid_argument("dbscan min_pts must be >= 1");

    const std::int64_t n = static_cast<std::int64_t>(cloud.size());
    std::vector<std::vector<int>> neighbors(n);
#pragma omp parallel for schedule(dynamic, 128)
    for (std::int64_t i = 0; i < n; ++i) neighbors[i] = index.radius(cloud.points[i], eps);

    constexpr int kUnvisited = -2;
    DbscanResult result;
    result.labels.assign(n, kUnvisited);

    std::deque<int> queue;
    for (std::int64_t seed = 0; seed < n; ++seed) {
        if (result.labels[seed] != kUnvisited) continue;
        if (static_cast<int>(neighbors[seed].size()) < min_pts) {
            result.labels[seed] = kNoise;
            continue;
        }
        const int label = static_cast<int>(result.clusters.size());
        Cluster cluster;
        cluster.label = label;

        result.labels[seed] = label;
        queue.clear();
        queue.push_back(static_cast<int>(seed));
        while (!queue.empty()) {
            const int p = queue.front();
            queue.pop_front();
            cluster.point_indices.push_back(p);
            if (static_cast<int>(neighbors[p].size()) < min_pts) continue;  // border point
            for (int q : neighbors[p]) {
                if (result.labels[q] == kUnvisited || result.labels[q] == kNoise) {
                    result.labels[q] = label;
                    queue.push_back(q);
                }
            }
        }
        std::sort(cluster.point_indices.begin(), cluster.point_indices.end());
        result.clusters.push_back(std::move(cluster));
    }
    return result;
}

DbscanResult dbscan(const PointCloud& cloud, double eps, int min_pts) {
    SpatialIndex index(cloud);
    return dbscan(cloud, index, eps, min_pts);
}

}  // namespace scaffold
