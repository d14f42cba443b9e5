#pragma once

#include <vector>

#include "scaffold/kdtree.hpp"
#include "scaffold/types.hpp"

namespace scaffold {

inline constexpr int kNoise = -1;

struct Cluster {
    int label = 0;
    std::vector<int> point_indices;  ///< ascending, into the clustered cloud
    int size() const { return static_cast<int>(point_indices.size()); }
};

struct DbscanResult {
    std::vector<int> labels;        ///< per point: cluster label or kNoise
    std::vector<Cluster> clusters;  ///< labels 0..k-1 in discovery order
};

/// Euclidean DBSCAN. A point is core when its eps-neighborhood (self
/// included) holds at least min_pts points. Expansion scans points in
/// ascending index order and grows breadth-first through ascending neighbor
/// lists, so labels are deterministic; border points join the first cluster
/// that reaches them. Neighborhoods are radius-inclusive (d <= eps).
DbscanResult dbscan(const PointCloud& cloud, const SpatialIndex& index, double eps, int min_pts);

DbscanResult dbscan(const PointCloud& cloud, double eps, int min_pts);

}  // namespace scaffold
