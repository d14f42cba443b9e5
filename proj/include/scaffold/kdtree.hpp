#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "scaffold/types.hpp"

namespace scaffold {

struct Neighbor {
    int index = -1;      ///< index into the cloud the tree was built from
    double distance = std::numeric_limits<double>::infinity();
};

/// Exact KD-tree over a point set. Query results are identical to a brute
/// force scan: ties in distance are broken by the lower point index, radius
/// queries are inclusive (d <= r) and returned sorted by index. Queries are
/// const and safe to run from multiple threads.
class SpatialIndex {
public:
    SpatialIndex() = default;
    explicit SpatialIndex(const std::vector<Point3>& points) { build(points); }
    explicit SpatialIndex(const PointCloud& cloud) { build(cloud.points); }

    void build(const std::vector<Point3>& points);

    std::size_t size() const { return pts_.size(); }
    bool empty() const { return pts_.empty(); }

    /// Single nearest neighbor. Throws std::runtime_error on an empty index.
    Neighbor nearest(const Point3& query) const;

    /// The k nearest neighbors ordered by (distance, index). Returns fewer
    /// than k entries when the index holds fewer points.
    std::vector<Neighbor> knn(const Point3& query, int k) const;

    /// All indices with distance(query, p) <= radius, ascending by index.
    std::vector<int> radius(const Point3& query, double r) const;

    /// The stored point for an original cloud index.
    const Point3& point(int original_index) const { return pts_[slot_of_[original_index]]; }

private:
    struct Node {
        // leaf when axis < 0: [begin, end) into pts_/idx_
        int axis = -1;
        double split = 0.0;
        int left = -1;
        int right = -1;
        int begin = 0;
        int end = 0;
    };

    void nearest_recursive(int node, const Point3& q, Neighbor& best) const;
    void knn_recursive(int node, const Point3& q, int k, std::vector<Neighbor>& heap) const;
    void radius_recursive(int node, const Point3& q, double r2, std::vector<int>& out) const;

    static constexpr int kLeafSize = 16;

    std::vector<Point3> pts_;   // reordered copies
    std::vector<int> idx_;      // original index per slot
    std::vector<int> slot_of_;  // inverse permutation of idx_
    std::vector<Node> nodes_;
    int root_ = -1;
};

/// Build an index over a cloud; throws std::invalid_argument when empty.
inline SpatialIndex build_index(const PointCloud& cloud) {
    if (cloud.empty()) throw std::invalid_argument("cannot index an empty cloud");
    return SpatialIndex(cloud);
}

}  // namespace scaffold
