#pragma once

#include <vector>

#include "scaffold/dbscan.hpp"
#include "scaffold/features.hpp"
#include "scaffold/types.hpp"

namespace scaffold {

enum class Orientation : std::uint8_t { Vertical, HorizontalX, HorizontalY, Diagonal };

const char* to_string(Orientation o);

/// Line-axis angles ignore sign: the angle between directions d1, d2 is
/// acos(|d1 . d2|), in [0, 90] degrees.
double folded_angle_deg(const Point3& d1, const Point3& d2);

/// True when any pair of principal directions disagrees by more than
/// mixing_angle_deg. Directions must be unit length.
bool detect_mixed_cluster(const std::vector<Point3>& directions, double mixing_angle_deg);

struct HybridParams {
    double angle_threshold_deg = 30.0;  ///< direction-group admission angle
    double eps = 0.06;                  ///< spatial DBSCAN radius within a group
    int min_pts = 6;
};

/// Split a mixed cluster in two stages: greedy grouping by principal
/// direction (points in ascending index order join the best-matching group
/// whose running mean direction is within the angle threshold, else found a
/// new group; groups whose means drift to within the threshold of each other
/// are merged afterwards), then spatial DBSCAN within each group. Returned
/// sub-clusters are relabeled 0..k-1; indices refer to `cloud`.
std::vector<Cluster> hybrid_cluster(const PointCloud& cloud, const Cluster& cluster,
                                    const std::vector<ShapeFeatures>& features,
                                    const HybridParams& params);

struct BraceSegment {
    Point3 endpoint_a;  ///< lexicographically smaller endpoint (x, y, z)
    Point3 endpoint_b;
    Point3 direction;   ///< unit vector from a to b
    double length = 0.0;
    Orientation orientation = Orientation::Diagonal;
    int source_cluster = -1;
};

struct OrientationTolerances {
    double vertical_deg = 15.0;    ///< max angle from the z axis
    double horizontal_deg = 15.0;  ///< max angle from the x or y axis
};

Orientation classify_orientation(const Point3& direction, const OrientationTolerances& tol = {});

/// Model a cluster as the segment between its two farthest-apart member
/// points. Exhaustive for clusters up to 2000 points; larger clusters check
/// pairs drawn from the extremes of the principal-axis projection, which
/// matches the exhaustive result for elongated clusters. Distance ties keep
/// the lexicographically smallest index pair.
BraceSegment extract_brace(const PointCloud& cloud, const Cluster& cluster,
                           const OrientationTolerances& tol = {});

}  // namespace scaffold
