#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "scaffold/types.hpp"

namespace scaffold {

/// Plane n . p + d = 0 with |n| = 1, oriented canonically (n.z > 0, ties
/// broken by n.y then n.x).
struct PlaneModel {
    Point3 normal;
    double offset = 0.0;
    std::vector<int> inlier_indices;  ///< ascending, into the fitted cloud

    double signed_distance(const Point3& p) const { return normal.dot(p) + offset; }
    int inlier_count() const { return static_cast<int>(inlier_indices.size()); }
};

struct RansacParams {
    double inlier_distance = 0.03;
    int max_iterations = 1000;
    double min_inlier_fraction = 0.10;
    std::uint64_t seed = 0;
};

/// Raised when no plane clears min_inlier_fraction (or all samples are
/// degenerate). remove_planes treats this as "stop", not failure.
struct PlaneNotFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// RANSAC plane fit: best-of-max_iterations 3-point hypotheses by inlier
/// count (|signed distance| <= inlier_distance), ties keeping the earliest
/// iteration, followed by a least-squares refit on the winning inliers and a
/// final inlier recount against the refit plane.
PlaneModel ransac_plane(const PointCloud& cloud, const RansacParams& params);

struct RemovePlanesResult {
    PointCloud remaining;
    std::vector<int> remaining_indices;  ///< ascending, into the original cloud
    std::vector<PlaneModel> planes;      ///< inlier_indices remapped to the original cloud
    bool stopped_early = false;
};

/// Remove up to `count` dominant planes one after another. A round that
/// finds no plane stops the loop without error.
RemovePlanesResult remove_planes(const PointCloud& cloud, int count, const RansacParams& params);

/// Keep points whose signed distance to the plane lies in [0, max_distance],
/// after flipping the plane so the cloud centroid is on the non-negative
/// side.
PointCloud crop_by_plane_offset(const PointCloud& cloud, const PlaneModel& plane,
                                double max_distance);

/// Index of the plane whose normal is within tol_deg of vertical with the
/// most inliers, or -1.
int find_ground_plane(const std::vector<PlaneModel>& planes, double tol_deg = 15.0);

/// Index of the near-vertical plane (normal within tol_deg of horizontal)
/// with the most inliers, excluding `ground_index`, or -1.
int find_wall_plane(const std::vector<PlaneModel>& planes, int ground_index,
                    double tol_deg = 15.0);

}  // namespace scaffold
