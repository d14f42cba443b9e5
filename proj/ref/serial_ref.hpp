#pragma once

// Exhaustive / serial reference implementations used only by tests and
// benchmarks. Apart from reusing the Point3/PointCloud containers these
// share no code with the library kernels: every scan here is a plain loop
// with its own arithmetic, so agreement is meaningful.

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "scaffold/types.hpp"

namespace scaffref {

/// Index of the nearest point by (squared distance, index) order; -1 when
/// empty.
int nearest_brute(const std::vector<scaffold::Point3>& points, const scaffold::Point3& query);

/// The k nearest (distance, index) pairs, same order as the tree's knn.
std::vector<std::pair<double, int>> knn_brute(const std::vector<scaffold::Point3>& points,
                                              const scaffold::Point3& query, int k);

/// Indices with distance <= r, ascending.
std::vector<int> radius_brute(const std::vector<scaffold::Point3>& points,
                              const scaffold::Point3& query, double r);

/// Number of distinct occupied voxel cells at the given size.
std::size_t voxel_cell_count(const std::vector<scaffold::Point3>& points, double voxel_size);

/// Voxel-grid downsampling via an ordered cell map; matches the library
/// filter bit for bit (same key math, same ascending-summation order).
scaffold::PointCloud voxel_serial(const scaffold::PointCloud& cloud, double voxel_size);

/// Per-point mean distance to the k nearest other points.
std::vector<double> mean_knn_distance_serial(const std::vector<scaffold::Point3>& points, int k);

/// Indices kept by the statistical outlier rule (mean-kNN <= mean + ratio * stddev).
std::vector<int> outlier_keep_serial(const std::vector<scaffold::Point3>& points, int k,
                                     double std_ratio);

/// Per-current-point nearest-reference distances by exhaustive scan.
std::vector<double> cloud_distances_serial(const std::vector<scaffold::Point3>& current,
                                           const std::vector<scaffold::Point3>& reference);

/// Inlier count of the plane n . p + d = 0 at the given tolerance.
int count_plane_inliers(const std::vector<scaffold::Point3>& points, const scaffold::Point3& n,
                        double d, double tolerance);

/// Mean squared nearest-neighbor distance of `current` under the row-major
/// rotation R and translation t, pairs beyond max_distance skipped. Returns
/// {mse, surviving pair count}; count 0 yields mse 0.
std::pair<double, int> alignment_error_brute(const std::vector<scaffold::Point3>& reference,
                                             const std::vector<scaffold::Point3>& current,
                                             const std::array<double, 9>& rotation,
                                             const std::array<double, 3>& translation,
                                             double max_distance);

/// The index pair (i < j) realizing the maximum pairwise distance, ties kept
/// at the earliest (i, j).
std::pair<int, int> farthest_pair_brute(const std::vector<scaffold::Point3>& points,
                                        const std::vector<int>& subset);

/// Eigenvalues of a symmetric 3x3 matrix {xx, xy, xz, yy, yz, zz} in
/// descending order, by the trigonometric closed form (no linear algebra
/// library involved).
std::array<double, 3> sym3_eigenvalues(const std::array<double, 6>& m);

/// Best node matching between two small point sets: maximize the number of
/// pairs within tolerance, then minimize total displacement, by exhaustive
/// permutation (feasible for <= ~9 nodes). Returns pairs of indices.
std::vector<std::pair<int, int>> assignment_brute(const std::vector<scaffold::Point3>& reference,
                                                  const std::vector<scaffold::Point3>& current,
                                                  double tolerance);

}  // namespace scaffref
