#pragma once

#include <cstdint>
#include <vector>

#include "scaffold/types.hpp"

namespace scaffold {

/// Voxel-grid downsampling: one output point per occupied cell, placed at
/// the centroid of the cell's members. A coordinate exactly on a cell
/// boundary belongs to the higher-index cell (cell key = floor(c / size)).
/// Output cells are ordered by ascending (kx, ky, kz) key; colors, when
/// present, are averaged componentwise and rounded to nearest.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size);

struct OutlierFilterResult {
    PointCloud cloud;                ///< surviving points, input order preserved
    std::vector<int> kept_indices;   ///< ascending indices into the input
    double mean_of_means = 0.0;      ///< mean over per-point mean k-NN distances
    double stddev_of_means = 0.0;    ///< population standard deviation of the same
    double threshold = 0.0;          ///< mean + std_ratio * stddev
};

/// Statistical outlier removal. For each point, the mean distance to its k
/// nearest neighbors (self excluded) is compared against
/// mean + std_ratio * stddev computed over all points; points strictly above
/// are removed. Requires at least k + 1 points.
OutlierFilterResult remove_statistical_outliers(const PointCloud& cloud, int k, double std_ratio);

/// Axis-aligned bounding box of a non-empty cloud.
Aabb bounding_box(const PointCloud& cloud);

}  // namespace scaffold
