#include "scaffold/filters.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "scaffold/kdtree.hpp"

namespace scaffold {

namespace {

struct VoxelKey {
    std::int64_t k[3];
    std::uint32_t idx;
};

inline bool key_less(const VoxelKey& a, const VoxelKey& b) {
    if (a.k[0] != b.k[0]) return a.k[0] < b.k[0];
    if (a.k[1] != b.k[1]) return a.k[1] < b.k[1];
    if (a.k[2] != b.k[2]) return a.k[2] < b.k[2];
    return a.idx < b.idx;
}

inline bool same_cell(const VoxelKey& a, const VoxelKey& b) {
    return a.k[0] == b.k[0] && a.k[1] == b.k[1] && a.k[2] == b.k[2];
}

}  // namespace

PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size) {
    if (!(voxel_size > 0.0)) throw std::invalid_argument("voxel_size must be positive");
    cloud.check_valid();

    const std::int64_t n = static_cast<std::int64_t>(cloud.size());
    std::vector<VoxelKey> keys(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const Point3& p = cloud.points[i];
        keys[i].k[0] = static_cast<std::int64_t>(std::floor(p.x / voxel_size));
        keys[i].k[1] = static_cast<std::int64_t>(std::floor(p.y / voxel_size));
        keys[i].k[2] = static_cast<std::int64_t>(std::floor(p.z / voxel_size));
        keys[i].idx = static_cast<std::uint32_t>(i);
    }
    std::sort(keys.begin(), keys.end(), key_less);

    std::vector<std::int64_t> group_begin;
    for (std::int64_t i = 0; i < n; ++i)
        if (i == 0 || !same_cell(keys[i - 1], keys[i])) group_begin.push_back(i);
    const std::int64_t groups = static_cast<std::int64_t>(group_begin.size());

    PointCloud out;
    out.points.resize(groups);
    if (cloud.has_colors()) out.colors.resize(groups);

#pragma omp parallel for schedule(static)
    for (std::int64_t g = 0; g < groups; ++g) {
        const std::int64_t begin = group_begin[g];
        const std::int64_t end = g + 1 < groups ? group_begin[g + 1] : n;
        Point3 sum;
        std::array<double, 3> csum = {0.0, 0.0, 0.0};
        for (std::int64_t i = begin; i < end; ++i) {
            sum += cloud.points[keys[i].idx];
            if (cloud.has_colors()) {
                const Rgb& c = cloud.colors[keys[i].idx];
                csum[0] += c[0];
                csum[1] += c[1];
                csum[2] += c[2];
            }
        }
        const double m = static_cast<double>(end - begin);
        out.points[g] = sum / m;
        if (cloud.has_colors())
            out.colors[g] = {static_cast<std::uint8_t>(std::llround(csum[0] / m)),
                             static_cast<std::uint8_t>(std::llround(csum[1] / m)),
                             static_cast<std::uint8_t>(std::llround(csum[2] / m))};
    }
    return out;
}

OutlierFilterResult remove_statistical_outliers(const PointCloud& cloud, int k, double std_ratio) {
    if (k < 1) throw std::invalid_argument("outlier filter requires k >= 1");
    if (!(std_ratio > 0.0)) throw std::invalid_argument("std_ratio must be positive");
    cloud.check_valid();
    const std::int64_t n = static_cast<std::int64_t>(cloud.size());
    if (n < static_cast<std::int64_t>(k) + 1)
        throw std::invalid_argument("outlier filter requires at least k + 1 points");

    SpatialIndex index(cloud);
    std::vector<double> mean_dist(n);
#pragma omp parallel for schedule(dynamic, 256)
    for (std::int64_t i = 0; i < n; ++i) {
        // Ask for k + 1 and drop the query point itself; with duplicate
        // coordinates "self" may not be returned, in which case the closest
        // k of the remainder are the neighbors anyway.
        auto nn = index.knn(cloud.points[i], k + 1);
        double sum = 0.0;
        int used = 0;
        for (const auto& nb : nn) {
            if (nb.index == static_cast<int>(i)) continue;
            if (used == k) break;
            sum += nb.distance;
            ++used;
        }
        mean_dist[i] = sum / static_cast<double>(used);
    }

    double mean = 0.0;
    for (std::int64_t i = 0; i < n; ++i) mean += mean_dist[i];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double d = mean_dist[i] - mean;
        var += d * d;
    }
    var /= static_cast<double>(n);
    const double stddev = std::sqrt(var);
    const double threshold = mean + std_ratio * stddev;

    OutlierFilterResult result;
    result.mean_of_means = mean;
    result.stddev_of_means = stddev;
    result.threshold = threshold;
    for (std::int64_t i = 0; i < n; ++i) {
        if (mean_dist[i] <= threshold) {
            result.kept_indices.push_back(static_cast<int>(i));
            result.cloud.points.push_back(cloud.points[i]);
            if (cloud.has_colors()) result.cloud.colors.push_back(cloud.colors[i]);
        }
    }
    return result;
}

Aabb bounding_box(const PointCloud& cloud) {
    if (cloud.empty()) throw std::invalid_argument("bounding box of empty cloud");
    Aabb box{cloud.points[0], cloud.points[0]};
    for (const Point3& p : cloud.points) {
        box.min = {std::min(box.min.x, p.x), std::min(box.min.y, p.y), std::min(box.min.z, p.z)};
        box.max = {std::max(box.max.x, p.x), std::max(box.max.y, p.y), std::max(box.max.z, p.z)};
    }
    return box;
}

}  // namespace scaffold
