#include "scaffold/plane.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "scaffold/transform.hpp"

namespace scaffold {

inline constexpr double kPi = 3.14159265358979323846;

namespace {

Point3 canonical_normal(Point3 n) {
    if (n.z < 0.0 || (n.z == 0.0 && (n.y < 0.0 || (n.y == 0.0 && n.x < 0.0)))) return -n;
    return n;
}

int count_inliers(const PointCloud& cloud, const Point3& normal, double offset, double tol) {
    const std::int64_t n = static_cast<std::int64_t>(cloud.size());
    std::int64_t count = 0;
#pragma omp parallel for schedule(static) reduction(+ : count)
    for (std::int64_t i = 0; i < n; ++i)
        if (std::abs(normal.dot(cloud.points[i]) + offset) <= tol) ++count;
    return static_cast<int>(count);
}

}  // namespace

PlaneModel ransac_plane(const PointCloud& cloud, const RansacParams& params) {
    const std::size_t n = cloud.size();
    if (n < 3) throw std::invalid_argument("plane fit requires at least 3 points");
    if (!(params.inlier_distance > 0.0))
        throw std::invalid_argument("inlier_distance must be positive");
    if (params.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    if (!(params.min_inlier_fraction > 0.0) || params.min_inlier_fraction > 1.0)
        throw std::invalid_argument("min_inlier_fraction must be in (0, 1]");

    std::mt19937_64 rng(params.seed);
    auto draw = [&]() { return static_cast<std::size_t>(rng() % n); };

    int best_count = -1;
    Point3 best_normal;
    double best_offset = 0.0;

    for (int it = 0; it < params.max_iterations; ++it) {
        const std::size_t a = draw();
        std::size_t b = draw();
        while (b == a) b = draw();
        std::size_t c = draw();
        while (c == a || c == b) c = draw();

        const Point3& pa = cloud.points[a];
        const Point3 v1 = cloud.points[b] - pa;
        const Point3 v2 = cloud.points[c] - pa;
        const Point3 nrm = v1.cross(v2);
        const double len = nrm.norm();
        if (len <= 1e-12 * std::max(1.0, v1.norm() * v2.norm())) continue;  // collinear sample

        const Point3 unit = nrm / len;
        const double offset = -unit.dot(pa);
        const int count = count_inliers(cloud, unit, offset, params.inlier_distance);
        if (count > best_count) {
            best_count = count;
            best_normal = unit;
            best_offset = offset;
        }
    }
    if (best_count < 3) throw PlaneNotFound("no plane hypothesis found");

    // Least-squares refit on the winning hypothesis' inliers: plane through
    // their centroid, normal = eigenvector of the smallest covariance
    // eigenvalue.
    std::vector<int> inliers;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(best_normal.dot(cloud.points[i]) + best_offset) <= params.inlier_distance)
            inliers.push_back(static_cast<int>(i));

    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (int i : inliers) centroid += to_eigen(cloud.points[i]);
    centroid /= static_cast<double>(inliers.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int i : inliers) {
        const Eigen::Vector3d d = to_eigen(cloud.points[i]) - centroid;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    const Eigen::Vector3d en = es.eigenvectors().col(0);  // ascending eigenvalues

    PlaneModel plane;
    plane.normal = canonical_normal(from_eigen(en).normalized());
    plane.offset = -plane.normal.dot(from_eigen(centroid));

    plane.inlier_indices.clear();
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(plane.signed_distance(cloud.points[i])) <= params.inlier_distance)
            plane.inlier_indices.push_back(static_cast<int>(i));

    const double fraction = static_cast<double>(plane.inlier_count()) / static_cast<double>(n);
    if (fraction < params.min_inlier_fraction)
        throw PlaneNotFound("best plane inlier fraction " + std::to_string(fraction) +
                            " below minimum " + std::to_string(params.min_inlier_fraction));
    return plane;
}

RemovePlanesResult remove_planes(const PointCloud& cloud, int count, const RansacParams& params) {
    if (count < 1) throw std::invalid_argument("plane count must be >= 1");
    RemovePlanesResult result;
    result.remaining = cloud;
    result.remaining_indices.resize(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) result.remaining_indices[i] = static_cast<int>(i);

    for (int round = 0; round < count; ++round) {
        PlaneModel plane;
        try {
            plane = ransac_plane(result.remaining, params);
        } catch (const PlaneNotFound&) {
            result.stopped_early = true;
            break;
        }

        std::vector<char> is_inlier(result.remaining.size(), 0);
        for (int i : plane.inlier_indices) is_inlier[i] = 1;

        // Report inliers in original-cloud indices.
        for (int& i : plane.inlier_indices) i = result.remaining_indices[i];
        result.planes.push_back(std::move(plane));

        PointCloud next;
        std::vector<int> next_indices;
        for (std::size_t i = 0; i < result.remaining.size(); ++i) {
            if (is_inlier[i]) continue;
            next.points.push_back(result.remaining.points[i]);
            if (result.remaining.has_colors()) next.colors.push_back(result.remaining.colors[i]);
            next_indices.push_back(result.remaining_indices[i]);
        }
        result.remaining = std::move(next);
        result.remaining_indices = std::move(next_indices);
    }
    return result;
}

PointCloud crop_by_plane_offset(const PointCloud& cloud, const PlaneModel& plane,
                                double max_distance) {
    if (!(max_distance > 0.0)) throw std::invalid_argument("max_distance must be positive");
    if (cloud.empty()) return cloud;

    Point3 centroid;
    for (const Point3& p : cloud.points) centroid += p;
    centroid = centroid / static_cast<double>(cloud.size());

    Point3 normal = plane.normal;
    double offset = plane.offset;
    if (normal.dot(centroid) + offset < 0.0) {
        normal = -normal;
        offset = -offset;
    }

    PointCloud out;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double d = normal.dot(cloud.points[i]) + offset;
        if (d >= 0.0 && d <= max_distance) {
            out.points.push_back(cloud.points[i]);
            if (cloud.has_colors()) out.colors.push_back(cloud.colors[i]);
        }
    }
    return out;
}

int find_ground_plane(const std::vector<PlaneModel>& planes, double tol_deg) {
    const double cos_tol = std::cos(tol_deg * kPi / 180.0);
    int best = -1;
    for (std::size_t i = 0; i < planes.size(); ++i) {
        if (std::abs(planes[i].normal.z) < cos_tol) continue;
        if (best < 0 || planes[i].inlier_count() > planes[best].inlier_count())
            best = static_cast<int>(i);
    }
    return best;
}

int find_wall_plane(const std::vector<PlaneModel>& planes, int ground_index, double tol_deg) {
    const double sin_tol = std::sin(tol_deg * kPi / 180.0);
    int best = -1;
    for (std::size_t i = 0; i < planes.size(); ++i) {
        if (static_cast<int>(i) == ground_index) continue;
        if (std::abs(planes[i].normal.z) > sin_tol) continue;
        if (best < 0 || planes[i].inlier_count() > planes[best].inlier_count())
            best = static_cast<int>(i);
    }
    return best;
}

}  // namespace scaffold
