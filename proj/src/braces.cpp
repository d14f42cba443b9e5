#include "scaffold/braces.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "scaffold/transform.hpp"

namespace scaffold {

inline constexpr double kPi = 3.14159265358979323846;

const char* to_string(Orientation o) {
    switch (o) {
        case Orientation::Vertical: return "vertical";
        case Orientation::HorizontalX: return "horizontal_x";
        case Orientation::HorizontalY: return "horizontal_y";
        default: return "diagonal";
    }
}

double folded_angle_deg(const Point3& d1, const Point3& d2) {
    const double c = std::min(1.0, std::abs(d1.dot(d2)));
    return std::acos(c) * 180.0 / kPi;
}

bool detect_mixed_cluster(const std::vector<Point3>& directions, double mixing_angle_deg) {
    const double cos_thr = std::cos(mixing_angle_deg * kPi / 180.0);
    const std::int64_t n = static_cast<std::int64_t>(directions.size());
    // Mixed iff some pair has |dot| < cos(threshold), i.e. folded angle
    // strictly above the threshold. The flag only ever flips false -> true,
    // so the outcome does not depend on thread interleaving.
    std::atomic<bool> mixed{false};
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
        if (mixed.load(std::memory_order_relaxed)) continue;
        for (std::int64_t j = i + 1; j < n; ++j) {
            if (std::abs(directions[i].dot(directions[j])) < cos_thr) {
                mixed.store(true, std::memory_order_relaxed);
                break;
            }
        }
    }
    return mixed.load();
}

std::vector<Cluster> hybrid_cluster(const PointCloud& cloud, const Cluster& cluster,
                                    const std::vector<ShapeFeatures>& features,
                                    const HybridParams& params) {
    if (!(params.angle_threshold_deg > 0.0))
        throw std::invalid_argument("hybrid angle threshold must be positive");
    const double cos_thr = std::cos(params.angle_threshold_deg * kPi / 180.0);

    struct Group {
        Point3 sum;
        Point3 mean;
        std::vector<int> members;  // indices into cloud
    };
    std::vector<Group> groups;
    for (int idx : cluster.point_indices) {
        const Point3& d = features[idx].principal_direction;
        int best = -1;
        double best_abs = cos_thr;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            const double a = std::abs(d.dot(groups[g].mean));
            if (a >= best_abs) {
                best_abs = a;
                best = static_cast<int>(g);
            }
        }
        if (best >= 0) {
            Group& g = groups[static_cast<std::size_t>(best)];
            g.sum += d.dot(g.mean) < 0.0 ? -d : d;  // fold onto the group's hemisphere
            g.mean = g.sum.normalized();
            g.members.push_back(idx);
        } else {
            groups.push_back({d, d, {idx}});
        }
    }

    // Running means can drift toward each other while points stream in (a
    // junction-skewed seed straightens out once the bulk of a tube joins it),
    // leaving two groups for one physical direction. Merge the closest pair
    // while any two means sit within the admission angle.
    while (groups.size() > 1) {
        std::size_t mi = 0;
        std::size_t mj = 0;
        double best_abs = cos_thr;
        for (std::size_t i = 0; i + 1 < groups.size(); ++i)
            for (std::size_t j = i + 1; j < groups.size(); ++j) {
                const double a = std::abs(groups[i].mean.dot(groups[j].mean));
                if (a > best_abs) {
                    best_abs = a;
                    mi = i;
                    mj = j;
                }
            }
        if (mi == mj) break;
        Group& a = groups[mi];
        Group& b = groups[mj];
        a.sum += a.mean.dot(b.mean) < 0.0 ? -b.sum : b.sum;
        a.mean = a.sum.normalized();
        a.members.insert(a.members.end(), b.members.begin(), b.members.end());
        std::sort(a.members.begin(), a.members.end());
        groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(mj));
    }

    // Stage two: spatial split of each direction group. Density (min_pts)
    // is the only floor here; stray junction clumps that survive it are too
    // short to pass the brace length filter downstream.
    std::vector<Cluster> out;
    for (const Group& g : groups) {
        PointCloud sub;
        sub.points.reserve(g.members.size());
        for (int idx : g.members) sub.points.push_back(cloud.points[idx]);
        const DbscanResult split = dbscan(sub, params.eps, params.min_pts);
        for (const Cluster& c : split.clusters) {
            Cluster mapped;
            mapped.label = static_cast<int>(out.size());
            mapped.point_indices.reserve(c.point_indices.size());
            for (int local : c.point_indices) mapped.point_indices.push_back(g.members[local]);
            std::sort(mapped.point_indices.begin(), mapped.point_indices.end());
            out.push_back(std::move(mapped));
        }
    }
    return out;
}

Orientation classify_orientation(const Point3& direction, const OrientationTolerances& tol) {
    const Point3 z{0.0, 0.0, 1.0};
    const Point3 x{1.0, 0.0, 0.0};
    const Point3 y{0.0, 1.0, 0.0};
    if (folded_angle_deg(direction, z) <= tol.vertical_deg) return Orientation::Vertical;
    if (folded_angle_deg(direction, x) <= tol.horizontal_deg) return Orientation::HorizontalX;
    if (folded_angle_deg(direction, y) <= tol.horizontal_deg) return Orientation::HorizontalY;
    return Orientation::Diagonal;
}

BraceSegment extract_brace(const PointCloud& cloud, const Cluster& cluster,
                           const OrientationTolerances& tol) {
    const std::vector<int>& idx = cluster.point_indices;
    const int n = static_cast<int>(idx.size());
    if (n < 2) throw std::invalid_argument("brace extraction needs at least 2 points");

    int best_i = -1;
    int best_j = -1;
    double best_d2 = -1.0;
    auto consider = [&](int i, int j) {
        const double d2 = squared_distance(cloud.points[idx[i]], cloud.points[idx[j]]);
        if (d2 > best_d2) {
            best_d2 = d2;
            best_i = i;
            best_j = j;
        }
    };

    if (n <= 2000) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) consider(i, j);
    } else {
        // Farthest pair of an elongated cluster lives at the extremes of the
        // principal-axis projection; check a generous band from each end.
        Eigen::Vector3d mean = Eigen::Vector3d::Zero();
        for (int i : idx) mean += to_eigen(cloud.points[i]);
        mean /= static_cast<double>(n);
        Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
        for (int i : idx) {
            const Eigen::Vector3d d = to_eigen(cloud.points[i]) - mean;
            cov += d * d.transpose();
        }
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
        const Eigen::Vector3d axis = es.eigenvectors().col(2);

        std::vector<std::pair<double, int>> proj(n);
        for (int i = 0; i < n; ++i)
            proj[i] = {axis.dot(to_eigen(cloud.points[idx[i]]) - mean), i};
        std::sort(proj.begin(), proj.end());

        constexpr int kBand = 128;
        const int band = std::min(kBand, n);
        for (int a = 0; a < band; ++a)
            for (int b = n - band; b < n; ++b) {
                const int i = std::min(proj[a].second, proj[b].second);
                const int j = std::max(proj[a].second, proj[b].second);
                if (i != j) consider(i, j);
            }
    }

    const Point3& pa = cloud.points[idx[best_i]];
    const Point3& pb = cloud.points[idx[best_j]];
    BraceSegment seg;
    const bool a_first = pa.x < pb.x || (pa.x == pb.x && (pa.y < pb.y ||
                         (pa.y == pb.y && pa.z <= pb.z)));
    seg.endpoint_a = a_first ? pa : pb;
    seg.endpoint_b = a_first ? pb : pa;
    seg.length = std::sqrt(best_d2);
    if (!(seg.length > 0.0))
        throw std::invalid_argument("brace extraction: all cluster points coincide");
    seg.direction = (seg.endpoint_b - seg.endpoint_a) / seg.length;
    seg.orientation = classify_orientation(seg.direction, tol);
    seg.source_cluster = cluster.label;
    return seg;
}

}  // namespace scaffold
