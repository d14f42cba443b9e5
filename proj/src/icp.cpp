#include "scaffold/icp.hpp"

#include <cmath>
#include <stdexcept>

namespace scaffold {

namespace {

struct Correspondences {
    std::vector<Point3> src;  ///< transformed current points with a partner
    std::vector<Point3> tgt;  ///< matching reference points
    double mse = 0.0;
    int count = 0;
};

/// One nearest-neighbor pass. Lookups run in parallel into per-point slots;
/// the squared-error sum is then reduced serially in index order so the
/// result is independent of the thread count.
Correspondences correspond(const PointCloud& current, const SpatialIndex& ref_index,
                           const RigidTransform& t, double max_dist) {
    const std::int64_t n = static_cast<std::int64_t>(current.size());
    std::vector<Point3> moved(n);
    std::vector<int> partner(n);
    std::vector<double> d2(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        moved[i] = t.apply(current.points[i]);
        const Neighbor nb = ref_index.nearest(moved[i]);
        partner[i] = nb.distance <= max_dist ? nb.index : -1;
        d2[i] = nb.distance * nb.distance;
    }
    Correspondences c;
    c.src.reserve(n);
    c.tgt.reserve(n);
    double sum = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        if (partner[i] < 0) continue;
        c.src.push_back(moved[i]);
        c.tgt.push_back(ref_index.point(partner[i]));
        sum += d2[i];
        ++c.count;
    }
    c.mse = c.count > 0 ? sum / static_cast<double>(c.count) : 0.0;
    return c;
}

}  // namespace

AlignmentError alignment_error(const SpatialIndex& reference_index, const PointCloud& current,
                               const RigidTransform& t, double max_correspondence_distance) {
    if (reference_index.empty() || current.empty())
        throw std::invalid_argument("alignment error requires non-empty clouds");
    const Correspondences c = correspond(current, reference_index, t,
                                         max_correspondence_distance);
    if (c.count == 0)
        throw std::runtime_error("alignment error: no correspondences within the rejection "
                                 "distance");
    return {c.mse, c.count};
}

AlignmentError alignment_error(const PointCloud& reference, const PointCloud& current,
                               const RigidTransform& t, double max_correspondence_distance) {
    SpatialIndex index(reference);
    return alignment_error(index, current, t, max_correspondence_distance);
}

IcpResult icp(const PointCloud& reference, const SpatialIndex& reference_index,
              const PointCloud& current, const IcpParams& params) {
    if (reference.size() < 3 || current.size() < 3)
        throw std::invalid_argument("icp requires clouds of at least 3 points");
    if (params.max_iterations < 1) throw std::invalid_argument("icp needs max_iterations >= 1");
    if (!(params.convergence_delta >= 0.0))
        throw std::invalid_argument("icp needs a non-negative convergence_delta");
    if (!(params.max_correspondence_distance > 0.0))
        throw std::invalid_argument("icp needs a positive max_correspondence_distance");

    RigidTransform t = params.initial;
    if (params.centroid_init) {
        Eigen::Vector3d cr = Eigen::Vector3d::Zero();
        Eigen::Vector3d cc = Eigen::Vector3d::Zero();
        for (const Point3& p : reference.points) cr += to_eigen(p);
        for (const Point3& p : current.points) cc += to_eigen(t.apply(p));
        t.translation += cr / static_cast<double>(reference.size()) -
                         cc / static_cast<double>(current.size());
    }

    IcpResult result;
    Correspondences corr =
        correspond(current, reference_index, t, params.max_correspondence_distance);
    double prev = corr.mse;

    for (int k = 0; k < params.max_iterations; ++k) {
        if (corr.count < 3)
            throw std::runtime_error("icp iteration " + std::to_string(k) + ": only " +
                                     std::to_string(corr.count) +
                                     " correspondences within the rejection distance");
        RigidTransform updated = estimate_rigid_transform(corr.src, corr.tgt).compose(t);
        Correspondences next =
            correspond(current, reference_index, updated, params.max_correspondence_distance);
        if (next.mse > prev) {
            // A refit that does not improve the error (only happens at the
            // rounding floor, or when the survivor set shifts under a finite
            // rejection distance) is discarded so the recorded history stays
            // non-increasing and the returned transform is the best seen.
            result.converged = true;
            break;
        }
        t = updated;
        corr = next;
        result.error_history.push_back(corr.mse);
        result.iterations = k + 1;
        if (std::abs(corr.mse - prev) / std::max(prev, 1e-12) < params.convergence_delta) {
            result.converged = true;
            break;
        }
        prev = corr.mse;
    }

    result.transform = t;
    result.mse = corr.mse;
    result.correspondence_count = corr.count;
    return result;
}

IcpResult icp(const PointCloud& reference, const PointCloud& current, const IcpParams& params) {
    SpatialIndex index(reference);
    return icp(reference, index, current, params);
}

}  // namespace scaffold
