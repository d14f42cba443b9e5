#pragma once

#include <limits>
#include <vector>

#include "scaffold/kdtree.hpp"
#include "scaffold/transform.hpp"
#include "scaffold/types.hpp"

namespace scaffold {

inline constexpr double kUnboundedDistance = std::numeric_limits<double>::infinity();

struct IcpParams {
    int max_iterations = 50;
    double convergence_delta = 1e-6;  ///< relative change of MSE between iterations
    /// Pairs farther apart than this are dropped from the fit; infinity
    /// keeps every pair.
    double max_correspondence_distance = 1.0;
    RigidTransform initial;  ///< starting guess, identity by default
    /// Opt-in fallback: additionally shift so the centroid of the initial-
    /// transformed current cloud lands on the reference centroid.
    bool centroid_init = false;
};

struct IcpResult {
    RigidTransform transform;          ///< maps current onto reference
    double mse = 0.0;                  ///< final mean squared correspondence error
    int iterations = 0;
    bool converged = false;
    int correspondence_count = 0;      ///< pairs used in the final iteration
    std::vector<double> error_history; ///< MSE after each update, non-increasing
};

struct AlignmentError {
    double mse = 0.0;
    int correspondence_count = 0;
};

/// Mean squared nearest-neighbor distance of `current` under `t` against the
/// reference, skipping pairs beyond max_correspondence_distance. The same
/// index-order summation backs the ICP error history, so both agree to
/// floating-point rounding. Throws std::runtime_error when no pair survives.
AlignmentError alignment_error(const PointCloud& reference, const PointCloud& current,
                               const RigidTransform& t,
                               double max_correspondence_distance = kUnboundedDistance);

AlignmentError alignment_error(const SpatialIndex& reference_index, const PointCloud& current,
                               const RigidTransform& t,
                               double max_correspondence_distance = kUnboundedDistance);

/// Point-to-point ICP aligning `current` onto `reference`.
IcpResult icp(const PointCloud& reference, const SpatialIndex& reference_index,
              const PointCloud& current, const IcpParams& params = {});

/// Convenience overload that builds the reference index internally.
IcpResult icp(const PointCloud& reference, const PointCloud& current,
              const IcpParams& params = {});

}  // namespace scaffold
