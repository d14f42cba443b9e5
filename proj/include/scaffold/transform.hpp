#pragma once

#include <Eigen/Core>
#include <vector>

#include "scaffold/types.hpp"

namespace scaffold {

inline Eigen::Vector3d to_eigen(const Point3& p) { return {p.x, p.y, p.z}; }
inline Point3 from_eigen(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

/// Rigid motion p -> R p + t with R a proper rotation (orthonormal, det +1).
struct RigidTransform {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    static RigidTransform identity() { return {}; }

    Point3 apply(const Point3& p) const { return from_eigen(rotation * to_eigen(p) + translation); }

    /// this ∘ other: apply `other` first, then this.
    RigidTransform compose(const RigidTransform& other) const {
        RigidTransform out;
        out.rotation = rotation * other.rotation;
        out.translation = rotation * other.translation + translation;
        return out;
    }

    RigidTransform inverse() const {
        RigidTransform out;
        out.rotation = rotation.transpose();
        out.translation = -(out.rotation * translation);
        return out;
    }

    /// Max deviation of R^T R from identity plus |det(R) - 1|.
    double orthonormality_error() const;

    /// Rotation angle in degrees (axis-angle magnitude).
    double rotation_angle_deg() const;
};

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t);

/// Least-squares rigid transform mapping src[i] onto tgt[i] (SVD of the
/// cross-covariance, reflection corrected). Throws std::invalid_argument for
/// fewer than 3 pairs or mismatched sizes, and std::runtime_error when the
/// source points are collinear or coincident (rotation underdetermined).
RigidTransform estimate_rigid_transform(const std::vector<Point3>& src,
                                        const std::vector<Point3>& tgt);

}  // namespace scaffold
