#include "scaffold/transform.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace scaffold {

inline constexpr double kPi = 3.14159265358979323846;

double RigidTransform::orthonormality_error() const {
    const Eigen::Matrix3d gram = rotation.transpose() * rotation;
    double err = (gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    return err + std::abs(rotation.determinant() - 1.0);
}

double RigidTransform::rotation_angle_deg() const {
    const double c = std::clamp((rotation.trace() - 1.0) * 0.5, -1.0, 1.0);
    return std::acos(c) * 180.0 / kPi;
}

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t) {
    PointCloud out;
    out.points.resize(cloud.size());
    out.colors = cloud.colors;
    const std::int64_t n = static_cast<std::int64_t>(cloud.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) out.points[i] = t.apply(cloud.points[i]);
    return out;
}

RigidTransform estimate_rigid_transform(const std::vector<Point3>& src,
                                        const std::vector<Point3>& tgt) {
    if (src.size() != tgt.size())
        throw std::invalid_argument("transform estimation needs equally sized point lists");
    if (src.size() < 3)
        throw std::invalid_argument("transform estimation needs at least 3 point pairs");

    const double n = static_cast<double>(src.size());
    Eigen::Vector3d cs = Eigen::Vector3d::Zero();
    Eigen::Vector3d ct = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < src.size(); ++i) {
        cs += to_eigen(src[i]);
        ct += to_eigen(tgt[i]);
    }
    cs /= n;
    ct /= n;

    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < src.size(); ++i)
        h += (to_eigen(src[i]) - cs) * (to_eigen(tgt[i]) - ct).transpose();

    Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Vector3d sv = svd.singularValues();
    // Rotation about the source's long axis is unconstrained when the
    // second singular value vanishes (collinear or coincident sources).
    if (!(sv(1) > 1e-12 * std::max(sv(0), 1e-300)))
        throw std::runtime_error("degenerate correspondence geometry (collinear or coincident)");

    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) d(2, 2) = -1.0;

    RigidTransform t;
    t.rotation = svd.matrixV() * d * svd.matrixU().transpose();
    t.translation = ct - t.rotation * cs;
    return t;
}

}  // namespace scaffold
