#include "scaffold/features.hpp"

#include <Eigen/Dense>
#include <stdexcept>

#include "scaffold/transform.hpp"

namespace scaffold {

namespace {

Point3 canonical_direction(Point3 d) {
    if (d.z < 0.0 || (d.z == 0.0 && (d.y < 0.0 || (d.y == 0.0 && d.x < 0.0)))) return -d;
    return d;
}

}  // namespace

std::vector<ShapeFeatures> shape_features(const PointCloud& cloud, const SpatialIndex& index,
                                          double radius, int min_neighbors) {
    if (!(radius > 0.0)) throw std::invalid_argument("feature radius must be positive");
    if (min_neighbors < 3) throw std::invalid_argument("min_neighbors must be >= 3");

    const std::int64_t n = static_cast<std::int64_t>(cloud.size());
    std::vector<ShapeFeatures> out(n);
#pragma omp parallel for schedule(dynamic, 128)
    for (std::int64_t i = 0; i < n; ++i) {
        ShapeFeatures& f = out[i];
        const std::vector<int> nb = index.radius(cloud.points[i], radius);
        f.neighbor_count = static_cast<int>(nb.size());
        if (f.neighbor_count < min_neighbors) continue;

        Eigen::Vector3d mean = Eigen::Vector3d::Zero();
        for (int j : nb) mean += to_eigen(cloud.points[j]);
        mean /= static_cast<double>(nb.size());
        Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
        for (int j : nb) {
            const Eigen::Vector3d d = to_eigen(cloud.points[j]) - mean;
            cov += d * d.transpose();
        }
        cov /= static_cast<double>(nb.size());

        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
        // ascending from Eigen; store descending and clamp rounding noise
        const Eigen::Vector3d ev = es.eigenvalues().cwiseMax(0.0);
        f.eigenvalues = {ev(2), ev(1), ev(0)};
        if (!(f.eigenvalues[0] > 0.0)) continue;  // all neighbors coincide

        const double l1 = f.eigenvalues[0];
        f.linearity = (f.eigenvalues[0] - f.eigenvalues[1]) / l1;
        f.planarity = (f.eigenvalues[1] - f.eigenvalues[2]) / l1;
        f.sphericity = f.eigenvalues[2] / l1;
        f.principal_direction = canonical_direction(from_eigen(es.eigenvectors().col(2)));
        f.valid = true;
    }
    return out;
}

ShapeClass classify_shape(const ShapeFeatures& f) {
    if (!f.valid) return ShapeClass::Unclassified;
    if (f.linearity >= f.planarity && f.linearity >= f.sphericity) return ShapeClass::Linear;
    if (f.planarity >= f.sphericity) return ShapeClass::Planar;
    return ShapeClass::Spherical;
}

std::vector<ShapeClass> classify_points(const std::vector<ShapeFeatures>& features) {
    std::vector<ShapeClass> out(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) out[i] = classify_shape(features[i]);
    return out;
}

const char* to_string(ShapeClass c) {
    switch (c) {
        case ShapeClass::Linear: return "linear";
        case ShapeClass::Planar: return "planar";
        case ShapeClass::Spherical: return "spherical";
        default: return "unclassified";
    }
}

}  // namespace scaffold
