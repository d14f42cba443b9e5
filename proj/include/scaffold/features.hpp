#pragma once

#include <array>
#include <vector>

#include "scaffold/kdtree.hpp"
#include "scaffold/types.hpp"

namespace scaffold {

/// Eigenvalue shape descriptors of a point's radius neighborhood. With
/// eigenvalues l1 >= l2 >= l3 >= 0 of the neighborhood covariance:
///   linearity  = (l1 - l2) / l1
///   planarity  = (l2 - l3) / l1
///   sphericity = l3 / l1
/// which always sum to 1 for valid features.
struct ShapeFeatures {
    std::array<double, 3> eigenvalues = {0.0, 0.0, 0.0};  ///< descending
    double linearity = 0.0;
    double planarity = 0.0;
    double sphericity = 0.0;
    Point3 principal_direction;  ///< unit eigenvector of l1, canonical sign
    int neighbor_count = 0;
    bool valid = false;  ///< enough neighbors and l1 > 0
};

/// Features for every point from its radius neighborhood (self included).
/// Points with fewer than min_neighbors neighbors, or a degenerate
/// neighborhood (all coincident), yield valid == false.
std::vector<ShapeFeatures> shape_features(const PointCloud& cloud, const SpatialIndex& index,
                                          double radius, int min_neighbors);

enum class ShapeClass : std::uint8_t { Linear, Planar, Spherical, Unclassified };

/// Largest of the three descriptors wins; exact ties prefer Linear, then
/// Planar. Invalid features map to Unclassified.
ShapeClass classify_shape(const ShapeFeatures& f);

std::vector<ShapeClass> classify_points(const std::vector<ShapeFeatures>& features);

const char* to_string(ShapeClass c);

}  // namespace scaffold
