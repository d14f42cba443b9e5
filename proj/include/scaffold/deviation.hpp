#pragma once

#include <string>
#include <vector>

#include "scaffold/kdtree.hpp"
#include "scaffold/types.hpp"

namespace scaffold {

inline constexpr Rgb kWithinColor{0, 255, 0};
inline constexpr Rgb kExceedingColor{255, 0, 0};
inline constexpr Rgb kMatchedColor{0, 0, 255};
inline constexpr Rgb kModifiedColor{255, 255, 0};

/// Per-point nearest-neighbor distance against a reference index.
std::vector<double> cloud_distances(const PointCloud& current,
                                    const SpatialIndex& reference_index);

enum class DeviationLabel : std::uint8_t { Within, Exceeding };

struct DeviationReport {
    double threshold_fraction = 0.0;
    double characteristic_length = 0.0;
    double threshold = 0.0;  ///< fraction * characteristic_length
    std::vector<double> distances;
    std::vector<DeviationLabel> labels;  ///< Exceeding iff distance > threshold
    std::size_t exceeding_count = 0;
    double exceeding_fraction = 0.0;
    double max_distance = 0.0;
    double mean_distance = 0.0;
};

/// Label each distance against threshold = fraction * characteristic_length;
/// strictly greater counts as Exceeding.
DeviationReport classify_deviation(std::vector<double> distances, double threshold_fraction,
                                   double characteristic_length);

enum class ChangeLabel : std::uint8_t { Matched, Modified };

struct ChangeMap {
    double match_distance = 0.0;
    std::vector<ChangeLabel> labels;  ///< Matched iff NN distance <= match_distance
    std::size_t matched_count = 0;
    std::size_t modified_count = 0;
};

ChangeMap change_map(const PointCloud& current, const SpatialIndex& reference_index,
                     double match_distance);

/// Copy of the cloud recolored from per-point labels.
PointCloud colorize(const PointCloud& cloud, const std::vector<Rgb>& colors);

/// Write the cloud colored green (within) / red (exceeding) as binary PLY.
void export_deviation_cloud(const PointCloud& cloud, const DeviationReport& report,
                            const std::string& path);

/// Write the cloud colored blue (matched) / yellow (modified) as binary PLY.
void export_change_cloud(const PointCloud& cloud, const ChangeMap& map, const std::string& path);

}  // namespace scaffold
