#include "scaffold/deviation.hpp"

#include <algorithm>
#include <stdexcept>

#include "scaffold/cloud_io.hpp"

namespace scaffold {

std::vector<double> cloud_distances(const PointCloud& current,
                                    const SpatialIndex& reference_index) {
    if (reference_index.empty()) throw std::invalid_argument("empty reference index");
    const std::int64_t n = static_cast<std::int64_t>(current.size());
    std::vector<double> out(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        out[i] = reference_index.nearest(current.points[i]).distance;
    return out;
}

DeviationReport classify_deviation(std::vector<double> distances, double threshold_fraction,
                                   double characteristic_length) {
    if (!(threshold_fraction > 0.0))
        throw std::invalid_argument("threshold_fraction must be positive");
    if (!(characteristic_length > 0.0))
        throw std::invalid_argument("characteristic_length must be positive");

    DeviationReport report;
    report.threshold_fraction = threshold_fraction;
    report.characteristic_length = characteristic_length;
    report.threshold = threshold_fraction * characteristic_length;
    report.labels.resize(distances.size());

    double sum = 0.0;
    for (std::size_t i = 0; i < distances.size(); ++i) {
        const double d = distances[i];
        const bool exceeding = d > report.threshold;
        report.labels[i] = exceeding ? DeviationLabel::Exceeding : DeviationLabel::Within;
        if (exceeding) ++report.exceeding_count;
        sum += d;
        report.max_distance = std::max(report.max_distance, d);
    }
    if (!distances.empty()) {
        report.mean_distance = sum / static_cast<double>(distances.size());
        report.exceeding_fraction =
            static_cast<double>(report.exceeding_count) / static_cast<double>(distances.size());
    }
    report.distances = std::move(distances);
    return report;
}

ChangeMap change_map(const PointCloud& current, const SpatialIndex& reference_index,
                     double match_distance) {
    if (!(match_distance >= 0.0))
        throw std::invalid_argument("match_distance must be non-negative");
    const std::vector<double> dist = cloud_distances(current, reference_index);

    ChangeMap map;
    map.match_distance = match_distance;
    map.labels.resize(dist.size());
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const bool matched = dist[i] <= match_distance;
        map.labels[i] = matched ? ChangeLabel::Matched : ChangeLabel::Modified;
        if (matched)
            ++map.matched_count;
        else
            ++map.modified_count;
    }
    return map;
}

PointCloud colorize(const PointCloud& cloud, const std::vector<Rgb>& colors) {
    if (colors.size() != cloud.size())
        throw std::invalid_argument("color count does not match point count");
    PointCloud out;
    out.points = cloud.points;
    out.colors = colors;
    return out;
}

void export_deviation_cloud(const PointCloud& cloud, const DeviationReport& report,
                            const std::string& path) {
    if (report.labels.size() != cloud.size())
        throw std::invalid_argument("report does not match cloud size");
    std::vector<Rgb> colors(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i)
        colors[i] = report.labels[i] == DeviationLabel::Exceeding ? kExceedingColor : kWithinColor;
    save_cloud(colorize(cloud, colors), path, CloudFormat::PlyBinary);
}

void export_change_cloud(const PointCloud& cloud, const ChangeMap& map, const std::string& path) {
    if (map.labels.size() != cloud.size())
        throw std::invalid_argument("change map does not match cloud size");
    std::vector<Rgb> colors(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i)
        colors[i] = map.labels[i] == ChangeLabel::Matched ? kMatchedColor : kModifiedColor;
    save_cloud(colorize(cloud, colors), path, CloudFormat::PlyBinary);
}

}  // namespace scaffold
