#include "scaffold/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>

#include "scaffold/dbscan.hpp"
#include "scaffold/features.hpp"
#include "scaffold/filters.hpp"

namespace scaffold {

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

std::string utc_timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

}  // namespace

PreprocessResult preprocess_cloud(const PointCloud& input, const PipelineConfig& config) {
    PreprocessResult result;
    result.cloud = input;
    result.stages.push_back({"input", input.size(), input.size()});

    if (config.preprocess_voxel_size > 0.0) {
        stage("voxel", [&] {
            std::size_t in = result.cloud.size();
            result.cloud = voxel_downsample(result.cloud, config.preprocess_voxel_size);
            result.stages.push_back({"voxel", in, result.cloud.size()});
            return 0;
        });
    }
    if (config.preprocess_outlier_k > 0) {
        stage("outlier", [&] {
            std::size_t in = result.cloud.size();
            auto filtered = remove_statistical_outliers(result.cloud, config.preprocess_outlier_k,
                                                        config.preprocess_outlier_std_ratio);
            result.cloud = std::move(filtered.cloud);
            result.stages.push_back({"outlier", in, result.cloud.size()});
            return 0;
        });
    }
    if (config.preprocess_plane_count > 0) {
        stage("planes", [&] {
            std::size_t in = result.cloud.size();
            auto removed =
                remove_planes(result.cloud, config.preprocess_plane_count, ransac_params(config));
            result.cloud = std::move(removed.remaining);
            result.planes = std::move(removed.planes);
            result.planes_stopped_early = removed.stopped_early;
            result.ground_plane = find_ground_plane(result.planes);
            result.wall_plane = find_wall_plane(result.planes, result.ground_plane);
            result.stages.push_back({"planes", in, result.cloud.size()});
            return 0;
        });
    }
    if (config.preprocess_crop_max_distance > 0.0 && result.wall_plane >= 0) {
        stage("crop", [&] {
            std::size_t in = result.cloud.size();
            result.cloud = crop_by_plane_offset(result.cloud, result.planes[result.wall_plane],
                                                config.preprocess_crop_max_distance);
            result.cropped = true;
            result.stages.push_back({"crop", in, result.cloud.size()});
            return 0;
        });
    }
    return result;
}

nlohmann::ordered_json preprocess_json(const PreprocessResult& result) {
    nlohmann::ordered_json stages = nlohmann::ordered_json::array();
    for (const auto& s : result.stages)
        stages.push_back({{"stage", s.stage}, {"points_in", s.points_in}, {"points_out", s.points_out}});
    nlohmann::ordered_json planes = nlohmann::ordered_json::array();
    for (const auto& p : result.planes)
        planes.push_back({{"normal", {p.normal.x, p.normal.y, p.normal.z}},
                          {"offset", p.offset},
                          {"inliers", p.inlier_count()}});
    return {{"stages", stages},
            {"planes", planes},
            {"ground_plane", result.ground_plane},
            {"wall_plane", result.wall_plane},
            {"cropped", result.cropped},
            {"planes_stopped_early", result.planes_stopped_early},
            {"points_out", result.cloud.size()}};
}

StructureResult extract_structure(const PointCloud& cloud, const PipelineConfig& config) {
    StructureResult result;
    if (cloud.empty()) return result;

    return stage("structure", [&] {
        StructureResult res;
        SpatialIndex index(cloud);
        res.features = shape_features(cloud, index, config.structure_feature_radius,
                                      config.structure_min_neighbors);
        res.classes = classify_points(res.features);

        PointCloud linear;
        std::vector<ShapeFeatures> linear_features;
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            if (res.classes[i] != ShapeClass::Linear) continue;
            res.linear_indices.push_back(static_cast<int>(i));
            linear.points.push_back(cloud.points[i]);
            linear_features.push_back(res.features[i]);
        }

        if (!linear.empty()) {
            DbscanResult clusters =
                dbscan(linear, config.structure_dbscan_eps, config.structure_dbscan_min_pts);
            for (const Cluster& c : clusters.clusters) {
                std::vector<Point3> directions;
                directions.reserve(c.point_indices.size());
                for (int i : c.point_indices) directions.push_back(linear_features[i].principal_direction);
                if (detect_mixed_cluster(directions, config.structure_mixing_angle)) {
                    ++res.mixed_clusters;
                    for (Cluster& sub : hybrid_cluster(linear, c, linear_features, hybrid_params(config)))
                        res.clusters.push_back(std::move(sub));
                } else {
                    res.clusters.push_back(c);
                }
            }
            for (std::size_t i = 0; i < res.clusters.size(); ++i)
                res.clusters[i].label = static_cast<int>(i);

            OrientationTolerances tol = orientation_tolerances(config);
            for (const Cluster& c : res.clusters) {
                if (c.size() < 2) {
                    ++res.degenerate_clusters;
                    continue;
                }
                BraceSegment seg;
                try {
                    seg = extract_brace(linear, c, tol);
                } catch (const std::invalid_argument&) {
                    ++res.degenerate_clusters;  // all member points coincident
                    continue;
                }
                if (seg.length < config.structure_min_brace_length) {
                    ++res.short_braces_dropped;
                    continue;
                }
                res.braces.push_back(seg);
            }
        }

        res.joints = form_joints(res.braces, cloud, index, config.structure_joint_radius,
                                 config.structure_merge_radius);
        res.build = build_graph(res.braces, res.joints, config.structure_attach_radius,
                                orientation_tolerances(config));
        return res;
    });
}

nlohmann::ordered_json structure_json(const StructureResult& result, std::size_t point_count) {
    std::size_t counts[4] = {0, 0, 0, 0};
    for (ShapeClass c : result.classes) ++counts[static_cast<int>(c)];
    return {{"points", point_count},
            {"class_counts",
             {{"linear", counts[0]},
              {"planar", counts[1]},
              {"spherical", counts[2]},
              {"unclassified", counts[3]}}},
            {"clusters", result.clusters.size()},
            {"mixed_clusters_refined", result.mixed_clusters},
            {"braces", result.braces.size()},
            {"degenerate_clusters", result.degenerate_clusters},
            {"short_braces_dropped", result.short_braces_dropped},
            {"joints", result.joints.joints.size()},
            {"nodes", result.build.graph.nodes.size()},
            {"edges", result.build.graph.edges.size()},
            {"dropped_degenerate_braces", result.build.dropped_degenerate_braces},
            {"merged_duplicate_edges", result.build.merged_duplicate_edges}};
}

double median_vertical_edge_length(const ScaffoldGraph& graph) {
    std::vector<double> lengths;
    for (const auto& e : graph.edges)
        if (e.orientation == Orientation::Vertical) lengths.push_back(e.length);
    if (lengths.empty()) return 0.0;
    std::sort(lengths.begin(), lengths.end());
    std::size_t n = lengths.size();
    return n % 2 == 1 ? lengths[n / 2] : 0.5 * (lengths[n / 2 - 1] + lengths[n / 2]);
}

double resolve_characteristic_length(const PipelineConfig& config,
                                     const ScaffoldGraph* reference_graph) {
    if (config.deviation_characteristic_length > 0.0) return config.deviation_characteristic_length;
    if (reference_graph != nullptr) {
        double lift = median_vertical_edge_length(*reference_graph);
        if (lift > 0.0) return lift;
    }
    return 1.0;
}

double resolve_match_distance(const PipelineConfig& config) {
    if (config.deviation_match_distance > 0.0) return config.deviation_match_distance;
    if (config.preprocess_voxel_size > 0.0) return 2.0 * config.preprocess_voxel_size;
    return 0.04;
}

nlohmann::ordered_json transform_json(const RigidTransform& t) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) out.push_back(t.rotation(r, c));
        out.push_back(t.translation(r));
    }
    return out;
}

nlohmann::ordered_json registration_json(const IcpResult& result) {
    return {{"converged", result.converged},
            {"iterations", result.iterations},
            {"mse", result.mse},
            {"correspondence_count", result.correspondence_count},
            {"transform", transform_json(result.transform)},
            {"error_history", result.error_history}};
}

InspectionResult run_inspection(const PointCloud& reference, const PointCloud& current,
                                const PipelineConfig& config, const std::string& reference_name,
                                const std::string& current_name) {
    InspectionResult out;
    out.reference_pre = preprocess_cloud(reference, config);
    out.current_pre = preprocess_cloud(current, config);

    SpatialIndex reference_index = stage("register", [&] {
        if (out.reference_pre.cloud.empty()) throw StageError("register", "reference cloud is empty after preprocessing");
        return SpatialIndex(out.reference_pre.cloud);
    });
    out.registration = stage("register", [&] {
        return icp(out.reference_pre.cloud, reference_index, out.current_pre.cloud,
                   icp_params(config));
    });
    out.aligned = apply_transform(out.current_pre.cloud, out.registration.transform);

    out.reference_structure = extract_structure(out.reference_pre.cloud, config);
    out.current_structure = extract_structure(out.aligned, config);

    out.distances = stage("deviate", [&] { return cloud_distances(out.aligned, reference_index); });
    double characteristic_length =
        resolve_characteristic_length(config, &out.reference_structure.build.graph);
    out.deviation = stage("deviate", [&] {
        return classify_deviation(out.distances, config.deviation_threshold_fraction,
                                  characteristic_length);
    });
    double match_distance = resolve_match_distance(config);
    out.changes = stage("deviate", [&] {
        return change_map(out.aligned, reference_index, match_distance);
    });

    out.diff = stage("diff", [&] {
        return diff_graphs(out.reference_structure.build.graph, out.current_structure.build.graph,
                           config.graphdiff_node_tolerance, config.graphdiff_deviation_tolerance);
    });

    out.alert = out.diff.missing_count > 0 || out.diff.deviated_count > 0 ||
                out.deviation.exceeding_fraction > config.report_alarm_level;

    nlohmann::ordered_json report;
    report["inputs"] = {{"reference", reference_name}, {"current", current_name}};
    report["preprocess"] = {{"reference", preprocess_json(out.reference_pre)},
                            {"current", preprocess_json(out.current_pre)}};
    report["registration"] = registration_json(out.registration);
    report["deviation"] = {{"threshold_fraction", out.deviation.threshold_fraction},
                           {"characteristic_length", out.deviation.characteristic_length},
                           {"threshold", out.deviation.threshold},
                           {"within_count", out.deviation.labels.size() - out.deviation.exceeding_count},
                           {"exceeding_count", out.deviation.exceeding_count},
                           {"exceeding_fraction", out.deviation.exceeding_fraction},
                           {"max_distance", out.deviation.max_distance},
                           {"mean_distance", out.deviation.mean_distance}};
    report["changes"] = {{"match_distance", out.changes.match_distance},
                         {"matched_count", out.changes.matched_count},
                         {"modified_count", out.changes.modified_count}};
    report["structure"] = {
        {"reference", structure_json(out.reference_structure, out.reference_pre.cloud.size())},
        {"current", structure_json(out.current_structure, out.aligned.size())}};
    report["diff"] = {{"matched", out.diff.matched_count},
                      {"deviated", out.diff.deviated_count},
                      {"missing", out.diff.missing_count},
                      {"added", out.diff.added_count},
                      {"unmatched_reference_nodes", out.diff.nodes.unmatched_reference.size()},
                      {"unmatched_current_nodes", out.diff.nodes.unmatched_current.size()}};
    report["alert"] = out.alert;
    report["timestamp"] =
        config.report_include_timestamp ? nlohmann::ordered_json(utc_timestamp()) : nullptr;
    out.report = std::move(report);
    return out;
}

}  // namespace scaffold
