#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "scaffold/config.hpp"
#include "scaffold/deviation.hpp"
#include "scaffold/graph.hpp"
#include "scaffold/graphdiff.hpp"
#include "scaffold/icp.hpp"
#include "scaffold/plane.hpp"
#include "scaffold/types.hpp"

namespace scaffold {

/// Error tagged with the pipeline stage that raised it, so the CLI can name
/// the failing stage in its diagnostic.
struct StageError : std::runtime_error {
    std::string stage;
    StageError(std::string stage_name, const std::string& message)
        : std::runtime_error(message), stage(std::move(stage_name)) {}
};

struct StageSummary {
    std::string stage;
    std::size_t points_in = 0;
    std::size_t points_out = 0;
};

struct PreprocessResult {
    PointCloud cloud;
    std::vector<StageSummary> stages;  ///< executed stages only
    std::vector<PlaneModel> planes;    ///< from plane removal, original indices
    int ground_plane = -1;             ///< index into planes, -1 if absent
    int wall_plane = -1;
    bool cropped = false;
    bool planes_stopped_early = false;
};

/// voxel -> outlier filter -> plane removal -> wall-offset crop, each stage
/// skipped when its config knob is zero (voxel_size, outlier_k, plane_count,
/// crop_max_distance). The crop also no-ops when no wall plane was found.
PreprocessResult preprocess_cloud(const PointCloud& input, const PipelineConfig& config);

nlohmann::ordered_json preprocess_json(const PreprocessResult& result);

struct StructureResult {
    std::vector<ShapeFeatures> features;  ///< per input point
    std::vector<ShapeClass> classes;
    std::vector<int> linear_indices;      ///< into the input cloud
    std::vector<Cluster> clusters;        ///< final (post-hybrid), indices into linear subset
    int mixed_clusters = 0;
    std::vector<BraceSegment> braces;
    int degenerate_clusters = 0;          ///< coincident-point clusters skipped
    int short_braces_dropped = 0;
    JointFormation joints;
    GraphBuild build;
};

/// Classify shapes, cluster the linear points, refine mixed clusters, then
/// extract braces, joints, and the scaffold graph.
StructureResult extract_structure(const PointCloud& cloud, const PipelineConfig& config);

nlohmann::ordered_json structure_json(const StructureResult& result, std::size_t point_count);

/// Median length of the graph's vertical edges; 0 when it has none.
double median_vertical_edge_length(const ScaffoldGraph& graph);

/// Configured value, else the reference graph's median vertical edge length
/// (the lift height), else 1.0 m.
double resolve_characteristic_length(const PipelineConfig& config,
                                     const ScaffoldGraph* reference_graph);

/// Configured value, else 2 x voxel size, else 0.04 m when voxelization is
/// disabled.
double resolve_match_distance(const PipelineConfig& config);

/// Row-major [R | t] as 12 numbers.
nlohmann::ordered_json transform_json(const RigidTransform& t);

nlohmann::ordered_json registration_json(const IcpResult& result);

struct InspectionResult {
    PreprocessResult reference_pre;
    PreprocessResult current_pre;
    IcpResult registration;
    PointCloud aligned;  ///< preprocessed current under the ICP transform
    std::vector<double> distances;
    DeviationReport deviation;
    ChangeMap changes;
    StructureResult reference_structure;
    StructureResult current_structure;
    GraphDiff diff;
    bool alert = false;
    nlohmann::ordered_json report;
};

/// The full reference-vs-campaign comparison. Throws StageError on failure.
InspectionResult run_inspection(const PointCloud& reference, const PointCloud& current,
                                const PipelineConfig& config, const std::string& reference_name,
                                const std::string& current_name);

}  // namespace scaffold
