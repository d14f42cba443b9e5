#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "scaffold/braces.hpp"
#include "scaffold/icp.hpp"
#include "scaffold/plane.hpp"
#include "scaffold/synth.hpp"

namespace scaffold {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Every tunable of the pipeline, file-loadable as dotted key = value lines.
/// Zero means "disabled" for voxel_size / outlier_k / plane_count /
/// crop_max_distance, and "resolve automatically" for characteristic_length
/// and match_distance.
struct PipelineConfig {
    std::uint64_t seed = 0;

    std::string io_reference;
    std::string io_current;
    std::string io_output_dir = "out";
    std::string io_input_format = "auto";        // auto | ply | xyz
    std::string io_output_format = "ply_binary"; // ply_binary | ply_ascii | xyz

    double preprocess_voxel_size = 0.02;
    int preprocess_outlier_k = 12;
    double preprocess_outlier_std_ratio = 2.0;
    int preprocess_plane_count = 2;
    double preprocess_plane_distance = 0.03;
    int preprocess_plane_iterations = 400;
    double preprocess_plane_min_inlier_fraction = 0.10;
    double preprocess_crop_max_distance = 5.0;

    int icp_max_iterations = 50;
    double icp_convergence_delta = 1e-6;
    double icp_max_correspondence_distance = 1.0;
    bool icp_centroid_init = false;

    double deviation_threshold_fraction = 0.05;
    double deviation_characteristic_length = 0.0;
    double deviation_match_distance = 0.0;

    double structure_feature_radius = 0.10;
    int structure_min_neighbors = 8;
    double structure_dbscan_eps = 0.06;
    int structure_dbscan_min_pts = 6;
    double structure_mixing_angle = 25.0;
    double structure_hybrid_angle = 30.0;
    double structure_joint_radius = 0.08;
    double structure_merge_radius = 0.10;
    double structure_attach_radius = 0.10;
    double structure_min_brace_length = 0.30;
    double structure_vertical_tolerance = 15.0;
    double structure_horizontal_tolerance = 15.0;

    double graphdiff_node_tolerance = 0.25;
    double graphdiff_deviation_tolerance = 0.05;

    double report_alarm_level = 0.05;
    bool report_include_timestamp = false;

    int synth_bays_x = 1;
    int synth_bays_y = 1;
    int synth_lifts = 1;
    double synth_bay_width = 2.0;
    double synth_bay_depth = 1.0;
    double synth_lift_height = 2.0;
    double synth_tube_radius = 0.024;
    double synth_points_per_meter = 400.0;
    double synth_noise_sigma = 0.002;
    bool synth_include_ground = false;
    bool synth_include_wall = false;
    double synth_wall_standoff = 1.2;
    int synth_clutter_points = 0;
    /// Canonicalized "synth.defect" lines; an empty assignment clears them.
    std::vector<std::string> synth_defects;

    void validate() const;  ///< re-check every bound; throws ConfigError
    std::vector<Defect> defects() const;
};

/// Apply one key/value pair. `context` prefixes error messages ("file:line"
/// or "--set"). Unknown keys, malformed values, and out-of-bounds values all
/// throw ConfigError.
void apply_config_value(PipelineConfig& config, const std::string& key, const std::string& value,
                        const std::string& context);

/// Parse `key = value` lines ('#' comments, blank lines ignored) on top of
/// the current contents of `config`.
void load_config_file(PipelineConfig& config, const std::string& path);

/// Apply a single "key=value" override (the --set flag).
void apply_override(PipelineConfig& config, const std::string& assignment);

/// Render every key in registry order; parsing the result reproduces
/// `config` exactly (doubles use shortest round-trip formatting).
std::string emit_config(const PipelineConfig& config);

/// One defect descriptor:
///   remove_brace IX IY IZ AXIS
///   shift_brace  IX IY IZ AXIS DX DY DZ
///   shift_joint  IX IY IZ DX DY DZ
/// where (IX, IY, IZ) addresses a lattice node and AXIS is x, y, or z.
/// Malformed descriptors throw ConfigError.
Defect parse_defect(const std::string& text);
std::string format_defect(const Defect& defect);

ScaffoldSpec synth_spec(const PipelineConfig& config);
RansacParams ransac_params(const PipelineConfig& config);
IcpParams icp_params(const PipelineConfig& config);
HybridParams hybrid_params(const PipelineConfig& config);
OrientationTolerances orientation_tolerances(const PipelineConfig& config);

}  // namespace scaffold
