#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "scaffold/graph.hpp"
#include "scaffold/types.hpp"

namespace scaffold {

/// Parametric scaffold lattice: (bays_x x bays_y) bays by `lifts` lifts of
/// vertical standards joined by horizontal ledgers at every level, sampled
/// as noisy tube surfaces. Optional ground/wall planes and uniform clutter.
struct ScaffoldSpec {
    int bays_x = 1;
    int bays_y = 1;
    int lifts = 1;
    double bay_width = 2.0;    ///< x spacing
    double bay_depth = 1.0;    ///< y spacing
    double lift_height = 2.0;  ///< z spacing
    double tube_radius = 0.024;
    double points_per_meter = 400.0;  ///< samples per metre of tube length
    double noise_sigma = 0.002;
    bool include_ground = false;  ///< plane below the scaffold feet
    bool include_wall = false;    ///< vertical plane at y = -wall_standoff
    double wall_standoff = 1.2;
    int clutter_points = 0;
    std::uint64_t seed = 0;
};

enum class PointSource : std::uint8_t { Brace, Ground, Wall, Clutter };

struct PointLabel {
    PointSource source = PointSource::Brace;
    int brace_id = -1;  ///< design edge id for Brace points
    bool near_joint = false;
};

/// Scaffold feet sit this far above the ground plane (base plates), so
/// ledgers at the lowest level are not coplanar with the ground.
inline constexpr double kGroundClearance = 0.15;
/// Ground/wall planes extend this far beyond the lattice.
inline constexpr double kPlaneMargin = 1.0;
/// Brace points within this arclength of an endpoint are labeled near_joint.
inline constexpr double kJointZone = 0.1;
/// ShiftJoint moves cloud points within this radius of the node.
inline constexpr double kJointInfluenceRadius = 0.15;

struct SynthResult {
    PointCloud cloud;
    std::vector<PointLabel> labels;
    ScaffoldGraph graph;  ///< as-built: apply_defects edits this
    std::vector<ScaffoldGraph::Edge> design_edges;  ///< index = edge/brace id
    std::map<std::pair<int, int>, int> edge_lookup;  ///< (lower node id, axis) -> edge id
    std::vector<int> removed_edges;
};

int lattice_node_id(const ScaffoldSpec& spec, int ix, int iy, int iz);

SynthResult generate_scaffold(const ScaffoldSpec& spec);

enum class DefectKind : std::uint8_t { RemoveBrace, ShiftBrace, ShiftJoint };

/// Defects address the lattice: `node` is (ix, iy, iz); for brace defects,
/// `axis` (0 = x, 1 = y, 2 = z) selects the edge leaving the node toward
/// +axis.
struct Defect {
    DefectKind kind = DefectKind::RemoveBrace;
    std::array<int, 3> node = {0, 0, 0};
    int axis = 0;
    Point3 displacement;  ///< for the shift kinds
};

struct DefectLogEntry {
    Defect defect;
    int edge_id = -1;
    int node_id = -1;
    int affected_points = 0;
};

/// Apply defects in order. RemoveBrace deletes the edge's points and its
/// graph edge (then prunes isolated nodes); ShiftBrace translates the edge's
/// points, leaving the design graph in place; ShiftJoint translates every
/// point near the node and moves the graph node with its incident edge
/// lengths. Unknown or already-removed targets raise std::invalid_argument.
std::vector<DefectLogEntry> apply_defects(SynthResult& result, const std::vector<Defect>& defects,
                                          const ScaffoldSpec& spec);

void save_synth_sidecar(const SynthResult& result, const std::string& path);

struct SynthSidecar {
    std::vector<PointLabel> labels;
    ScaffoldGraph graph;
    std::vector<ScaffoldGraph::Edge> design_edges;
    std::vector<int> removed_edges;
};

SynthSidecar load_synth_sidecar(const std::string& path);

}  // namespace scaffold
