#pragma once

#include <string>
#include <utility>
#include <vector>

#include "scaffold/braces.hpp"
#include "scaffold/kdtree.hpp"
#include "scaffold/types.hpp"

namespace scaffold {

struct ScaffoldGraph {
    struct Node {
        int id = 0;
        Point3 position;
    };
    struct Edge {
        int a = 0;  ///< node ids, a < b
        int b = 0;
        Orientation orientation = Orientation::Diagonal;
        double length = 0.0;
    };
    std::vector<Node> nodes;  ///< ascending id; ids need not be contiguous
    std::vector<Edge> edges;

    const Node* find_node(int id) const;
    void check_valid() const;  ///< unique ids, edges reference nodes, a < b
};

struct JointFormation {
    std::vector<Point3> joints;  ///< joint id = index
    /// Per brace: joint ids owning endpoint a and endpoint b.
    std::vector<std::pair<int, int>> brace_joints;
};

/// Turn brace endpoints into joints: each endpoint becomes a candidate at
/// the mean of the cloud points within joint_radius of it (the endpoint
/// itself when isolated); candidates within merge_radius of each other merge
/// transitively into a single joint at their mean.
JointFormation form_joints(const std::vector<BraceSegment>& braces, const PointCloud& cloud,
                           const SpatialIndex& index, double joint_radius, double merge_radius);

struct GraphBuild {
    ScaffoldGraph graph;
    int dropped_degenerate_braces = 0;  ///< braces whose joints collapsed to one
    int merged_duplicate_edges = 0;
};

/// Assemble the graph. Every joint within attach_radius of a brace's segment
/// splits that brace at its projection parameter, so a brace running through
/// several joints yields one edge per consecutive joint pair. Duplicate
/// (a, b) pairs collapse to one edge; joints with no incident edge are
/// dropped from the node list.
GraphBuild build_graph(const std::vector<BraceSegment>& braces, const JointFormation& joints,
                       double attach_radius, const OrientationTolerances& tol = {});

std::string graph_to_json(const ScaffoldGraph& graph);
ScaffoldGraph graph_from_json(const std::string& text);

void save_graph(const ScaffoldGraph& graph, const std::string& path);
ScaffoldGraph load_graph(const std::string& path);

/// Write the cloud colored by shape class (linear green, spherical red,
/// planar blue, unclassified gray) as binary PLY.
void export_element_cloud(const PointCloud& cloud, const std::vector<ShapeClass>& classes,
                          const std::string& path);

}  // namespace scaffold
