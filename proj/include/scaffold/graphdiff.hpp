#pragma once

#include <string>
#include <vector>

#include "scaffold/graph.hpp"

namespace scaffold {

struct NodeMatch {
    int reference_id = -1;
    int current_id = -1;
    double displacement = 0.0;
};

struct NodeCorrespondence {
    std::vector<NodeMatch> matches;
    std::vector<int> unmatched_reference;
    std::vector<int> unmatched_current;
};

/// Greedy mutual matching: candidate pairs within node_tolerance are taken
/// in ascending (distance, reference id, current id) order, each node used
/// at most once.
NodeCorrespondence match_nodes(const ScaffoldGraph& reference, const ScaffoldGraph& current,
                               double node_tolerance);

enum class EdgeState : std::uint8_t { Matched, Deviated, Missing, Added };

struct EdgeDiff {
    EdgeState state = EdgeState::Matched;
    int reference_edge = -1;  ///< index into reference.edges, -1 for Added
    int current_edge = -1;    ///< index into current.edges, -1 for Missing
    double max_displacement = 0.0;  ///< larger endpoint displacement of matched pairs
};

struct GraphDiff {
    NodeCorrespondence nodes;
    std::vector<EdgeDiff> edges;
    int matched_count = 0;
    int deviated_count = 0;
    int missing_count = 0;
    int added_count = 0;
};

/// Compare edge sets through the node correspondence. A reference edge whose
/// two endpoints both match maps to the current edge between the matched
/// nodes; present -> Matched (or Deviated when either endpoint moved more
/// than deviation_tolerance), absent -> Missing. Reference edges with an
/// unmatched endpoint are Missing; current edges not hit by any reference
/// edge are Added. Collinear split/merge artifacts are then resolved
/// geometrically: a missing reference edge whose span lies within
/// node_tolerance of current edges end to end counts as matched (deviated
/// when its resolved endpoints moved beyond deviation_tolerance), and an
/// added current edge lying along reference edges the same way is dropped
/// from the diff.
GraphDiff diff_graphs(const ScaffoldGraph& reference, const ScaffoldGraph& current,
                      double node_tolerance, double deviation_tolerance);

std::string diff_to_json(const GraphDiff& diff, const ScaffoldGraph& reference,
                         const ScaffoldGraph& current);

}  // namespace scaffold
