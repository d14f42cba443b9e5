#include "scaffold/graphdiff.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace scaffold {

using nlohmann::json;

namespace {

double segment_distance(const Point3& p, const Point3& a, const Point3& b) {
    const Point3 ab = b - a;
    const double len2 = ab.squared_norm();
    if (len2 == 0.0) return distance(p, a);
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

}  // namespace

NodeCorrespondence match_nodes(const ScaffoldGraph& reference, const ScaffoldGraph& current,
                               double node_tolerance) {
    if (!(node_tolerance >= 0.0))
        throw std::invalid_argument("node_tolerance must be non-negative");

    struct Candidate {
        double d;
        int ref_id;
        int cur_id;
    };
    std::vector<Candidate> candidates;
    for (const auto& rn : reference.nodes)
        for (const auto& cn : current.nodes) {
            const double d = distance(rn.position, cn.position);
            if (d <= node_tolerance) candidates.push_back({d, rn.id, cn.id});
        }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.ref_id != b.ref_id) return a.ref_id < b.ref_id;
        return a.cur_id < b.cur_id;
    });

    NodeCorrespondence out;
    std::set<int> ref_used, cur_used;
    for (const Candidate& c : candidates) {
        if (ref_used.count(c.ref_id) || cur_used.count(c.cur_id)) continue;
        ref_used.insert(c.ref_id);
        cur_used.insert(c.cur_id);
        out.matches.push_back({c.ref_id, c.cur_id, c.d});
    }
    for (const auto& rn : reference.nodes)
        if (!ref_used.count(rn.id)) out.unmatched_reference.push_back(rn.id);
    for (const auto& cn : current.nodes)
        if (!cur_used.count(cn.id)) out.unmatched_current.push_back(cn.id);
    return out;
}

GraphDiff diff_graphs(const ScaffoldGraph& reference, const ScaffoldGraph& current,
                      double node_tolerance, double deviation_tolerance) {
    if (!(deviation_tolerance >= 0.0))
        throw std::invalid_argument("deviation_tolerance must be non-negative");
    reference.check_valid();
    current.check_valid();

    GraphDiff diff;
    diff.nodes = match_nodes(reference, current, node_tolerance);

    std::map<int, int> ref_to_cur;
    std::map<int, double> ref_disp;
    for (const NodeMatch& m : diff.nodes.matches) {
        ref_to_cur[m.reference_id] = m.current_id;
        ref_disp[m.reference_id] = m.displacement;
    }

    std::map<std::pair<int, int>, int> current_edges;
    for (std::size_t i = 0; i < current.edges.size(); ++i)
        current_edges[{current.edges[i].a, current.edges[i].b}] = static_cast<int>(i);

    std::set<int> hit_current;
    for (std::size_t i = 0; i < reference.edges.size(); ++i) {
        const auto& e = reference.edges[i];
        EdgeDiff ed;
        ed.reference_edge = static_cast<int>(i);
        const auto ita = ref_to_cur.find(e.a);
        const auto itb = ref_to_cur.find(e.b);
        if (ita == ref_to_cur.end() || itb == ref_to_cur.end()) {
            ed.state = EdgeState::Missing;
            diff.edges.push_back(ed);
            continue;
        }
        const std::pair<int, int> key{std::min(ita->second, itb->second),
                                      std::max(ita->second, itb->second)};
        const auto itc = current_edges.find(key);
        if (itc == current_edges.end()) {
            ed.state = EdgeState::Missing;
            diff.edges.push_back(ed);
            continue;
        }
        hit_current.insert(itc->second);
        ed.current_edge = itc->second;
        ed.max_displacement = std::max(ref_disp.at(e.a), ref_disp.at(e.b));
        ed.state = ed.max_displacement > deviation_tolerance ? EdgeState::Deviated
                                                             : EdgeState::Matched;
        diff.edges.push_back(ed);
    }
    for (std::size_t i = 0; i < current.edges.size(); ++i) {
        if (hit_current.count(static_cast<int>(i))) continue;
        EdgeDiff ed;
        ed.state = EdgeState::Added;
        ed.current_edge = static_cast<int>(i);
        diff.edges.push_back(ed);
    }

    // A tube scanned as one segment on one side but as two collinear
    // segments meeting a degree-2 node on the other yields a missing edge
    // plus added edges even though the structure is identical. Resolve such
    // artifacts geometrically: a missing reference edge whose whole span
    // lies along current edges is matched (or deviated), and an added
    // current edge lying along the reference structure is discarded.
    std::map<int, Point3> ref_pos, cur_pos;
    for (const auto& n : reference.nodes) ref_pos[n.id] = n.position;
    for (const auto& n : current.nodes) cur_pos[n.id] = n.position;

    const auto span_covered = [&](const Point3& a, const Point3& b, const ScaffoldGraph& g,
                                  const std::map<int, Point3>& pos) {
        constexpr int kSamples = 16;
        for (int s = 0; s <= kSamples; ++s) {
            const Point3 p = a + (b - a) * (static_cast<double>(s) / kSamples);
            bool near = false;
            for (const auto& e : g.edges)
                if (segment_distance(p, pos.at(e.a), pos.at(e.b)) <= node_tolerance) {
                    near = true;
                    break;
                }
            if (!near) return false;
        }
        return true;
    };
    // Matched nodes resolve to their counterpart; an unmatched reference
    // node may still sit on the interior of a current edge (its joint was
    // absorbed into a through-running tube).
    const auto resolve_ref = [&](int id) -> std::optional<Point3> {
        const auto it = ref_to_cur.find(id);
        if (it != ref_to_cur.end()) return cur_pos.at(it->second);
        const Point3 p = ref_pos.at(id);
        std::optional<Point3> out;
        double best = node_tolerance;
        for (const auto& e : current.edges) {
            const Point3& a = cur_pos.at(e.a);
            const Point3& b = cur_pos.at(e.b);
            const double d = segment_distance(p, a, b);
            if (d <= best && (!out || d < best)) {
                best = d;
                const Point3 ab = b - a;
                const double len2 = ab.squared_norm();
                const double t = len2 == 0.0 ? 0.0 : std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
                out = a + ab * t;
            }
        }
        return out;
    };

    for (EdgeDiff& ed : diff.edges) {
        if (ed.state != EdgeState::Missing) continue;
        const auto& e = reference.edges[static_cast<std::size_t>(ed.reference_edge)];
        const std::optional<Point3> ra = resolve_ref(e.a);
        const std::optional<Point3> rb = resolve_ref(e.b);
        if (!ra || !rb || !span_covered(*ra, *rb, current, cur_pos)) continue;
        ed.max_displacement =
            std::max(distance(ref_pos.at(e.a), *ra), distance(ref_pos.at(e.b), *rb));
        ed.state = ed.max_displacement > deviation_tolerance ? EdgeState::Deviated
                                                             : EdgeState::Matched;
    }
    std::erase_if(diff.edges, [&](const EdgeDiff& ed) {
        if (ed.state != EdgeState::Added) return false;
        const auto& e = current.edges[static_cast<std::size_t>(ed.current_edge)];
        return span_covered(cur_pos.at(e.a), cur_pos.at(e.b), reference, ref_pos);
    });

    for (const EdgeDiff& e : diff.edges) {
        switch (e.state) {
            case EdgeState::Matched: ++diff.matched_count; break;
            case EdgeState::Deviated: ++diff.deviated_count; break;
            case EdgeState::Missing: ++diff.missing_count; break;
            case EdgeState::Added: ++diff.added_count; break;
        }
    }
    return diff;
}

namespace {

json edge_json(const ScaffoldGraph& g, int idx) {
    const auto& e = g.edges[idx];
    return {{"a", e.a}, {"b", e.b}, {"orientation", to_string(e.orientation)},
            {"length", e.length}};
}

}  // namespace

std::string diff_to_json(const GraphDiff& diff, const ScaffoldGraph& reference,
                         const ScaffoldGraph& current) {
    json matches = json::array();
    for (const NodeMatch& m : diff.nodes.matches)
        matches.push_back({{"reference", m.reference_id},
                           {"current", m.current_id},
                           {"displacement", m.displacement}});
    json edges = json::array();
    for (const EdgeDiff& e : diff.edges) {
        json entry;
        switch (e.state) {
            case EdgeState::Matched: entry["state"] = "matched"; break;
            case EdgeState::Deviated: entry["state"] = "deviated"; break;
            case EdgeState::Missing: entry["state"] = "missing"; break;
            case EdgeState::Added: entry["state"] = "added"; break;
        }
        if (e.reference_edge >= 0) entry["reference_edge"] = edge_json(reference, e.reference_edge);
        if (e.current_edge >= 0) entry["current_edge"] = edge_json(current, e.current_edge);
        if (e.state == EdgeState::Matched || e.state == EdgeState::Deviated)
            entry["max_displacement"] = e.max_displacement;
        edges.push_back(entry);
    }
    const json j{{"node_matches", matches},
                 {"unmatched_reference_nodes", diff.nodes.unmatched_reference},
                 {"unmatched_current_nodes", diff.nodes.unmatched_current},
                 {"edges", edges},
                 {"summary",
                  {{"matched", diff.matched_count},
                   {"deviated", diff.deviated_count},
                   {"missing", diff.missing_count},
                   {"added", diff.added_count}}}};
    return j.dump(2) + "\n";
}

}  // namespace scaffold
