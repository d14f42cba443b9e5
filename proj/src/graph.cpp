#include "scaffold/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "scaffold/cloud_io.hpp"
#include "scaffold/deviation.hpp"

namespace scaffold {

using nlohmann::json;

const ScaffoldGraph::Node* ScaffoldGraph::find_node(int id) const {
    for (const Node& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

void ScaffoldGraph::check_valid() const {
    std::set<int> ids;
    for (const Node& n : nodes)
        if (!ids.insert(n.id).second)
            throw std::invalid_argument("graph has duplicate node id " + std::to_string(n.id));
    for (const Edge& e : edges) {
        if (e.a >= e.b)
            throw std::invalid_argument("graph edge endpoints not ordered: " +
                                        std::to_string(e.a) + ", " + std::to_string(e.b));
        if (!ids.count(e.a) || !ids.count(e.b))
            throw std::invalid_argument("graph edge references unknown node");
    }
}

JointFormation form_joints(const std::vector<BraceSegment>& braces, const PointCloud& cloud,
                           const SpatialIndex& index, double joint_radius, double merge_radius) {
    if (!(joint_radius >= 0.0) || !(merge_radius >= 0.0))
        throw std::invalid_argument("joint radii must be non-negative");

    const std::size_t m = braces.size();
    std::vector<Point3> candidates(2 * m);
    for (std::size_t i = 0; i < m; ++i) {
        const Point3 ends[2] = {braces[i].endpoint_a, braces[i].endpoint_b};
        for (int e = 0; e < 2; ++e) {
            Point3 pos = ends[e];
            if (!index.empty() && joint_radius > 0.0) {
                const std::vector<int> nb = index.radius(ends[e], joint_radius);
                if (!nb.empty()) {
                    Point3 sum;
                    for (int j : nb) sum += cloud.points[j];
                    pos = sum / static_cast<double>(nb.size());
                }
            }
            candidates[2 * i + e] = pos;
        }
    }

    // Single-linkage merge of candidates within merge_radius.
    std::vector<int> parent(candidates.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < candidates.size(); ++i)
        for (std::size_t j = i + 1; j < candidates.size(); ++j)
            if (distance(candidates[i], candidates[j]) <= merge_radius) {
                const int ri = find(static_cast<int>(i));
                const int rj = find(static_cast<int>(j));
                if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
            }

    JointFormation out;
    std::map<int, int> root_to_joint;  // ordered by smallest member index
    std::vector<Point3> sums;
    std::vector<int> counts;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const int root = find(static_cast<int>(i));
        auto [it, inserted] = root_to_joint.try_emplace(root, static_cast<int>(sums.size()));
        if (inserted) {
            sums.push_back({});
            counts.push_back(0);
        }
        sums[it->second] += candidates[i];
        ++counts[it->second];
    }
    out.joints.resize(sums.size());
    for (std::size_t j = 0; j < sums.size(); ++j)
        out.joints[j] = sums[j] / static_cast<double>(counts[j]);
    out.brace_joints.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        out.brace_joints[i] = {root_to_joint.at(find(static_cast<int>(2 * i))),
                               root_to_joint.at(find(static_cast<int>(2 * i + 1)))};
    return out;
}

GraphBuild build_graph(const std::vector<BraceSegment>& braces, const JointFormation& joints,
                       double attach_radius, const OrientationTolerances& tol) {
    if (!(attach_radius >= 0.0)) throw std::invalid_argument("attach_radius must be non-negative");
    if (joints.brace_joints.size() != braces.size())
        throw std::invalid_argument("joint formation does not match brace list");

    GraphBuild out;
    std::set<std::pair<int, int>> seen;
    for (std::size_t i = 0; i < braces.size(); ++i) {
        const BraceSegment& br = braces[i];
        // Joints on this brace: both endpoint joints plus every joint within
        // attach_radius of the segment, each at its projection parameter.
        std::map<int, double> t_of;
        t_of[joints.brace_joints[i].first] = 0.0;
        t_of[joints.brace_joints[i].second] = br.length;
        for (std::size_t j = 0; j < joints.joints.size(); ++j) {
            const Point3 rel = joints.joints[j] - br.endpoint_a;
            const double t = std::clamp(rel.dot(br.direction), 0.0, br.length);
            const Point3 closest = br.endpoint_a + br.direction * t;
            if (distance(closest, joints.joints[j]) <= attach_radius)
                t_of.try_emplace(static_cast<int>(j), t);
        }
        std::vector<std::pair<double, int>> stops;
        stops.reserve(t_of.size());
        for (const auto& [id, t] : t_of) stops.push_back({t, id});
        std::sort(stops.begin(), stops.end());

        if (stops.size() < 2) {
            ++out.dropped_degenerate_braces;
            continue;
        }
        for (std::size_t s = 0; s + 1 < stops.size(); ++s) {
            const int a = std::min(stops[s].second, stops[s + 1].second);
            const int b = std::max(stops[s].second, stops[s + 1].second);
            if (!seen.insert({a, b}).second) {
                ++out.merged_duplicate_edges;
                continue;
            }
            const Point3 pa = joints.joints[a];
            const Point3 pb = joints.joints[b];
            ScaffoldGraph::Edge edge;
            edge.a = a;
            edge.b = b;
            edge.length = distance(pa, pb);
            edge.orientation = edge.length > 0.0
                                   ? classify_orientation((pb - pa) / edge.length, tol)
                                   : br.orientation;
            out.graph.edges.push_back(edge);
        }
    }

    std::set<int> used;
    for (const auto& e : out.graph.edges) {
        used.insert(e.a);
        used.insert(e.b);
    }
    for (int id : used) out.graph.nodes.push_back({id, joints.joints[id]});
    out.graph.check_valid();
    return out;
}

std::string graph_to_json(const ScaffoldGraph& graph) {
    json nodes = json::array();
    for (const auto& n : graph.nodes)
        nodes.push_back({{"id", n.id}, {"x", n.position.x}, {"y", n.position.y},
                         {"z", n.position.z}});
    json edges = json::array();
    for (const auto& e : graph.edges)
        edges.push_back({{"a", e.a},
                         {"b", e.b},
                         {"orientation", to_string(e.orientation)},
                         {"length", e.length}});
    return json{{"nodes", nodes}, {"edges", edges}}.dump(2) + "\n";
}

ScaffoldGraph graph_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("graph JSON parse error: ") + e.what());
    }
    ScaffoldGraph g;
    if (!j.is_object() || !j.contains("nodes") || !j.contains("edges"))
        throw std::runtime_error("graph JSON must contain 'nodes' and 'edges'");
    try {
        for (const json& n : j.at("nodes"))
            g.nodes.push_back({n.at("id").get<int>(),
                               {n.at("x").get<double>(), n.at("y").get<double>(),
                                n.at("z").get<double>()}});
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("graph JSON node: ") + e.what());
    }
    for (const json& e : j.at("edges")) {
        ScaffoldGraph::Edge edge;
        std::string o;
        try {
            edge.a = e.at("a").get<int>();
            edge.b = e.at("b").get<int>();
            edge.length = e.at("length").get<double>();
            o = e.at("orientation").get<std::string>();
        } catch (const json::exception& ex) {
            throw std::runtime_error(std::string("graph JSON edge: ") + ex.what());
        }
        if (o == "vertical")
            edge.orientation = Orientation::Vertical;
        else if (o == "horizontal_x")
            edge.orientation = Orientation::HorizontalX;
        else if (o == "horizontal_y")
            edge.orientation = Orientation::HorizontalY;
        else if (o == "diagonal")
            edge.orientation = Orientation::Diagonal;
        else
            throw std::runtime_error("graph JSON: unknown orientation '" + o + "'");
        g.edges.push_back(edge);
    }
    std::sort(g.nodes.begin(), g.nodes.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    g.check_valid();
    return g;
}

void save_graph(const ScaffoldGraph& graph, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open file for writing");
    out << graph_to_json(graph);
    if (!out) throw std::runtime_error(path + ": write failed");
}

ScaffoldGraph load_graph(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return graph_from_json(ss.str());
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void export_element_cloud(const PointCloud& cloud, const std::vector<ShapeClass>& classes,
                          const std::string& path) {
    if (classes.size() != cloud.size())
        throw std::invalid_argument("class labels do not match cloud size");
    std::vector<Rgb> colors(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        switch (classes[i]) {
            case ShapeClass::Linear: colors[i] = {0, 255, 0}; break;
            case ShapeClass::Spherical: colors[i] = {255, 0, 0}; break;
            case ShapeClass::Planar: colors[i] = {0, 0, 255}; break;
            default: colors[i] = {128, 128, 128}; break;
        }
    }
    save_cloud(colorize(cloud, colors), path, CloudFormat::PlyBinary);
}

}  // namespace scaffold
