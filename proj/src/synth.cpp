#include "scaffold/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace scaffold {

inline constexpr double kPi = 3.14159265358979323846;

using nlohmann::json;

namespace {

void check_spec(const ScaffoldSpec& s) {
    if (s.bays_x < 1 || s.bays_y < 1 || s.lifts < 1)
        throw std::invalid_argument("scaffold needs at least one bay and one lift");
    if (!(s.bay_width > 0.0) || !(s.bay_depth > 0.0) || !(s.lift_height > 0.0))
        throw std::invalid_argument("bay dimensions must be positive");
    if (!(s.tube_radius >= 0.0)) throw std::invalid_argument("tube_radius must be non-negative");
    if (!(s.points_per_meter > 0.0))
        throw std::invalid_argument("points_per_meter must be positive");
    if (!(s.noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be non-negative");
    if (s.include_wall && !(s.wall_standoff > 0.0))
        throw std::invalid_argument("wall_standoff must be positive");
    if (s.clutter_points < 0) throw std::invalid_argument("clutter_points must be non-negative");
}

Point3 node_position(const ScaffoldSpec& s, int ix, int iy, int iz) {
    return {ix * s.bay_width, iy * s.bay_depth, iz * s.lift_height};
}

}  // namespace

int lattice_node_id(const ScaffoldSpec& spec, int ix, int iy, int iz) {
    const int nx = spec.bays_x + 1;
    const int ny = spec.bays_y + 1;
    if (ix < 0 || ix >= nx || iy < 0 || iy >= ny || iz < 0 || iz > spec.lifts)
        throw std::invalid_argument("lattice node out of range");
    return iz * nx * ny + iy * nx + ix;
}

SynthResult generate_scaffold(const ScaffoldSpec& spec) {
    check_spec(spec);
    const int nx = spec.bays_x + 1;
    const int ny = spec.bays_y + 1;
    const int nz = spec.lifts + 1;

    SynthResult result;
    for (int iz = 0; iz < nz; ++iz)
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix)
                result.graph.nodes.push_back(
                    {lattice_node_id(spec, ix, iy, iz), node_position(spec, ix, iy, iz)});

    auto add_edge = [&](int ix, int iy, int iz, int axis) {
        const int a = lattice_node_id(spec, ix, iy, iz);
        const int b = lattice_node_id(spec, ix + (axis == 0), iy + (axis == 1),
                                      iz + (axis == 2));
        ScaffoldGraph::Edge e;
        e.a = std::min(a, b);
        e.b = std::max(a, b);
        e.length = axis == 0 ? spec.bay_width : (axis == 1 ? spec.bay_depth : spec.lift_height);
        e.orientation = axis == 0 ? Orientation::HorizontalX
                                  : (axis == 1 ? Orientation::HorizontalY
                                               : Orientation::Vertical);
        result.edge_lookup[{e.a, axis}] = static_cast<int>(result.design_edges.size());
        result.design_edges.push_back(e);
        result.graph.edges.push_back(e);
    };
    // Verticals first, then ledgers along x, then along y; ids follow this
    // enumeration.
    for (int iz = 0; iz < spec.lifts; ++iz)
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) add_edge(ix, iy, iz, 2);
    for (int iz = 0; iz < nz; ++iz)
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < spec.bays_x; ++ix) add_edge(ix, iy, iz, 0);
    for (int iz = 0; iz < nz; ++iz)
        for (int iy = 0; iy < spec.bays_y; ++iy)
            for (int ix = 0; ix < nx; ++ix) add_edge(ix, iy, iz, 1);

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, spec.noise_sigma);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto noise = [&]() {
        return spec.noise_sigma > 0.0 ? Point3{gauss(rng), gauss(rng), gauss(rng)} : Point3{};
    };

    auto id_of = [&](int node) { return result.graph.find_node(node)->position; };
    for (std::size_t e = 0; e < result.design_edges.size(); ++e) {
        const auto& edge = result.design_edges[e];
        const Point3 a = id_of(edge.a);
        const Point3 axis = (id_of(edge.b) - a) / edge.length;
        // Tube frame perpendicular to the axis.
        const Point3 helper = std::abs(axis.z) < 0.9 ? Point3{0, 0, 1} : Point3{1, 0, 0};
        const Point3 u = axis.cross(helper).normalized();
        const Point3 v = axis.cross(u);

        const auto count =
            std::max<std::int64_t>(2, std::llround(spec.points_per_meter * edge.length));
        for (std::int64_t i = 0; i < count; ++i) {
            const double t = unit(rng) * edge.length;
            const double theta = unit(rng) * 2.0 * kPi;
            const Point3 p = a + axis * t +
                             (u * std::cos(theta) + v * std::sin(theta)) * spec.tube_radius +
                             noise();
            result.cloud.points.push_back(p);
            result.labels.push_back({PointSource::Brace, static_cast<int>(e),
                                     t < kJointZone || t > edge.length - kJointZone});
        }
    }

    const double max_x = spec.bays_x * spec.bay_width;
    const double max_y = spec.bays_y * spec.bay_depth;
    const double max_z = spec.lifts * spec.lift_height;
    const double plane_density =
        spec.tube_radius > 0.0
            ? spec.points_per_meter / (2.0 * kPi * spec.tube_radius)
            : spec.points_per_meter * spec.points_per_meter;

    if (spec.include_ground) {
        const double x0 = -kPlaneMargin;
        const double x1 = max_x + kPlaneMargin;
        const double y0 = spec.include_wall ? -spec.wall_standoff : -kPlaneMargin;
        const double y1 = max_y + kPlaneMargin;
        const auto count = std::llround((x1 - x0) * (y1 - y0) * plane_density);
        for (std::int64_t i = 0; i < count; ++i) {
            const Point3 p{x0 + unit(rng) * (x1 - x0), y0 + unit(rng) * (y1 - y0),
                           -kGroundClearance};
            result.cloud.points.push_back(p + noise());
            result.labels.push_back({PointSource::Ground, -1, false});
        }
    }
    if (spec.include_wall) {
        const double x0 = -kPlaneMargin;
        const double x1 = max_x + kPlaneMargin;
        const double z0 = -kGroundClearance;
        const double z1 = max_z + kPlaneMargin;
        const auto count = std::llround((x1 - x0) * (z1 - z0) * plane_density);
        for (std::int64_t i = 0; i < count; ++i) {
            const Point3 p{x0 + unit(rng) * (x1 - x0), -spec.wall_standoff,
                           z0 + unit(rng) * (z1 - z0)};
            result.cloud.points.push_back(p + noise());
            result.labels.push_back({PointSource::Wall, -1, false});
        }
    }
    for (int i = 0; i < spec.clutter_points; ++i) {
        const double x0 = -kPlaneMargin - 1.0;
        const double x1 = max_x + kPlaneMargin + 1.0;
        const double y0 = (spec.include_wall ? -spec.wall_standoff : 0.0) - kPlaneMargin - 1.0;
        const double y1 = max_y + kPlaneMargin + 1.0;
        const Point3 p{x0 + unit(rng) * (x1 - x0), y0 + unit(rng) * (y1 - y0),
                       -kGroundClearance + unit(rng) * (max_z + kPlaneMargin + kGroundClearance)};
        result.cloud.points.push_back(p);
        result.labels.push_back({PointSource::Clutter, -1, false});
    }
    return result;
}

std::vector<DefectLogEntry> apply_defects(SynthResult& result, const std::vector<Defect>& defects,
                                          const ScaffoldSpec& spec) {
    std::vector<DefectLogEntry> log;
    for (const Defect& d : defects) {
        DefectLogEntry entry;
        entry.defect = d;

        if (d.kind == DefectKind::ShiftJoint) {
            const int node = lattice_node_id(spec, d.node[0], d.node[1], d.node[2]);
            entry.node_id = node;
            const Point3 origin = node_position(spec, d.node[0], d.node[1], d.node[2]);
            for (std::size_t i = 0; i < result.cloud.size(); ++i) {
                if (distance(result.cloud.points[i], origin) <= kJointInfluenceRadius) {
                    result.cloud.points[i] += d.displacement;
                    ++entry.affected_points;
                }
            }
            for (auto& n : result.graph.nodes)
                if (n.id == node) n.position += d.displacement;
            for (auto& e : result.graph.edges)
                if (e.a == node || e.b == node)
                    e.length = distance(result.graph.find_node(e.a)->position,
                                        result.graph.find_node(e.b)->position);
            log.push_back(entry);
            continue;
        }

        if (d.axis < 0 || d.axis > 2) throw std::invalid_argument("defect axis must be 0, 1 or 2");
        const int a = lattice_node_id(spec, d.node[0], d.node[1], d.node[2]);
        const auto it = result.edge_lookup.find({a, d.axis});
        if (it == result.edge_lookup.end())
            throw std::invalid_argument("no lattice edge at the given node and axis");
        const int edge_id = it->second;
        if (std::find(result.removed_edges.begin(), result.removed_edges.end(), edge_id) !=
            result.removed_edges.end())
            throw std::invalid_argument("edge " + std::to_string(edge_id) + " already removed");
        entry.edge_id = edge_id;

        if (d.kind == DefectKind::RemoveBrace) {
            PointCloud kept;
            std::vector<PointLabel> kept_labels;
            for (std::size_t i = 0; i < result.cloud.size(); ++i) {
                const PointLabel& l = result.labels[i];
                if (l.source == PointSource::Brace && l.brace_id == edge_id) {
                    ++entry.affected_points;
                    continue;
                }
                kept.points.push_back(result.cloud.points[i]);
                kept_labels.push_back(l);
            }
            result.cloud = std::move(kept);
            result.labels = std::move(kept_labels);
            result.removed_edges.push_back(edge_id);

            const auto& de = result.design_edges[edge_id];
            auto& edges = result.graph.edges;
            for (std::size_t i = 0; i < edges.size(); ++i)
                if (edges[i].a == de.a && edges[i].b == de.b) {
                    edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(i));
                    break;
                }
            // prune nodes that lost their last edge
            std::vector<char> has_edge(result.graph.nodes.size(), 0);
            for (const auto& e : edges)
                for (std::size_t n = 0; n < result.graph.nodes.size(); ++n)
                    if (result.graph.nodes[n].id == e.a || result.graph.nodes[n].id == e.b)
                        has_edge[n] = 1;
            std::vector<ScaffoldGraph::Node> nodes;
            for (std::size_t n = 0; n < result.graph.nodes.size(); ++n)
                if (has_edge[n]) nodes.push_back(result.graph.nodes[n]);
            result.graph.nodes = std::move(nodes);
        } else {  // ShiftBrace
            for (std::size_t i = 0; i < result.cloud.size(); ++i) {
                const PointLabel& l = result.labels[i];
                if (l.source == PointSource::Brace && l.brace_id == edge_id) {
                    result.cloud.points[i] += d.displacement;
                    ++entry.affected_points;
                }
            }
        }
        log.push_back(entry);
    }
    return log;
}

namespace {

json edge_to_json_obj(const ScaffoldGraph::Edge& e) {
    return {{"a", e.a}, {"b", e.b}, {"orientation", to_string(e.orientation)},
            {"length", e.length}};
}

ScaffoldGraph::Edge edge_from_json_obj(const json& j) {
    ScaffoldGraph::Edge e;
    e.a = j.at("a").get<int>();
    e.b = j.at("b").get<int>();
    e.length = j.at("length").get<double>();
    const std::string o = j.at("orientation").get<std::string>();
    e.orientation = o == "vertical"
                        ? Orientation::Vertical
                        : (o == "horizontal_x"
                               ? Orientation::HorizontalX
                               : (o == "horizontal_y" ? Orientation::HorizontalY
                                                      : Orientation::Diagonal));
    return e;
}

}  // namespace

void save_synth_sidecar(const SynthResult& result, const std::string& path) {
    json labels;
    std::vector<int> source(result.labels.size());
    std::vector<int> brace_id(result.labels.size());
    std::vector<int> near_joint(result.labels.size());
    for (std::size_t i = 0; i < result.labels.size(); ++i) {
        source[i] = static_cast<int>(result.labels[i].source);
        brace_id[i] = result.labels[i].brace_id;
        near_joint[i] = result.labels[i].near_joint ? 1 : 0;
    }
    labels["source"] = source;
    labels["brace_id"] = brace_id;
    labels["near_joint"] = near_joint;

    json design = json::array();
    for (const auto& e : result.design_edges) design.push_back(edge_to_json_obj(e));

    json j;
    j["graph"] = json::parse(graph_to_json(result.graph));
    j["labels"] = labels;
    j["design_edges"] = design;
    j["removed_edges"] = result.removed_edges;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open file for writing");
    out << j.dump() << "\n";
    if (!out) throw std::runtime_error(path + ": write failed");
}

SynthSidecar load_synth_sidecar(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    json j;
    try {
        j = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    SynthSidecar side;
    side.graph = graph_from_json(j.at("graph").dump());
    const auto& labels = j.at("labels");
    const auto source = labels.at("source").get<std::vector<int>>();
    const auto brace_id = labels.at("brace_id").get<std::vector<int>>();
    const auto near_joint = labels.at("near_joint").get<std::vector<int>>();
    if (source.size() != brace_id.size() || source.size() != near_joint.size())
        throw std::runtime_error(path + ": inconsistent label arrays");
    side.labels.resize(source.size());
    for (std::size_t i = 0; i < source.size(); ++i)
        side.labels[i] = {static_cast<PointSource>(source[i]), brace_id[i], near_joint[i] != 0};
    for (const json& e : j.at("design_edges")) side.design_edges.push_back(edge_from_json_obj(e));
    side.removed_edges = j.at("removed_edges").get<std::vector<int>>();
    return side;
}

}  // namespace scaffold
