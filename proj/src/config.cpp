#include "scaffold/config.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace scaffold {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, end);
}

[[noreturn]] void bad(const std::string& context, const std::string& msg) {
    throw ConfigError(context + ": " + msg);
}

double parse_double(const std::string& value, const std::string& context, const std::string& key) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE)
        bad(context, key + ": cannot parse '" + value + "' as a number");
    return v;
}

long long parse_int(const std::string& value, const std::string& context, const std::string& key) {
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE)
        bad(context, key + ": cannot parse '" + value + "' as an integer");
    return v;
}

bool parse_bool(const std::string& value, const std::string& context, const std::string& key) {
    if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "off" || value == "no") return false;
    bad(context, key + ": cannot parse '" + value + "' as a boolean (use true/false)");
}

struct DoubleField {
    const char* key;
    double PipelineConfig::*member;
    double min;
    bool min_inclusive;
    double max;  // always inclusive; +inf for unbounded
};

struct IntField {
    const char* key;
    int PipelineConfig::*member;
    int min;
};

struct BoolField {
    const char* key;
    bool PipelineConfig::*member;
};

struct StringField {
    const char* key;
    std::string PipelineConfig::*member;
    std::vector<const char*> allowed;  // empty = free-form
};

constexpr double kInf = std::numeric_limits<double>::infinity();

const DoubleField kDoubleFields[] = {
    {"preprocess.voxel_size", &PipelineConfig::preprocess_voxel_size, 0.0, true, kInf},
    {"preprocess.outlier_std_ratio", &PipelineConfig::preprocess_outlier_std_ratio, 0.0, false,
     kInf},
    {"preprocess.plane_distance", &PipelineConfig::preprocess_plane_distance, 0.0, false, kInf},
    {"preprocess.plane_min_inlier_fraction", &PipelineConfig::preprocess_plane_min_inlier_fraction,
     0.0, false, 1.0},
    {"preprocess.crop_max_distance", &PipelineConfig::preprocess_crop_max_distance, 0.0, true,
     kInf},
    {"icp.convergence_delta", &PipelineConfig::icp_convergence_delta, 0.0, true, kInf},
    {"icp.max_correspondence_distance", &PipelineConfig::icp_max_correspondence_distance, 0.0,
     false, kInf},
    {"deviation.threshold_fraction", &PipelineConfig::deviation_threshold_fraction, 0.0, false,
     kInf},
    {"deviation.characteristic_length", &PipelineConfig::deviation_characteristic_length, 0.0,
     true, kInf},
    {"deviation.match_distance", &PipelineConfig::deviation_match_distance, 0.0, true, kInf},
    {"structure.feature_radius", &PipelineConfig::structure_feature_radius, 0.0, false, kInf},
    {"structure.dbscan_eps", &PipelineConfig::structure_dbscan_eps, 0.0, false, kInf},
    {"structure.mixing_angle", &PipelineConfig::structure_mixing_angle, 0.0, false, 90.0},
    {"structure.hybrid_angle", &PipelineConfig::structure_hybrid_angle, 0.0, false, 90.0},
    {"structure.joint_radius", &PipelineConfig::structure_joint_radius, 0.0, false, kInf},
    {"structure.merge_radius", &PipelineConfig::structure_merge_radius, 0.0, false, kInf},
    {"structure.attach_radius", &PipelineConfig::structure_attach_radius, 0.0, false, kInf},
    {"structure.min_brace_length", &PipelineConfig::structure_min_brace_length, 0.0, true, kInf},
    {"structure.vertical_tolerance", &PipelineConfig::structure_vertical_tolerance, 0.0, false,
     45.0},
    {"structure.horizontal_tolerance", &PipelineConfig::structure_horizontal_tolerance, 0.0, false,
     45.0},
    {"graphdiff.node_tolerance", &PipelineConfig::graphdiff_node_tolerance, 0.0, false, kInf},
    {"graphdiff.deviation_tolerance", &PipelineConfig::graphdiff_deviation_tolerance, 0.0, false,
     kInf},
    {"report.alarm_level", &PipelineConfig::report_alarm_level, 0.0, true, 1.0},
    {"synth.bay_width", &PipelineConfig::synth_bay_width, 0.0, false, kInf},
    {"synth.bay_depth", &PipelineConfig::synth_bay_depth, 0.0, false, kInf},
    {"synth.lift_height", &PipelineConfig::synth_lift_height, 0.0, false, kInf},
    {"synth.tube_radius", &PipelineConfig::synth_tube_radius, 0.0, false, kInf},
    {"synth.points_per_meter", &PipelineConfig::synth_points_per_meter, 0.0, false, kInf},
    {"synth.noise_sigma", &PipelineConfig::synth_noise_sigma, 0.0, true, kInf},
    {"synth.wall_standoff", &PipelineConfig::synth_wall_standoff, 0.0, true, kInf},
};

const IntField kIntFields[] = {
    {"preprocess.outlier_k", &PipelineConfig::preprocess_outlier_k, 0},
    {"preprocess.plane_count", &PipelineConfig::preprocess_plane_count, 0},
    {"preprocess.plane_iterations", &PipelineConfig::preprocess_plane_iterations, 1},
    {"icp.max_iterations", &PipelineConfig::icp_max_iterations, 1},
    {"structure.min_neighbors", &PipelineConfig::structure_min_neighbors, 3},
    {"structure.dbscan_min_pts", &PipelineConfig::structure_dbscan_min_pts, 1},
    {"synth.bays_x", &PipelineConfig::synth_bays_x, 1},
    {"synth.bays_y", &PipelineConfig::synth_bays_y, 1},
    {"synth.lifts", &PipelineConfig::synth_lifts, 1},
    {"synth.clutter_points", &PipelineConfig::synth_clutter_points, 0},
};

const BoolField kBoolFields[] = {
    {"icp.centroid_init", &PipelineConfig::icp_centroid_init},
    {"report.include_timestamp", &PipelineConfig::report_include_timestamp},
    {"synth.include_ground", &PipelineConfig::synth_include_ground},
    {"synth.include_wall", &PipelineConfig::synth_include_wall},
};

const StringField kStringFields[] = {
    {"io.reference", &PipelineConfig::io_reference, {}},
    {"io.current", &PipelineConfig::io_current, {}},
    {"io.output_dir", &PipelineConfig::io_output_dir, {}},
    {"io.input_format", &PipelineConfig::io_input_format, {"auto", "ply", "xyz"}},
    {"io.output_format", &PipelineConfig::io_output_format, {"ply_binary", "ply_ascii", "xyz"}},
};

void check_double(const DoubleField& f, double v, const std::string& context) {
    bool ok = (f.min_inclusive ? v >= f.min : v > f.min) && v <= f.max;
    if (!ok) {
        std::string lo = (f.min_inclusive ? ">= " : "> ") + format_double(f.min);
        std::string hi = f.max == kInf ? "" : ", <= " + format_double(f.max);
        bad(context, std::string(f.key) + ": value " + format_double(v) + " out of range (" + lo +
                         hi + ")");
    }
}

}  // namespace

void apply_config_value(PipelineConfig& config, const std::string& key, const std::string& value,
                        const std::string& context) {
    for (const auto& f : kDoubleFields) {
        if (key == f.key) {
            double v = parse_double(value, context, key);
            check_double(f, v, context);
            config.*f.member = v;
            return;
        }
    }
    for (const auto& f : kIntFields) {
        if (key == f.key) {
            long long v = parse_int(value, context, key);
            if (v < f.min || v > std::numeric_limits<int>::max())
                bad(context, key + ": value " + value + " out of range (>= " +
                                 std::to_string(f.min) + ")");
            config.*f.member = static_cast<int>(v);
            return;
        }
    }
    for (const auto& f : kBoolFields) {
        if (key == f.key) {
            config.*f.member = parse_bool(value, context, key);
            return;
        }
    }
    for (const auto& f : kStringFields) {
        if (key == f.key) {
            if (!f.allowed.empty()) {
                bool ok = false;
                for (const char* a : f.allowed) ok = ok || value == a;
                if (!ok) {
                    std::string opts;
                    for (const char* a : f.allowed) opts += std::string(opts.empty() ? "" : ", ") + a;
                    bad(context, key + ": '" + value + "' is not one of {" + opts + "}");
                }
            }
            config.*f.member = value;
            return;
        }
    }
    if (key == "seed") {
        errno = 0;
        char* end = nullptr;
        unsigned long long v = std::strtoull(value.c_str(), &end, 10);
        if (end == value.c_str() || *end != '\0' || errno == ERANGE || value[0] == '-')
            bad(context, "seed: cannot parse '" + value + "' as an unsigned integer");
        config.seed = v;
        return;
    }
    if (key == "synth.defect") {
        if (value.empty()) {
            config.synth_defects.clear();
            return;
        }
        try {
            config.synth_defects.push_back(format_defect(parse_defect(value)));
        } catch (const ConfigError& e) {
            bad(context, std::string("synth.defect: ") + e.what());
        }
        return;
    }
    bad(context, "unknown configuration key '" + key + "'");
}

void load_config_file(PipelineConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::string context = path + ":" + std::to_string(line_no);
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) bad(context, "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) bad(context, "empty key");
        apply_config_value(config, key, value, context);
    }
}

void apply_override(PipelineConfig& config, const std::string& assignment) {
    std::size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("--set " + assignment + ": expected key=value");
    std::string key = trim(assignment.substr(0, eq));
    std::string value = trim(assignment.substr(eq + 1));
    if (key.empty()) throw ConfigError("--set " + assignment + ": empty key");
    apply_config_value(config, key, value, "--set " + key);
}

std::string emit_config(const PipelineConfig& config) {
    std::ostringstream out;
    out << "# effective scaffscan configuration\n";
    out << "seed = " << config.seed << "\n";
    for (const auto& f : kStringFields) out << f.key << " = " << config.*f.member << "\n";
    for (const auto& f : kDoubleFields) out << f.key << " = " << format_double(config.*f.member) << "\n";
    for (const auto& f : kIntFields) out << f.key << " = " << config.*f.member << "\n";
    for (const auto& f : kBoolFields)
        out << f.key << " = " << (config.*f.member ? "true" : "false") << "\n";
    for (const auto& d : config.synth_defects) out << "synth.defect = " << d << "\n";
    return out.str();
}

void PipelineConfig::validate() const {
    for (const auto& f : kDoubleFields) check_double(f, this->*f.member, "config");
    for (const auto& f : kIntFields) {
        if (this->*f.member < f.min)
            bad("config", std::string(f.key) + ": value " + std::to_string(this->*f.member) +
                              " out of range (>= " + std::to_string(f.min) + ")");
    }
    for (const auto& f : kStringFields) {
        if (f.allowed.empty()) continue;
        bool ok = false;
        for (const char* a : f.allowed) ok = ok || this->*f.member == a;
        if (!ok) bad("config", std::string(f.key) + ": invalid value '" + this->*f.member + "'");
    }
    for (const auto& d : synth_defects) parse_defect(d);
}

std::vector<Defect> PipelineConfig::defects() const {
    std::vector<Defect> out;
    out.reserve(synth_defects.size());
    for (const auto& d : synth_defects) out.push_back(parse_defect(d));
    return out;
}

Defect parse_defect(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> tok;
    std::string t;
    while (in >> t) tok.push_back(t);
    auto fail = [&text](const std::string& msg) -> void {
        throw ConfigError("defect '" + text + "': " + msg);
    };
    if (tok.empty()) fail("empty descriptor");

    Defect d;
    std::size_t expect = 0;
    if (tok[0] == "remove_brace") {
        d.kind = DefectKind::RemoveBrace;
        expect = 5;
    } else if (tok[0] == "shift_brace") {
        d.kind = DefectKind::ShiftBrace;
        expect = 8;
    } else if (tok[0] == "shift_joint") {
        d.kind = DefectKind::ShiftJoint;
        expect = 7;
    } else {
        fail("unknown kind '" + tok[0] + "' (remove_brace, shift_brace, shift_joint)");
    }
    if (tok.size() != expect)
        fail("expected " + std::to_string(expect) + " tokens, got " + std::to_string(tok.size()));

    auto to_int = [&fail](const std::string& s) {
        errno = 0;
        char* end = nullptr;
        long v = std::strtol(s.c_str(), &end, 10);
        if (end == s.c_str() || *end != '\0' || errno == ERANGE) fail("bad index '" + s + "'");
        return static_cast<int>(v);
    };
    auto to_dbl = [&fail](const std::string& s) {
        errno = 0;
        char* end = nullptr;
        double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0' || errno == ERANGE) fail("bad number '" + s + "'");
        return v;
    };
    d.node = {to_int(tok[1]), to_int(tok[2]), to_int(tok[3])};
    std::size_t at = 4;
    if (d.kind != DefectKind::ShiftJoint) {
        const std::string& axis = tok[at++];
        if (axis == "x") d.axis = 0;
        else if (axis == "y") d.axis = 1;
        else if (axis == "z") d.axis = 2;
        else fail("bad axis '" + axis + "' (x, y, or z)");
    }
    if (d.kind != DefectKind::RemoveBrace)
        d.displacement = {to_dbl(tok[at]), to_dbl(tok[at + 1]), to_dbl(tok[at + 2])};
    return d;
}

std::string format_defect(const Defect& d) {
    std::ostringstream out;
    switch (d.kind) {
        case DefectKind::RemoveBrace: out << "remove_brace"; break;
        case DefectKind::ShiftBrace: out << "shift_brace"; break;
        case DefectKind::ShiftJoint: out << "shift_joint"; break;
    }
    out << " " << d.node[0] << " " << d.node[1] << " " << d.node[2];
    if (d.kind != DefectKind::ShiftJoint) out << " " << "xyz"[d.axis];
    if (d.kind != DefectKind::RemoveBrace)
        out << " " << format_double(d.displacement.x) << " " << format_double(d.displacement.y)
            << " " << format_double(d.displacement.z);
    return out.str();
}

ScaffoldSpec synth_spec(const PipelineConfig& c) {
    ScaffoldSpec s;
    s.bays_x = c.synth_bays_x;
    s.bays_y = c.synth_bays_y;
    s.lifts = c.synth_lifts;
    s.bay_width = c.synth_bay_width;
    s.bay_depth = c.synth_bay_depth;
    s.lift_height = c.synth_lift_height;
    s.tube_radius = c.synth_tube_radius;
    s.points_per_meter = c.synth_points_per_meter;
    s.noise_sigma = c.synth_noise_sigma;
    s.include_ground = c.synth_include_ground;
    s.include_wall = c.synth_include_wall;
    s.wall_standoff = c.synth_wall_standoff;
    s.clutter_points = c.synth_clutter_points;
    s.seed = c.seed;
    return s;
}

RansacParams ransac_params(const PipelineConfig& c) {
    RansacParams p;
    p.inlier_distance = c.preprocess_plane_distance;
    p.max_iterations = c.preprocess_plane_iterations;
    p.min_inlier_fraction = c.preprocess_plane_min_inlier_fraction;
    p.seed = c.seed;
    return p;
}

IcpParams icp_params(const PipelineConfig& c) {
    IcpParams p;
    p.max_iterations = c.icp_max_iterations;
    p.convergence_delta = c.icp_convergence_delta;
    p.max_correspondence_distance = c.icp_max_correspondence_distance;
    p.centroid_init = c.icp_centroid_init;
    return p;
}

HybridParams hybrid_params(const PipelineConfig& c) {
    HybridParams p;
    p.angle_threshold_deg = c.structure_hybrid_angle;
    p.eps = c.structure_dbscan_eps;
    p.min_pts = c.structure_dbscan_min_pts;
    return p;
}

OrientationTolerances orientation_tolerances(const PipelineConfig& c) {
    OrientationTolerances t;
    t.vertical_deg = c.structure_vertical_tolerance;
    t.horizontal_deg = c.structure_horizontal_tolerance;
    return t;
}

}  // namespace scaffold
