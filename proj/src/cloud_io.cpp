#include "scaffold/cloud_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

namespace scaffold {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error(path + ": " + what);
}

[[noreturn]] void fail_line(const std::string& path, std::size_t line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

struct PlyProperty {
    std::string name;
    std::string type;
    bool is_list = false;
};

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> properties;
};

int scalar_size(const std::string& type) {
    if (type == "char" || type == "int8" || type == "uchar" || type == "uint8") return 1;
    if (type == "short" || type == "int16" || type == "ushort" || type == "uint16") return 2;
    if (type == "int" || type == "int32" || type == "uint" || type == "uint32") return 4;
    if (type == "float" || type == "float32") return 4;
    if (type == "double" || type == "float64") return 8;
    return 0;
}

double parse_scalar_binary(const char* p, const std::string& type) {
    if (type == "float" || type == "float32") {
        float v;
        std::memcpy(&v, p, 4);
        return static_cast<double>(v);
    }
    if (type == "double" || type == "float64") {
        double v;
        std::memcpy(&v, p, 8);
        return v;
    }
    if (type == "uchar" || type == "uint8") {
        return static_cast<double>(*reinterpret_cast<const unsigned char*>(p));
    }
    throw std::runtime_error("unexpected binary scalar type " + type);
}

PointCloud load_ply(const std::string& path, std::ifstream& in) {
    std::string magic;
    std::getline(in, magic);
    if (!magic.empty() && magic.back() == '\r') magic.pop_back();
    if (magic != "ply") fail(path, "not a PLY file (missing 'ply' magic)");

    bool binary = false;
    bool have_format = false;
    std::vector<PlyElement> elements;
    std::size_t line_no = 1;
    std::string line;
    while (true) {
        if (!std::getline(in, line)) fail(path, "unexpected end of file inside PLY header");
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "comment" || kw == "obj_info" || kw.empty()) continue;
        if (kw == "format") {
            std::string fmt, ver;
            ls >> fmt >> ver;
            if (fmt == "ascii")
                binary = false;
            else if (fmt == "binary_little_endian")
                binary = true;
            else
                fail_line(path, line_no, "unsupported PLY format '" + fmt + "'");
            have_format = true;
        } else if (kw == "element") {
            PlyElement el;
            if (!(ls >> el.name >> el.count)) fail_line(path, line_no, "malformed element line");
            elements.push_back(el);
        } else if (kw == "property") {
            if (elements.empty()) fail_line(path, line_no, "property before any element");
            PlyProperty prop;
            std::string t;
            ls >> t;
            if (t == "list") {
                prop.is_list = true;
                std::string ct, vt;
                ls >> ct >> vt >> prop.name;
            } else {
                prop.type = t;
                ls >> prop.name;
            }
            if (prop.name.empty()) fail_line(path, line_no, "malformed property line");
            elements.back().properties.push_back(prop);
        } else if (kw == "end_header") {
            break;
        } else {
            fail_line(path, line_no, "unknown PLY header keyword '" + kw + "'");
        }
    }
    if (!have_format) fail(path, "PLY header missing format line");

    // Locate the vertex element and its x/y/z (+ optional rgb) properties.
    int vertex_el = -1;
    for (std::size_t e = 0; e < elements.size(); ++e)
        if (elements[e].name == "vertex") vertex_el = static_cast<int>(e);
    if (vertex_el < 0) fail(path, "PLY file has no vertex element");

    const PlyElement& vel = elements[vertex_el];
    int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1;
    for (std::size_t p = 0; p < vel.properties.size(); ++p) {
        const PlyProperty& prop = vel.properties[p];
        if (prop.is_list)
            fail(path, "unsupported PLY property layout: list property in vertex element");
        const int i = static_cast<int>(p);
        if (prop.name == "x") ix = i;
        if (prop.name == "y") iy = i;
        if (prop.name == "z") iz = i;
        if (prop.name == "red") ir = i;
        if (prop.name == "green") ig = i;
        if (prop.name == "blue") ib = i;
    }
    auto is_float = [&](int i) {
        const std::string& t = vel.properties[i].type;
        return t == "float" || t == "float32" || t == "double" || t == "float64";
    };
    auto is_uchar = [&](int i) {
        const std::string& t = vel.properties[i].type;
        return t == "uchar" || t == "uint8";
    };
    if (ix < 0 || iy < 0 || iz < 0 || !is_float(ix) || !is_float(iy) || !is_float(iz))
        fail(path, "unsupported PLY property layout: need float32/float64 x, y, z");
    const bool has_rgb = ir >= 0 && ig >= 0 && ib >= 0;
    if (has_rgb && (!is_uchar(ir) || !is_uchar(ig) || !is_uchar(ib)))
        fail(path, "unsupported PLY property layout: colors must be uint8");

    PointCloud cloud;
    cloud.points.reserve(vel.count);
    if (has_rgb) cloud.colors.reserve(vel.count);

    if (!binary) {
        for (int e = 0; e <= vertex_el; ++e) {
            const PlyElement& el = elements[e];
            if (e != vertex_el) {  // skip one line per row
                for (std::size_t r = 0; r < el.count; ++r) {
                    if (!std::getline(in, line))
                        fail(path, "unexpected end of file in element '" + el.name + "'");
                    ++line_no;
                }
                continue;
            }
            const std::size_t nprops = el.properties.size();
            std::vector<double> row(nprops);
            for (std::size_t r = 0; r < el.count; ++r) {
                if (!std::getline(in, line))
                    fail(path, "unexpected end of file: expected " + std::to_string(el.count) +
                                   " vertices, got " + std::to_string(r));
                ++line_no;
                const char* s = line.c_str();
                char* endp = nullptr;
                for (std::size_t p = 0; p < nprops; ++p) {
                    row[p] = std::strtod(s, &endp);
                    if (endp == s) fail_line(path, line_no, "malformed vertex line");
                    s = endp;
                }
                const Point3 pt{row[ix], row[iy], row[iz]};
                if (!std::isfinite(pt.x) || !std::isfinite(pt.y) || !std::isfinite(pt.z))
                    fail_line(path, line_no, "non-finite coordinate");
                cloud.points.push_back(pt);
                if (has_rgb)
                    cloud.colors.push_back({static_cast<std::uint8_t>(row[ir]),
                                            static_cast<std::uint8_t>(row[ig]),
                                            static_cast<std::uint8_t>(row[ib])});
            }
        }
        if (elements.size() > 1)
            std::cerr << path << ": skipping " << elements.size() - 1
                      << " non-vertex PLY element(s)\n";
        return cloud;
    }

    // Binary body: slurp the rest of the stream.
    std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t off = 0;
    for (int e = 0; e <= vertex_el; ++e) {
        const PlyElement& el = elements[e];
        std::size_t stride = 0;
        std::vector<std::size_t> offsets(el.properties.size());
        for (std::size_t p = 0; p < el.properties.size(); ++p) {
            if (el.properties[p].is_list)
                fail(path, "unsupported PLY property layout: cannot skip list property in "
                           "binary element '" + el.name + "'");
            const int sz = scalar_size(el.properties[p].type);
            if (sz == 0)
                fail(path, "unknown PLY property type '" + el.properties[p].type + "'");
            offsets[p] = stride;
            stride += static_cast<std::size_t>(sz);
        }
        if (e != vertex_el) {
            off += stride * el.count;
            continue;
        }
        for (std::size_t r = 0; r < el.count; ++r, off += stride) {
            if (off + stride > body.size())
                fail(path, "truncated PLY body at byte offset " + std::to_string(off) +
                               " (vertex " + std::to_string(r) + " of " +
                               std::to_string(el.count) + ")");
            const char* base = body.data() + off;
            const Point3 pt{parse_scalar_binary(base + offsets[ix], el.properties[ix].type),
                            parse_scalar_binary(base + offsets[iy], el.properties[iy].type),
                            parse_scalar_binary(base + offsets[iz], el.properties[iz].type)};
            if (!std::isfinite(pt.x) || !std::isfinite(pt.y) || !std::isfinite(pt.z))
                fail(path, "non-finite coordinate in vertex " + std::to_string(r));
            cloud.points.push_back(pt);
            if (has_rgb)
                cloud.colors.push_back(
                    {static_cast<std::uint8_t>(parse_scalar_binary(base + offsets[ir], "uchar")),
                     static_cast<std::uint8_t>(parse_scalar_binary(base + offsets[ig], "uchar")),
                     static_cast<std::uint8_t>(parse_scalar_binary(base + offsets[ib], "uchar"))});
        }
    }
    if (elements.size() > 1)
        std::cerr << path << ": skipping " << elements.size() - 1
                  << " non-vertex PLY element(s)\n";
    return cloud;
}

PointCloud load_xyz(const std::string& path, std::ifstream& in) {
    PointCloud cloud;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        const char* s = line.c_str();
        char* endp = nullptr;
        double v[3];
        for (int c = 0; c < 3; ++c) {
            v[c] = std::strtod(s, &endp);
            if (endp == s) fail_line(path, line_no, "expected 3 coordinates");
            s = endp;
        }
        while (*s == ' ' || *s == '\t') ++s;
        if (*s != '\0') fail_line(path, line_no, "trailing data after 3 coordinates");
        if (!std::isfinite(v[0]) || !std::isfinite(v[1]) || !std::isfinite(v[2]))
            fail_line(path, line_no, "non-finite coordinate");
        cloud.points.push_back({v[0], v[1], v[2]});
    }
    return cloud;
}

}  // namespace

PointCloud load_cloud(const std::string& path, LoadFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open file");

    bool ply;
    if (format == LoadFormat::Ply) {
        ply = true;
    } else if (format == LoadFormat::Xyz) {
        ply = false;
    } else if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".ply") == 0) {
        // Auto: decide by extension, falling back to content sniffing.
        ply = true;
    } else if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".xyz") == 0) {
        ply = false;
    } else {
        char magic[3] = {0, 0, 0};
        in.read(magic, 3);
        ply = in.gcount() == 3 && std::strncmp(magic, "ply", 3) == 0;
        in.seekg(0);
    }
    PointCloud cloud = ply ? load_ply(path, in) : load_xyz(path, in);
    cloud.check_valid();
    return cloud;
}

CloudFormat format_for_path(const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".xyz") == 0) return CloudFormat::Xyz;
    return CloudFormat::PlyBinary;
}

void save_cloud(const PointCloud& cloud, const std::string& path, CloudFormat format) {
    cloud.check_valid();
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open file for writing");

    char buf[128];
    if (format == CloudFormat::Xyz) {
        if (cloud.has_colors()) std::cerr << path << ": XYZ format drops point colors\n";
        for (const Point3& p : cloud.points) {
            const int len = std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p.x, p.y, p.z);
            out.write(buf, len);
        }
    } else {
        const bool binary = format == CloudFormat::PlyBinary;
        out << "ply\n"
            << (binary ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n")
            << "element vertex " << cloud.size() << "\n"
            << "property double x\nproperty double y\nproperty double z\n";
        if (cloud.has_colors())
            out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
        out << "end_header\n";
        if (binary) {
            for (std::size_t i = 0; i < cloud.size(); ++i) {
                double v[3] = {cloud.points[i].x, cloud.points[i].y, cloud.points[i].z};
                out.write(reinterpret_cast<const char*>(v), sizeof v);
                if (cloud.has_colors())
                    out.write(reinterpret_cast<const char*>(cloud.colors[i].data()), 3);
            }
        } else {
            for (std::size_t i = 0; i < cloud.size(); ++i) {
                const Point3& p = cloud.points[i];
                int len = std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g", p.x, p.y, p.z);
                if (cloud.has_colors()) {
                    const Rgb& c = cloud.colors[i];
                    len += std::snprintf(buf + len, sizeof buf - len, " %d %d %d", c[0], c[1],
                                         c[2]);
                }
                buf[len++] = '\n';
                out.write(buf, len);
            }
        }
    }
    if (!out) fail(path, "write failed");
}

}  // namespace scaffold
