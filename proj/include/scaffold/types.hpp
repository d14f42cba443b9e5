#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace scaffold {

/// Cartesian point/vector in metres. Plain value type; heavier linear
/// algebra converts to Eigen at the call site.
struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Point3() = default;
    Point3(double px, double py, double pz) : x(px), y(py), z(pz) {}

    Point3 operator+(const Point3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Point3 operator-(const Point3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Point3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Point3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Point3& operator+=(const Point3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    Point3 operator-() const { return {-x, -y, -z}; }

    double dot(const Point3& o) const { return x * o.x + y * o.y + z * o.z; }
    Point3 cross(const Point3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double squared_norm() const { return dot(*this); }
    double norm() const { return std::sqrt(squared_norm()); }
    Point3 normalized() const {
        const double n = norm();
        if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
        return *this / n;
    }

    bool operator==(const Point3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline Point3 operator*(double s, const Point3& p) { return p * s; }

inline double squared_distance(const Point3& a, const Point3& b) {
    return (a - b).squared_norm();
}
inline double distance(const Point3& a, const Point3& b) { return std::sqrt(squared_distance(a, b)); }

using Rgb = std::array<std::uint8_t, 3>;

/// Point cloud with optional per-point colors. Either `colors` is empty or
/// it has exactly one entry per point.
struct PointCloud {
    std::vector<Point3> points;
    std::vector<Rgb> colors;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    bool has_colors() const { return !colors.empty(); }

    void check_valid() const {
        if (!colors.empty() && colors.size() != points.size())
            throw std::invalid_argument("color count does not match point count");
    }
};

/// Axis-aligned bounding box.
struct Aabb {
    Point3 min;
    Point3 max;

    Point3 extent() const { return max - min; }
    double diagonal() const { return extent().norm(); }
    Point3 center() const { return (min + max) * 0.5; }
    bool contains(const Point3& p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
               p.z <= max.z;
    }
};

}  // namespace scaffold
