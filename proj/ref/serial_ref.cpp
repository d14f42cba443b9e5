#include "serial_ref.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <tuple>

namespace scaffref {

inline constexpr double kPi = 3.14159265358979323846;

using scaffold::Point3;
using scaffold::PointCloud;

namespace {

inline double sqdist(const Point3& a, const Point3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

}  // namespace

int nearest_brute(const std::vector<Point3>& points, const Point3& query) {
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double d2 = sqdist(points[i], query);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = static_cast<int>(i);
        }
    }
    return best;
}

std::vector<std::pair<double, int>> knn_brute(const std::vector<Point3>& points,
                                              const Point3& query, int k) {
    std::vector<std::pair<double, int>> all;
    all.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        all.emplace_back(sqdist(points[i], query), static_cast<int>(i));
    std::sort(all.begin(), all.end());
    if (static_cast<int>(all.size()) > k) all.resize(k);
    for (auto& [d2, i] : all) d2 = std::sqrt(d2);
    return all;
}

std::vector<int> radius_brute(const std::vector<Point3>& points, const Point3& query, double r) {
    const double r2 = r * r;
    std::vector<int> out;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (sqdist(points[i], query) <= r2) out.push_back(static_cast<int>(i));
    return out;
}

std::size_t voxel_cell_count(const std::vector<Point3>& points, double voxel_size) {
    std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, int> cells;
    for (const Point3& p : points)
        cells[{static_cast<std::int64_t>(std::floor(p.x / voxel_size)),
               static_cast<std::int64_t>(std::floor(p.y / voxel_size)),
               static_cast<std::int64_t>(std::floor(p.z / voxel_size))}] = 1;
    return cells.size();
}

PointCloud voxel_serial(const PointCloud& cloud, double voxel_size) {
    struct Cell {
        double sx = 0.0, sy = 0.0, sz = 0.0;
        double cr = 0.0, cg = 0.0, cb = 0.0;
        int n = 0;
    };
    // Visiting points in index order keeps per-cell summation in ascending
    // index order; the map keeps cells in ascending key order.
    std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, Cell> cells;
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        const Point3& p = cloud.points[i];
        Cell& c = cells[{static_cast<std::int64_t>(std::floor(p.x / voxel_size)),
                         static_cast<std::int64_t>(std::floor(p.y / voxel_size)),
                         static_cast<std::int64_t>(std::floor(p.z / voxel_size))}];
        c.sx += p.x;
        c.sy += p.y;
        c.sz += p.z;
        if (cloud.has_colors()) {
            c.cr += cloud.colors[i][0];
            c.cg += cloud.colors[i][1];
            c.cb += cloud.colors[i][2];
        }
        ++c.n;
    }
    PointCloud out;
    for (const auto& [key, c] : cells) {
        (void)key;
        const double m = static_cast<double>(c.n);
        out.points.push_back({c.sx / m, c.sy / m, c.sz / m});
        if (cloud.has_colors())
            out.colors.push_back({static_cast<std::uint8_t>(std::llround(c.cr / m)),
                                  static_cast<std::uint8_t>(std::llround(c.cg / m)),
                                  static_cast<std::uint8_t>(std::llround(c.cb / m))});
    }
    return out;
}

std::vector<double> mean_knn_distance_serial(const std::vector<Point3>& points, int k) {
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto nn = knn_brute(points, points[i], k + 1);
        double sum = 0.0;
        int used = 0;
        for (const auto& [d, j] : nn) {
            if (j == static_cast<int>(i)) continue;
            if (used == k) break;
            sum += d;
            ++used;
        }
        out[i] = sum / static_cast<double>(used);
    }
    return out;
}

std::vector<int> outlier_keep_serial(const std::vector<Point3>& points, int k, double std_ratio) {
    const std::vector<double> means = mean_knn_distance_serial(points, k);
    const double n = static_cast<double>(points.size());
    double mean = 0.0;
    for (double m : means) mean += m;
    mean /= n;
    double var = 0.0;
    for (double m : means) {
        const double d = m - mean;
        var += d * d;
    }
    var /= n;
    const double threshold = mean + std_ratio * std::sqrt(var);
    std::vector<int> keep;
    for (std::size_t i = 0; i < means.size(); ++i)
        if (means[i] <= threshold) keep.push_back(static_cast<int>(i));
    return keep;
}

std::vector<double> cloud_distances_serial(const std::vector<Point3>& current,
                                           const std::vector<Point3>& reference) {
    std::vector<double> out(current.size());
    for (std::size_t i = 0; i < current.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const Point3& r : reference) best = std::min(best, sqdist(current[i], r));
        out[i] = std::sqrt(best);
    }
    return out;
}

int count_plane_inliers(const std::vector<Point3>& points, const Point3& n, double d,
                        double tolerance) {
    int count = 0;
    for (const Point3& p : points) {
        const double dist = n.x * p.x + n.y * p.y + n.z * p.z + d;
        if (std::abs(dist) <= tolerance) ++count;
    }
    return count;
}

std::pair<double, int> alignment_error_brute(const std::vector<Point3>& reference,
                                             const std::vector<Point3>& current,
                                             const std::array<double, 9>& rotation,
                                             const std::array<double, 3>& translation,
                                             double max_distance) {
    const double max_d2 = max_distance * max_distance;
    double sum = 0.0;
    int count = 0;
    for (const Point3& p : current) {
        const Point3 q = {
            rotation[0] * p.x + rotation[1] * p.y + rotation[2] * p.z + translation[0],
            rotation[3] * p.x + rotation[4] * p.y + rotation[5] * p.z + translation[1],
            rotation[6] * p.x + rotation[7] * p.y + rotation[8] * p.z + translation[2]};
        double best = std::numeric_limits<double>::infinity();
        for (const Point3& r : reference) best = std::min(best, sqdist(q, r));
        if (best <= max_d2) {
            sum += best;
            ++count;
        }
    }
    return {count > 0 ? sum / static_cast<double>(count) : 0.0, count};
}

std::pair<int, int> farthest_pair_brute(const std::vector<Point3>& points,
                                        const std::vector<int>& subset) {
    std::pair<int, int> best{-1, -1};
    double best_d2 = -1.0;
    for (std::size_t a = 0; a + 1 < subset.size(); ++a) {
        for (std::size_t b = a + 1; b < subset.size(); ++b) {
            const double d2 = sqdist(points[subset[a]], points[subset[b]]);
            if (d2 > best_d2) {
                best_d2 = d2;
                best = {subset[a], subset[b]};
            }
        }
    }
    return best;
}

std::array<double, 3> sym3_eigenvalues(const std::array<double, 6>& m) {
    const double a11 = m[0], a12 = m[1], a13 = m[2], a22 = m[3], a23 = m[4], a33 = m[5];
    const double p1 = a12 * a12 + a13 * a13 + a23 * a23;
    if (p1 == 0.0) {
        std::array<double, 3> e = {a11, a22, a33};
        std::sort(e.begin(), e.end(), std::greater<double>());
        return e;
    }
    const double q = (a11 + a22 + a33) / 3.0;
    const double p2 =
        (a11 - q) * (a11 - q) + (a22 - q) * (a22 - q) + (a33 - q) * (a33 - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    // B = (A - qI) / p; r = det(B) / 2 in [-1, 1] up to rounding.
    const double b11 = (a11 - q) / p, b22 = (a22 - q) / p, b33 = (a33 - q) / p;
    const double b12 = a12 / p, b13 = a13 / p, b23 = a23 / p;
    double r = (b11 * (b22 * b33 - b23 * b23) - b12 * (b12 * b33 - b23 * b13) +
                b13 * (b12 * b23 - b22 * b13)) /
               2.0;
    r = std::max(-1.0, std::min(1.0, r));
    const double phi = std::acos(r) / 3.0;
    const double e1 = q + 2.0 * p * std::cos(phi);
    const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * kPi / 3.0);
    const double e2 = 3.0 * q - e1 - e3;
    return {e1, e2, e3};
}

std::vector<std::pair<int, int>> assignment_brute(const std::vector<Point3>& reference,
                                                  const std::vector<Point3>& current,
                                                  double tolerance) {
    const int nr = static_cast<int>(reference.size());
    const int nc = static_cast<int>(current.size());
    std::vector<std::pair<int, int>> best, cur;
    int best_count = -1;
    double best_total = std::numeric_limits<double>::infinity();
    std::vector<bool> used(nc, false);

    // Depth-first over reference nodes; each either pairs with an unused
    // current node within tolerance or stays unmatched.
    auto recurse = [&](auto&& self, int i, double total) -> void {
        if (i == nr) {
            const int count = static_cast<int>(cur.size());
            if (count > best_count || (count == best_count && total < best_total)) {
                best_count = count;
                best_total = total;
                best = cur;
            }
            return;
        }
        for (int j = 0; j < nc; ++j) {
            if (used[j]) continue;
            const double d = std::sqrt(sqdist(reference[i], current[j]));
            if (d > tolerance) continue;
            used[j] = true;
            cur.emplace_back(i, j);
            self(self, i + 1, total + d);
            cur.pop_back();
            used[j] = false;
        }
        self(self, i + 1, total);
    };
    recurse(recurse, 0, 0.0);
    std::sort(best.begin(), best.end());
    return best;
}

}  // namespace scaffref
