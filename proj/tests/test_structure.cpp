#include <doctest.h>

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <tuple>

#include "scaffold/braces.hpp"
#include "scaffold/cloud_io.hpp"
#include "scaffold/dbscan.hpp"
#include "scaffold/features.hpp"
#include "scaffold/graph.hpp"
#include "serial_ref.hpp"
#include "test_helpers.hpp"

using namespace scaffold;
using testutil::random_cloud;
using testutil::TempDir;

namespace {

Cluster whole_cloud_cluster(const PointCloud& c) {
    Cluster cl;
    cl.label = 0;
    for (std::size_t i = 0; i < c.size(); ++i) cl.point_indices.push_back(static_cast<int>(i));
    return cl;
}

// Independent covariance eigen-decomposition of a radius neighborhood.
std::array<double, 3> neighborhood_eigen_ratios(const PointCloud& c, const SpatialIndex& index,
                                                int i, double radius) {
    auto nb = index.radius(c.points[i], radius);
    Point3 mean{0, 0, 0};
    for (int j : nb) mean = mean + c.points[j];
    mean = mean * (1.0 / static_cast<double>(nb.size()));
    std::array<double, 6> m{};  // xx, xy, xz, yy, yz, zz
    for (int j : nb) {
        Point3 d = c.points[j] - mean;
        m[0] += d.x * d.x;
        m[1] += d.x * d.y;
        m[2] += d.x * d.z;
        m[3] += d.y * d.y;
        m[4] += d.y * d.z;
        m[5] += d.z * d.z;
    }
    auto ev = scaffref::sym3_eigenvalues(m);
    // Return scale-free ratios so the covariance normalization cancels.
    return {(ev[0] - ev[1]) / ev[0], (ev[1] - ev[2]) / ev[0], ev[2] / ev[0]};
}

}  // namespace

TEST_SUITE_BEGIN("structure");

// ---------------------------------------------------------------------------
// Shape features

TEST_CASE("line, plane and ball neighborhoods produce the expected descriptors") {
    std::mt19937_64 rng(401);
    PointCloud line;
    testutil::add_line(line, {0, 0, 0}, {2, 0, 0}, 400, rng, 0.003);
    SpatialIndex li(line);
    auto lf = shape_features(line, li, 0.15, 8);
    REQUIRE(lf.size() == line.size());
    const ShapeFeatures& f200 = lf[200];
    REQUIRE(f200.valid);
    CHECK(f200.linearity > 0.95);
    CHECK(std::abs(f200.principal_direction.x) > 0.999);
    CHECK(f200.neighbor_count >= 8);

    PointCloud plane;
    testutil::add_plane_patch(plane, {0, 0, 1}, 1.0, 1500, rng);
    SpatialIndex pi(plane);
    auto pf = shape_features(plane, pi, 0.2, 8);
    REQUIRE(pf[700].valid);
    CHECK(pf[700].planarity > 0.6);
    CHECK(classify_shape(pf[700]) == ShapeClass::Planar);

    // Judge the ball at its most interior point so the neighborhood is a
    // full sphere rather than a clipped dome.
    PointCloud ball;
    testutil::add_ball(ball, {0, 0, 0}, 0.5, 2000, rng);
    SpatialIndex bi(ball);
    int center = scaffref::nearest_brute(ball.points, {0, 0, 0});
    auto bf = shape_features(ball, bi, 0.25, 8);
    REQUIRE(bf[center].valid);
    CHECK(bf[center].sphericity > 0.5);
    CHECK(classify_shape(bf[center]) == ShapeClass::Spherical);
}

TEST_CASE("descriptors sum to one and match an independent eigen solver") {
    PointCloud c = random_cloud(300, 402, 0.5);
    SpatialIndex index(c);
    const double radius = 0.3;
    auto feats = shape_features(c, index, radius, 5);
    int checked = 0;
    for (std::size_t i = 0; i < feats.size(); ++i) {
        if (!feats[i].valid) continue;
        const ShapeFeatures& f = feats[i];
        CHECK(f.linearity + f.planarity + f.sphericity == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(f.eigenvalues[0] >= f.eigenvalues[1]);
        CHECK(f.eigenvalues[1] >= f.eigenvalues[2]);
        CHECK(f.eigenvalues[2] >= -1e-12);

        auto ratios = neighborhood_eigen_ratios(c, index, static_cast<int>(i), radius);
        CHECK(f.linearity == doctest::Approx(ratios[0]).epsilon(1e-9));
        CHECK(f.planarity == doctest::Approx(ratios[1]).epsilon(1e-9));
        CHECK(f.sphericity == doctest::Approx(ratios[2]).epsilon(1e-9));
        ++checked;
    }
    CHECK(checked > 250);
}

TEST_CASE("descriptors are invariant under rigid motion") {
    PointCloud c = random_cloud(200, 403, 0.5);
    Eigen::Matrix3d rot =
        Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
    PointCloud moved;
    for (const Point3& p : c.points) {
        Eigen::Vector3d v = rot * Eigen::Vector3d(p.x, p.y, p.z) + Eigen::Vector3d(5, -3, 2);
        moved.points.push_back({v.x(), v.y(), v.z()});
    }
    SpatialIndex ia(c), ib(moved);
    auto fa = shape_features(c, ia, 0.3, 5);
    auto fb = shape_features(moved, ib, 0.3, 5);
    for (std::size_t i = 0; i < fa.size(); ++i) {
        if (!fa[i].valid) continue;
        REQUIRE(fb[i].valid);
        CHECK(fa[i].linearity == doctest::Approx(fb[i].linearity).epsilon(1e-7));
        CHECK(fa[i].planarity == doctest::Approx(fb[i].planarity).epsilon(1e-7));
        // Principal direction rotates along (up to the canonical sign).
        Eigen::Vector3d da(fa[i].principal_direction.x, fa[i].principal_direction.y,
                           fa[i].principal_direction.z);
        Eigen::Vector3d db(fb[i].principal_direction.x, fb[i].principal_direction.y,
                           fb[i].principal_direction.z);
        CHECK(std::abs((rot * da).dot(db)) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("sparse or degenerate neighborhoods are invalid") {
    PointCloud c;
    c.points.push_back({0, 0, 0});
    c.points.push_back({10, 0, 0});
    c.points.push_back({20, 0, 0});
    SpatialIndex index(c);
    auto f = shape_features(c, index, 0.5, 3);
    CHECK(!f[0].valid);
    CHECK(classify_shape(f[0]) == ShapeClass::Unclassified);

    // Eight coincident points: enough neighbors but zero spread.
    PointCloud co;
    for (int i = 0; i < 8; ++i) co.points.push_back({1, 1, 1});
    SpatialIndex ci(co);
    auto cf = shape_features(co, ci, 0.5, 3);
    CHECK(!cf[0].valid);

    CHECK_THROWS_AS(shape_features(c, index, 0.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(shape_features(c, index, 0.5, 2), std::invalid_argument);
}

TEST_CASE("shape classification picks the largest descriptor, ties lean linear") {
    ShapeFeatures f;
    f.valid = true;
    f.linearity = 0.8;
    f.planarity = 0.15;
    f.sphericity = 0.05;
    CHECK(classify_shape(f) == ShapeClass::Linear);

    f.linearity = f.planarity = f.sphericity = 1.0 / 3.0;
    CHECK(classify_shape(f) == ShapeClass::Linear);

    f.linearity = 0.2;
    f.planarity = 0.5;
    f.sphericity = 0.3;
    CHECK(classify_shape(f) == ShapeClass::Planar);

    f.linearity = 0.2;
    f.planarity = 0.4;
    f.sphericity = 0.4;
    CHECK(classify_shape(f) == ShapeClass::Planar);  // planar beats spherical on ties

    f.linearity = 0.1;
    f.planarity = 0.2;
    f.sphericity = 0.7;
    CHECK(classify_shape(f) == ShapeClass::Spherical);

    f.valid = false;
    CHECK(classify_shape(f) == ShapeClass::Unclassified);

    CHECK(std::string(to_string(ShapeClass::Linear)) == "linear");
    CHECK(std::string(to_string(ShapeClass::Unclassified)) == "unclassified");
}

TEST_CASE("classify_points maps features elementwise") {
    std::mt19937_64 rng(404);
    PointCloud line;
    testutil::add_line(line, {0, 0, 0}, {1, 0, 0}, 300, rng, 0.002);
    SpatialIndex index(line);
    auto feats = shape_features(line, index, 0.1, 5);
    auto classes = classify_points(feats);
    REQUIRE(classes.size() == feats.size());
    int linear = 0;
    for (auto c : classes) linear += c == ShapeClass::Linear;
    CHECK(linear > 280);
}

// ---------------------------------------------------------------------------
// DBSCAN

TEST_CASE("dbscan separates blobs and flags stragglers as noise") {
    PointCloud c;
    std::mt19937_64 rng(405);
    testutil::add_ball(c, {0, 0, 0}, 0.2, 150, rng);
    testutil::add_ball(c, {3, 0, 0}, 0.2, 120, rng);
    c.points.push_back({10, 10, 10});

    DbscanResult r = dbscan(c, 0.15, 5);
    REQUIRE(r.clusters.size() == 2);
    CHECK(r.labels.size() == c.size());
    CHECK(r.labels.back() == kNoise);
    CHECK(r.clusters[0].size() == 150);
    CHECK(r.clusters[1].size() == 120);
    for (std::size_t k = 0; k < r.clusters.size(); ++k) {
        const Cluster& cl = r.clusters[k];
        CHECK(cl.label == static_cast<int>(k));
        CHECK(std::is_sorted(cl.point_indices.begin(), cl.point_indices.end()));
        for (int idx : cl.point_indices) CHECK(r.labels[idx] == cl.label);
    }

    DbscanResult again = dbscan(c, 0.15, 5);
    CHECK(again.labels == r.labels);
}

TEST_CASE("dbscan neighborhood counting includes the point itself") {
    PointCloud c;
    c.points.push_back({0, 0, 0});
    c.points.push_back({1, 0, 0});  // exactly eps apart
    DbscanResult r = dbscan(c, 1.0, 2);
    REQUIRE(r.clusters.size() == 1);
    CHECK(r.clusters[0].size() == 2);

    // min_pts above attainable density: everything is noise.
    DbscanResult noise = dbscan(c, 1.0, 3);
    CHECK(noise.clusters.empty());
    CHECK(noise.labels[0] == kNoise);

    CHECK_THROWS_AS(dbscan(c, 0.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(dbscan(c, 1.0, 0), std::invalid_argument);
}

TEST_CASE("a chain of eps-spaced points forms one cluster") {
    // 0.125 steps are exact in binary, so every gap is exactly eps.
    PointCloud c;
    for (int i = 0; i < 20; ++i) c.points.push_back({0.125 * i, 0, 0});
    DbscanResult r = dbscan(c, 0.125, 2);
    REQUIRE(r.clusters.size() == 1);
    CHECK(r.clusters[0].size() == 20);
}

// ---------------------------------------------------------------------------
// Direction mixing

TEST_CASE("folded angles treat opposite directions as parallel") {
    CHECK(folded_angle_deg({0, 0, 1}, {0, 0, -1}) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(folded_angle_deg({1, 0, 0}, {0, 1, 0}) == doctest::Approx(90.0).epsilon(1e-12));
    double s = 1.0 / std::sqrt(2.0);
    CHECK(folded_angle_deg({1, 0, 0}, {s, s, 0}) == doctest::Approx(45.0).epsilon(1e-10));
}

TEST_CASE("mixed-direction detection") {
    Point3 z{0, 0, 1};
    Point3 x{1, 0, 0};
    Point3 zneg{0, 0, -1};
    CHECK(detect_mixed_cluster({z, x}, 25.0));
    CHECK(!detect_mixed_cluster({z, z, zneg}, 25.0));  // sign folding
    CHECK(!detect_mixed_cluster({z}, 25.0));
    CHECK(!detect_mixed_cluster({}, 25.0));

    // 45 degrees apart: mixed below the threshold, not above it.
    double s = 1.0 / std::sqrt(2.0);
    Point3 diag{s, 0, s};
    CHECK(detect_mixed_cluster({z, diag}, 44.9));
    CHECK(!detect_mixed_cluster({z, diag}, 45.1));
}

// ---------------------------------------------------------------------------
// Hybrid direction/space clustering on junction fixtures

namespace {

struct JunctionFixture {
    PointCloud cloud;
    std::vector<int> truth;  ///< tube id per point
    std::vector<ShapeFeatures> features;
    Cluster cluster;
};

JunctionFixture make_fixture(const std::vector<std::pair<Point3, Point3>>& tubes,
                             std::uint64_t seed) {
    JunctionFixture fx;
    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < tubes.size(); ++t) {
        std::size_t n = 200;
        testutil::add_line(fx.cloud, tubes[t].first, tubes[t].second, n, rng, 0.002);
        for (std::size_t i = 0; i < n; ++i) fx.truth.push_back(static_cast<int>(t));
    }
    SpatialIndex index(fx.cloud);
    fx.features = shape_features(fx.cloud, index, 0.05, 5);
    fx.cluster = whole_cloud_cluster(fx.cloud);
    return fx;
}

// Majority tube id of a subcluster and its purity fraction.
std::pair<int, double> majority(const std::vector<int>& truth, const Cluster& sub) {
    std::map<int, int> counts;
    for (int i : sub.point_indices) ++counts[truth[i]];
    int best = -1, bestn = 0, total = 0;
    for (auto& [id, n] : counts) {
        total += n;
        if (n > bestn) {
            best = id;
            bestn = n;
        }
    }
    return {best, static_cast<double>(bestn) / total};
}

}  // namespace

TEST_CASE("an L junction splits into two unmixed subclusters") {
    // Two perpendicular lines whose axes stop short of the corner, the way
    // scaffold tubes meet at a coupler.
    JunctionFixture fx = make_fixture({{{0.06, 0, 0}, {1, 0, 0}}, {{0, 0.06, 0}, {0, 1, 0}}}, 406);

    // The whole cluster is direction-mixed.
    std::vector<Point3> dirs;
    for (const auto& f : fx.features)
        if (f.valid) dirs.push_back(f.principal_direction);
    CHECK(detect_mixed_cluster(dirs, 25.0));

    HybridParams params;
    params.angle_threshold_deg = 30.0;
    params.eps = 0.05;
    params.min_pts = 5;
    auto subs = hybrid_cluster(fx.cloud, fx.cluster, fx.features, params);
    REQUIRE(subs.size() == 2);
    std::set<int> seen;
    for (const Cluster& sub : subs) {
        auto [tube, purity] = majority(fx.truth, sub);
        CHECK(purity > 0.95);
        seen.insert(tube);
        // Each subcluster is direction-pure.
        std::vector<Point3> sdirs;
        for (int i : sub.point_indices)
            if (fx.features[i].valid) sdirs.push_back(fx.features[i].principal_direction);
        CHECK(!detect_mixed_cluster(sdirs, 25.0));
        CHECK(std::is_sorted(sub.point_indices.begin(), sub.point_indices.end()));
    }
    CHECK(seen.size() == 2);
}

TEST_CASE("a T junction with a continuous bar yields two subclusters") {
    JunctionFixture fx =
        make_fixture({{{0, 0, 0}, {1, 0, 0}}, {{0.5, 0.06, 0}, {0.5, 1, 0}}}, 407);
    HybridParams params;
    params.angle_threshold_deg = 30.0;
    params.eps = 0.05;
    params.min_pts = 5;
    auto subs = hybrid_cluster(fx.cloud, fx.cluster, fx.features, params);
    REQUIRE(subs.size() == 2);
}

TEST_CASE("a T junction with an interrupted bar yields three subclusters") {
    // The bar stops on both sides of the stem; the spatial pass must keep the
    // two halves apart because the gap exceeds eps.
    JunctionFixture fx = make_fixture({{{0, 0, 0}, {0.42, 0, 0}},
                                       {{0.58, 0, 0}, {1, 0, 0}},
                                       {{0.5, 0.06, 0}, {0.5, 1, 0}}},
                                      408);
    HybridParams params;
    params.angle_threshold_deg = 30.0;
    params.eps = 0.05;
    params.min_pts = 5;
    auto subs = hybrid_cluster(fx.cloud, fx.cluster, fx.features, params);
    REQUIRE(subs.size() == 3);
    std::set<int> seen;
    for (const Cluster& sub : subs) seen.insert(majority(fx.truth, sub).first);
    CHECK(seen.size() == 3);
}

TEST_CASE("a single straight tube passes through hybrid clustering whole") {
    JunctionFixture fx = make_fixture({{{0, 0, 0}, {1, 0, 0}}}, 409);
    HybridParams params;
    params.eps = 0.05;
    params.min_pts = 5;
    auto subs = hybrid_cluster(fx.cloud, fx.cluster, fx.features, params);
    REQUIRE(subs.size() == 1);
    CHECK(subs[0].size() > 190);  // only density outliers may drop

    HybridParams bad;
    bad.angle_threshold_deg = 0.0;
    CHECK_THROWS_AS(hybrid_cluster(fx.cloud, fx.cluster, fx.features, bad),
                    std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Brace extraction

TEST_CASE("collinear points reduce to the farthest pair") {
    PointCloud c;
    for (double x : {0.0, 0.3, 0.7, 1.0}) c.points.push_back({x, 0, 0});
    BraceSegment b = extract_brace(c, whole_cloud_cluster(c));
    CHECK(b.endpoint_a.x == 0.0);
    CHECK(b.endpoint_b.x == 1.0);
    CHECK(b.length == 1.0);
    CHECK(b.direction.x == 1.0);
    CHECK(b.orientation == Orientation::HorizontalX);
}

TEST_CASE("brace endpoints are ordered lexicographically") {
    PointCloud c;
    c.points.push_back({1, 1, 1});
    c.points.push_back({0, 2, 2});
    BraceSegment b = extract_brace(c, whole_cloud_cluster(c));
    CHECK(b.endpoint_a.x == 0.0);
    CHECK(b.endpoint_b.x == 1.0);
    CHECK(b.direction.x > 0.0);
    CHECK(b.length == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
}

TEST_CASE("brace extraction failure modes") {
    PointCloud one;
    one.points.push_back({0, 0, 0});
    CHECK_THROWS_WITH_AS(extract_brace(one, whole_cloud_cluster(one)),
                         doctest::Contains("at least 2 points"), std::invalid_argument);
    PointCloud same;
    same.points.push_back({1, 2, 3});
    same.points.push_back({1, 2, 3});
    CHECK_THROWS_WITH_AS(extract_brace(same, whole_cloud_cluster(same)),
                         doctest::Contains("coincide"), std::invalid_argument);
}

TEST_CASE("small-cluster extraction matches the exhaustive farthest pair") {
    for (std::uint64_t seed : {410u, 411u}) {
        PointCloud c = random_cloud(500, seed);
        Cluster cl = whole_cloud_cluster(c);
        BraceSegment b = extract_brace(c, cl);
        auto [i, j] = scaffref::farthest_pair_brute(c.points, cl.point_indices);
        Point3 pa = c.points[i], pb = c.points[j];
        if (std::tie(pb.x, pb.y, pb.z) < std::tie(pa.x, pa.y, pa.z)) std::swap(pa, pb);
        CHECK(distance(b.endpoint_a, pa) == 0.0);
        CHECK(distance(b.endpoint_b, pb) == 0.0);
        CHECK(b.length == distance(pa, pb));
    }
}

TEST_CASE("large elongated clusters use the projection shortcut exactly") {
    PointCloud c;
    std::mt19937_64 rng(412);
    testutil::add_line(c, {0, 0, 0}, {0.3, 0.1, 2.0}, 2500, rng, 0.01);
    Cluster cl = whole_cloud_cluster(c);
    BraceSegment b = extract_brace(c, cl);
    auto [i, j] = scaffref::farthest_pair_brute(c.points, cl.point_indices);
    CHECK(b.length == distance(c.points[i], c.points[j]));
    CHECK(b.orientation == Orientation::Vertical);
}

TEST_CASE("orientation classification against the axes") {
    CHECK(classify_orientation({0, 0, 1}) == Orientation::Vertical);
    CHECK(classify_orientation({0, 0, -1}) == Orientation::Vertical);
    CHECK(classify_orientation({1, 0, 0}) == Orientation::HorizontalX);
    CHECK(classify_orientation({0, 1, 0}) == Orientation::HorizontalY);
    double s = 1.0 / std::sqrt(2.0);
    CHECK(classify_orientation({s, s, 0}) == Orientation::Diagonal);
    CHECK(classify_orientation({s, 0, s}) == Orientation::Diagonal);

    // 10 degrees off vertical stays vertical at the default 15 degree
    // tolerance but not at 5 degrees.
    Point3 tilt{std::sin(10.0 * M_PI / 180.0), 0, std::cos(10.0 * M_PI / 180.0)};
    CHECK(classify_orientation(tilt) == Orientation::Vertical);
    OrientationTolerances strict;
    strict.vertical_deg = 5.0;
    CHECK(classify_orientation(tilt, strict) == Orientation::Diagonal);

    CHECK(std::string(to_string(Orientation::HorizontalX)) == "horizontal_x");
    CHECK(std::string(to_string(Orientation::Diagonal)) == "diagonal");
}

// ---------------------------------------------------------------------------
// Joints and graph assembly

namespace {

BraceSegment make_brace(const Point3& a, const Point3& b) {
    BraceSegment s;
    s.endpoint_a = a;
    s.endpoint_b = b;
    Point3 d = b - a;
    s.length = d.norm();
    s.direction = d * (1.0 / s.length);
    s.orientation = classify_orientation(s.direction);
    return s;
}

}  // namespace

TEST_CASE("shared brace endpoints merge into one joint") {
    std::vector<BraceSegment> braces = {make_brace({0, 0, 0}, {1, 0, 0}),
                                        make_brace({1, 0, 0}, {1, 1, 0})};
    PointCloud corners;
    corners.points.push_back({0, 0, 0});
    corners.points.push_back({1, 0, 0});
    corners.points.push_back({1, 1, 0});
    SpatialIndex index(corners);
    JointFormation jf = form_joints(braces, corners, index, 0.05, 0.1);
    REQUIRE(jf.joints.size() == 3);
    REQUIRE(jf.brace_joints.size() == 2);
    CHECK(jf.brace_joints[0].second == jf.brace_joints[1].first);
    CHECK(jf.brace_joints[0].first != jf.brace_joints[0].second);
}

TEST_CASE("joint candidates average the nearby cloud points") {
    std::vector<BraceSegment> braces = {make_brace({0, 0, 0}, {1, 0, 0})};
    PointCloud c;
    c.points.push_back({0.02, 0, 0});
    c.points.push_back({-0.02, 0, 0});
    c.points.push_back({1.0, 0.04, 0});
    c.points.push_back({1.0, -0.04, 0});
    SpatialIndex index(c);
    JointFormation jf = form_joints(braces, c, index, 0.06, 0.1);
    REQUIRE(jf.joints.size() == 2);
    const Point3& a = jf.joints[jf.brace_joints[0].first];
    const Point3& b = jf.joints[jf.brace_joints[0].second];
    CHECK(distance(a, {0, 0, 0}) < 1e-12);
    CHECK(distance(b, {1, 0, 0}) < 1e-12);
}

TEST_CASE("an endpoint with no cloud support becomes its own joint") {
    std::vector<BraceSegment> braces = {make_brace({5, 5, 5}, {6, 5, 5})};
    PointCloud far;
    far.points.push_back({0, 0, 0});
    SpatialIndex index(far);
    JointFormation jf = form_joints(braces, far, index, 0.05, 0.1);
    REQUIRE(jf.joints.size() == 2);
    CHECK(distance(jf.joints[jf.brace_joints[0].first], {5, 5, 5}) == 0.0);
}

TEST_CASE("two braces meeting at a corner build an L graph") {
    std::vector<BraceSegment> braces = {make_brace({0, 0, 0}, {1, 0, 0}),
                                        make_brace({1, 0, 0}, {1, 0, 1})};
    PointCloud corners;
    corners.points.push_back({0, 0, 0});
    corners.points.push_back({1, 0, 0});
    corners.points.push_back({1, 0, 1});
    SpatialIndex index(corners);
    JointFormation jf = form_joints(braces, corners, index, 0.05, 0.1);
    GraphBuild gb = build_graph(braces, jf, 0.1);
    gb.graph.check_valid();
    REQUIRE(gb.graph.nodes.size() == 3);
    REQUIRE(gb.graph.edges.size() == 2);
    CHECK(gb.dropped_degenerate_braces == 0);
    CHECK(gb.merged_duplicate_edges == 0);
    for (const auto& e : gb.graph.edges) {
        CHECK(e.a < e.b);
        CHECK(e.length == doctest::Approx(1.0).epsilon(1e-12));
    }
    // One horizontal, one vertical edge.
    int verticals = 0;
    for (const auto& e : gb.graph.edges) verticals += e.orientation == Orientation::Vertical;
    CHECK(verticals == 1);
}

TEST_CASE("braces collapsing to a single joint are dropped") {
    // Both endpoints merge (merge_radius exceeds the brace length).
    std::vector<BraceSegment> braces = {make_brace({0, 0, 0}, {0.05, 0, 0})};
    PointCloud c;
    c.points.push_back({0, 0, 0});
    SpatialIndex index(c);
    JointFormation jf = form_joints(braces, c, index, 0.01, 0.2);
    GraphBuild gb = build_graph(braces, jf, 0.1);
    CHECK(gb.graph.edges.empty());
    CHECK(gb.dropped_degenerate_braces == 1);
    // The nodes of a dropped brace carry no edges and disappear.
    CHECK(gb.graph.nodes.empty());
}

TEST_CASE("duplicate braces merge into one edge") {
    std::vector<BraceSegment> braces = {make_brace({0, 0, 0}, {1, 0, 0}),
                                        make_brace({0.001, 0, 0}, {1.001, 0, 0})};
    PointCloud c;
    c.points.push_back({0, 0, 0});
    c.points.push_back({1, 0, 0});
    SpatialIndex index(c);
    JointFormation jf = form_joints(braces, c, index, 0.05, 0.1);
    GraphBuild gb = build_graph(braces, jf, 0.1);
    CHECK(gb.graph.edges.size() == 1);
    CHECK(gb.merged_duplicate_edges == 1);
}

TEST_CASE("a joint midway along a brace splits it into two edges") {
    std::vector<BraceSegment> braces = {make_brace({0, 0, 0}, {2, 0, 0}),
                                        make_brace({1, 0, 0}, {1, 1, 0})};
    PointCloud c;
    c.points.push_back({0, 0, 0});
    c.points.push_back({2, 0, 0});
    c.points.push_back({1, 0, 0});
    c.points.push_back({1, 1, 0});
    SpatialIndex index(c);
    JointFormation jf = form_joints(braces, c, index, 0.05, 0.1);
    REQUIRE(jf.joints.size() == 4);
    GraphBuild gb = build_graph(braces, jf, 0.1);
    gb.graph.check_valid();
    CHECK(gb.graph.nodes.size() == 4);
    CHECK(gb.graph.edges.size() == 3);  // the long bar contributes two edges
    double total = 0.0;
    for (const auto& e : gb.graph.edges) total += e.length;
    CHECK(total == doctest::Approx(3.0).epsilon(1e-9));
}

// ---------------------------------------------------------------------------
// Graph serialization

namespace {

ScaffoldGraph sample_graph() {
    ScaffoldGraph g;
    g.nodes.push_back({0, {0, 0, 0}});
    g.nodes.push_back({1, {1.0 / 3.0, 0, 0}});
    g.nodes.push_back({5, {0, 0, 2.5}});
    g.edges.push_back({0, 1, Orientation::HorizontalX, 1.0 / 3.0});
    g.edges.push_back({1, 5, Orientation::Diagonal, 2.521});
    return g;
}

}  // namespace

TEST_CASE("graph json round-trips exactly and uses the documented schema") {
    ScaffoldGraph g = sample_graph();
    std::string text = graph_to_json(g);
    ScaffoldGraph back = graph_from_json(text);
    REQUIRE(back.nodes.size() == 3);
    REQUIRE(back.edges.size() == 2);
    CHECK(back.nodes[1].id == 1);
    CHECK(back.nodes[1].position.x == g.nodes[1].position.x);  // bit-exact
    CHECK(back.nodes[2].position.z == 2.5);
    CHECK(back.edges[0].a == 0);
    CHECK(back.edges[0].b == 1);
    CHECK(back.edges[0].orientation == Orientation::HorizontalX);
    CHECK(back.edges[1].length == g.edges[1].length);

    // Schema spot checks on the raw text.
    CHECK(text.find("\"nodes\"") != std::string::npos);
    CHECK(text.find("\"edges\"") != std::string::npos);
    CHECK(text.find("\"id\"") != std::string::npos);
    CHECK(text.find("\"x\"") != std::string::npos);
    CHECK(text.find("\"orientation\"") != std::string::npos);
    CHECK(text.find("\"horizontal_x\"") != std::string::npos);
    CHECK(text.find("\"length\"") != std::string::npos);
}

TEST_CASE("graph file round-trip and parse failures") {
    TempDir dir;
    ScaffoldGraph g = sample_graph();
    std::string path = dir.file("graph.json");
    save_graph(g, path);
    ScaffoldGraph back = load_graph(path);
    CHECK(back.nodes.size() == 3);
    CHECK(back.edges.size() == 2);

    CHECK_THROWS_AS(load_graph(dir.file("missing.json")), std::runtime_error);
    CHECK_THROWS_AS(graph_from_json("this is not json"), std::runtime_error);
    CHECK_THROWS_AS(graph_from_json("{\"nodes\": [], \"edges\": [{\"a\": 0}]}"),
                    std::runtime_error);
}

TEST_CASE("graph validity rules") {
    ScaffoldGraph g = sample_graph();
    CHECK_NOTHROW(g.check_valid());
    CHECK(g.find_node(5) != nullptr);
    CHECK(g.find_node(5)->position.z == 2.5);
    CHECK(g.find_node(99) == nullptr);

    ScaffoldGraph dup = sample_graph();
    dup.nodes.push_back({1, {9, 9, 9}});
    CHECK_THROWS_AS(dup.check_valid(), std::invalid_argument);

    ScaffoldGraph dangling = sample_graph();
    dangling.edges.push_back({1, 7, Orientation::Diagonal, 1.0});
    CHECK_THROWS_AS(dangling.check_valid(), std::invalid_argument);

    ScaffoldGraph misordered = sample_graph();
    misordered.edges.push_back({5, 1, Orientation::Diagonal, 1.0});
    CHECK_THROWS_AS(misordered.check_valid(), std::invalid_argument);
}

TEST_CASE("element export colors points by shape class") {
    TempDir dir;
    PointCloud c = random_cloud(4, 413);
    std::vector<ShapeClass> classes = {ShapeClass::Linear, ShapeClass::Spherical,
                                       ShapeClass::Planar, ShapeClass::Unclassified};
    std::string path = dir.file("elements.ply");
    export_element_cloud(c, classes, path);
    PointCloud back = load_cloud(path);
    REQUIRE(back.colors.size() == 4);
    CHECK(back.colors[0] == Rgb{0, 255, 0});
    CHECK(back.colors[1] == Rgb{255, 0, 0});
    CHECK(back.colors[2] == Rgb{0, 0, 255});
    CHECK(back.colors[3] == Rgb{128, 128, 128});
}

TEST_SUITE_END();
