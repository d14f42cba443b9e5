#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "scaffold/graphdiff.hpp"
#include "serial_ref.hpp"
#include "test_helpers.hpp"

using namespace scaffold;

namespace {

// Unit-cube lattice graph: 8 corner nodes, 12 edges.
ScaffoldGraph cube_graph() {
    ScaffoldGraph g;
    for (int i = 0; i < 8; ++i)
        g.nodes.push_back({i, {double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)}});
    auto add = [&](int a, int b) {
        Point3 d = g.nodes[b].position - g.nodes[a].position;
        g.edges.push_back({a, b, classify_orientation(d.normalized()), d.norm()});
    };
    for (int i = 0; i < 8; ++i) {
        if (!(i & 1)) add(i, i | 1);
        if (!(i & 2)) add(i, i | 2);
        if (!(i & 4)) add(i, i | 4);
    }
    std::sort(g.edges.begin(), g.edges.end(), [](const auto& x, const auto& y) {
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    return g;
}

int count_state(const GraphDiff& d, EdgeState s) {
    int n = 0;
    for (const auto& e : d.edges) n += e.state == s;
    return n;
}

}  // namespace

TEST_SUITE_BEGIN("graphdiff");

TEST_CASE("identical graphs diff to all-matched") {
    ScaffoldGraph g = cube_graph();
    GraphDiff d = diff_graphs(g, g, 0.25, 0.05);
    CHECK(d.nodes.matches.size() == 8);
    CHECK(d.nodes.unmatched_reference.empty());
    CHECK(d.nodes.unmatched_current.empty());
    CHECK(d.matched_count == 12);
    CHECK(d.deviated_count == 0);
    CHECK(d.missing_count == 0);
    CHECK(d.added_count == 0);
    for (const auto& m : d.nodes.matches) CHECK(m.displacement == 0.0);
    // Counters agree with the edge list.
    CHECK(count_state(d, EdgeState::Matched) == d.matched_count);
    CHECK(d.edges.size() == 12);
}

TEST_CASE("node matching is greedy by distance with id tie-breaks") {
    ScaffoldGraph ref;
    ref.nodes.push_back({0, {0, 0, 0}});
    ref.nodes.push_back({1, {1, 0, 0}});
    ScaffoldGraph cur;
    cur.nodes.push_back({7, {0.05, 0, 0}});  // nearest to ref 0
    cur.nodes.push_back({9, {1.30, 0, 0}});  // outside tolerance of ref 1

    NodeCorrespondence nc = match_nodes(ref, cur, 0.25);
    REQUIRE(nc.matches.size() == 1);
    CHECK(nc.matches[0].reference_id == 0);
    CHECK(nc.matches[0].current_id == 7);
    CHECK(nc.matches[0].displacement == doctest::Approx(0.05).epsilon(1e-12));
    REQUIRE(nc.unmatched_reference.size() == 1);
    CHECK(nc.unmatched_reference[0] == 1);
    REQUIRE(nc.unmatched_current.size() == 1);
    CHECK(nc.unmatched_current[0] == 9);

    // Two reference nodes equidistant from one current node: the lower
    // reference id wins the greedy pick.
    ScaffoldGraph ref2;
    ref2.nodes.push_back({3, {0.1, 0, 0}});
    ref2.nodes.push_back({5, {-0.1, 0, 0}});
    ScaffoldGraph cur2;
    cur2.nodes.push_back({0, {0, 0, 0}});
    NodeCorrespondence nc2 = match_nodes(ref2, cur2, 0.25);
    REQUIRE(nc2.matches.size() == 1);
    CHECK(nc2.matches[0].reference_id == 3);
    CHECK(nc2.unmatched_reference == std::vector<int>{5});
}

TEST_CASE("node matching agrees with exhaustive assignment on a jittered cube") {
    ScaffoldGraph ref = cube_graph();
    ScaffoldGraph cur = cube_graph();
    std::mt19937_64 rng(501);
    std::uniform_real_distribution<double> u(-0.08, 0.08);
    for (auto& n : cur.nodes) {
        n.position.x += u(rng);
        n.position.y += u(rng);
        n.position.z += u(rng);
    }
    NodeCorrespondence nc = match_nodes(ref, cur, 0.25);

    std::vector<Point3> rp, cp;
    for (const auto& n : ref.nodes) rp.push_back(n.position);
    for (const auto& n : cur.nodes) cp.push_back(n.position);
    auto brute = scaffref::assignment_brute(rp, cp, 0.25);

    // Same cardinality, and with this jitter level the same pairing.
    REQUIRE(nc.matches.size() == brute.size());
    std::set<std::pair<int, int>> greedy_pairs, brute_pairs;
    for (const auto& m : nc.matches) greedy_pairs.insert({m.reference_id, m.current_id});
    for (auto [i, j] : brute) brute_pairs.insert({ref.nodes[i].id, cur.nodes[j].id});
    CHECK(greedy_pairs == brute_pairs);
}

TEST_CASE("a removed edge is missing, and symmetrically an extra edge is added") {
    ScaffoldGraph ref = cube_graph();
    ScaffoldGraph cur = cube_graph();
    cur.edges.erase(cur.edges.begin() + 3);

    GraphDiff d = diff_graphs(ref, cur, 0.25, 0.05);
    CHECK(d.matched_count == 11);
    CHECK(d.missing_count == 1);
    CHECK(d.added_count == 0);
    CHECK(d.deviated_count == 0);
    // The missing entry names the reference edge and no current edge.
    bool found = false;
    for (const auto& e : d.edges) {
        if (e.state != EdgeState::Missing) continue;
        found = true;
        CHECK(e.reference_edge == 3);
        CHECK(e.current_edge == -1);
    }
    CHECK(found);

    // Swapping the operands flips missing to added.
    GraphDiff back = diff_graphs(cur, ref, 0.25, 0.05);
    CHECK(back.matched_count == 11);
    CHECK(back.missing_count == 0);
    CHECK(back.added_count == 1);
}

TEST_CASE("a removed node takes its incident edges with it") {
    ScaffoldGraph ref = cube_graph();
    ScaffoldGraph cur = cube_graph();
    // Drop node 7 and its three incident edges.
    cur.nodes.erase(cur.nodes.begin() + 7);
    cur.edges.erase(std::remove_if(cur.edges.begin(), cur.edges.end(),
                                   [](const auto& e) { return e.a == 7 || e.b == 7; }),
                    cur.edges.end());

    GraphDiff d = diff_graphs(ref, cur, 0.25, 0.05);
    CHECK(d.nodes.unmatched_reference == std::vector<int>{7});
    CHECK(d.missing_count == 3);
    CHECK(d.matched_count == 9);
    CHECK(d.added_count == 0);
}

TEST_CASE("a displaced joint marks its edges deviated with the displacement") {
    ScaffoldGraph ref = cube_graph();
    ScaffoldGraph cur = cube_graph();
    cur.nodes[7].position.z += 0.12;  // beyond the 0.05 deviation tolerance

    GraphDiff d = diff_graphs(ref, cur, 0.25, 0.05);
    CHECK(d.deviated_count == 3);
    CHECK(d.matched_count == 9);
    CHECK(d.missing_count == 0);
    for (const auto& e : d.edges) {
        if (e.state != EdgeState::Deviated) continue;
        CHECK(e.max_displacement == doctest::Approx(0.12).epsilon(1e-12));
        CHECK(e.reference_edge >= 0);
        CHECK(e.current_edge >= 0);
    }

    // Below the tolerance the same displacement counts as matched.
    GraphDiff loose = diff_graphs(ref, cur, 0.25, 0.15);
    CHECK(loose.deviated_count == 0);
    CHECK(loose.matched_count == 12);
}

TEST_CASE("deviation never decreases when the tolerance tightens") {
    ScaffoldGraph ref = cube_graph();
    ScaffoldGraph cur = cube_graph();
    std::mt19937_64 rng(502);
    std::uniform_real_distribution<double> u(-0.06, 0.06);
    for (auto& n : cur.nodes) n.position.x += u(rng);
    GraphDiff tight = diff_graphs(ref, cur, 0.25, 0.02);
    GraphDiff loose = diff_graphs(ref, cur, 0.25, 0.10);
    CHECK(tight.deviated_count >= loose.deviated_count);
    CHECK(tight.matched_count + tight.deviated_count ==
          loose.matched_count + loose.deviated_count);
}

TEST_CASE("a genuinely removed edge is not bridged by the coverage pass") {
    // Removing a full cube edge leaves a 1 m gap; no current edge runs along
    // it, so the coverage resolution must leave it missing.
    ScaffoldGraph ref = cube_graph();
    ScaffoldGraph cur = cube_graph();
    // Remove the vertical edge 0-4 (nodes 0 at origin, 4 above it).
    cur.edges.erase(std::remove_if(cur.edges.begin(), cur.edges.end(),
                                   [](const auto& e) { return e.a == 0 && e.b == 4; }),
                    cur.edges.end());
    GraphDiff d = diff_graphs(ref, cur, 0.25, 0.05);
    CHECK(d.missing_count == 1);
    CHECK(d.added_count == 0);
}

TEST_CASE("an edge split by an extra node still counts as matched") {
    // Reference has one long edge; the current graph represents the same bar
    // as two collinear halves through a mid node. Plain correspondence calls
    // the reference edge missing and both halves added; the geometric
    // coverage pass must cancel all of that.
    ScaffoldGraph ref;
    ref.nodes.push_back({0, {0, 0, 0}});
    ref.nodes.push_back({1, {2, 0, 0}});
    ref.nodes.push_back({2, {0, 0, 2}});
    ref.edges.push_back({0, 1, Orientation::HorizontalX, 2.0});
    ref.edges.push_back({0, 2, Orientation::Vertical, 2.0});

    ScaffoldGraph cur;
    cur.nodes.push_back({0, {0, 0, 0}});
    cur.nodes.push_back({1, {1, 0, 0}});  // extra mid node
    cur.nodes.push_back({2, {2, 0, 0}});
    cur.nodes.push_back({3, {0, 0, 2}});
    cur.edges.push_back({0, 1, Orientation::HorizontalX, 1.0});
    cur.edges.push_back({1, 2, Orientation::HorizontalX, 1.0});
    cur.edges.push_back({0, 3, Orientation::Vertical, 2.0});

    GraphDiff d = diff_graphs(ref, cur, 0.25, 0.05);
    CHECK(d.missing_count == 0);
    CHECK(d.added_count == 0);
    CHECK(d.matched_count + d.deviated_count == 2);
    CHECK(d.deviated_count == 0);  // nothing actually moved

    // And the mirrored case: reference split, current merged.
    GraphDiff m = diff_graphs(cur, ref, 0.25, 0.05);
    CHECK(m.missing_count == 0);
    CHECK(m.added_count == 0);
}

TEST_CASE("coverage resolution respects the deviation tolerance") {
    // Same split-bar scene but the whole current bar sits 0.08 off axis:
    // beyond a 0.05 tolerance the bridged edge must surface as deviated.
    ScaffoldGraph ref;
    ref.nodes.push_back({0, {0, 0, 0}});
    ref.nodes.push_back({1, {2, 0, 0}});
    ref.nodes.push_back({2, {0, 0, 2}});
    ref.edges.push_back({0, 1, Orientation::HorizontalX, 2.0});
    ref.edges.push_back({0, 2, Orientation::Vertical, 2.0});

    ScaffoldGraph cur;
    cur.nodes.push_back({0, {0, 0.08, 0}});
    cur.nodes.push_back({1, {1, 0.08, 0}});
    cur.nodes.push_back({2, {2, 0.08, 0}});
    cur.nodes.push_back({3, {0, 0, 2}});
    cur.edges.push_back({0, 1, Orientation::HorizontalX, 1.0});
    cur.edges.push_back({1, 2, Orientation::HorizontalX, 1.0});
    cur.edges.push_back({0, 3, Orientation::Diagonal, 2.0});

    GraphDiff d = diff_graphs(ref, cur, 0.25, 0.05);
    CHECK(d.missing_count == 0);
    CHECK(d.added_count == 0);
    CHECK(d.deviated_count >= 1);
}

TEST_CASE("diff json summarizes states and counts") {
    ScaffoldGraph ref = cube_graph();
    ScaffoldGraph cur = cube_graph();
    cur.edges.pop_back();
    GraphDiff d = diff_graphs(ref, cur, 0.25, 0.05);
    std::string text = diff_to_json(d, ref, cur);
    CHECK(text.find("\"matched\"") != std::string::npos);
    CHECK(text.find("\"missing\"") != std::string::npos);
    CHECK(text.find("\"edges\"") != std::string::npos);
    CHECK(text.find("\"node_matches\"") != std::string::npos);
    CHECK(text.find("\"summary\"") != std::string::npos);
}

TEST_CASE("diff argument validation") {
    ScaffoldGraph g = cube_graph();
    CHECK_THROWS_AS(diff_graphs(g, g, -0.1, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(diff_graphs(g, g, 0.25, -0.05), std::invalid_argument);
    CHECK_THROWS_AS(match_nodes(g, g, -1.0), std::invalid_argument);
}

TEST_SUITE_END();
