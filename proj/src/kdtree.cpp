#include "scaffold/kdtree.hpp"

#include <algorithm>
#include <stdexcept>

namespace scaffold {

namespace {

inline double coord(const Point3& p, int axis) {
    return axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
}

// Total order used everywhere a "closest" decision is made so that results
// do not depend on traversal order: smaller distance first, then smaller
// original index.
inline bool closer(double d2a, int ia, double d2b, int ib) {
    return d2a < d2b || (d2a == d2b && ia < ib);
}

struct Elem {
    Point3 p;
    int i;
};

}  // namespace

void SpatialIndex::build(const std::vector<Point3>& points) {
    const int n = static_cast<int>(points.size());
    std::vector<Elem> elems(n);
    for (int i = 0; i < n; ++i) elems[i] = {points[i], i};

    nodes_.clear();
    nodes_.reserve(n == 0 ? 1 : 2 * n / kLeafSize + 2);

    // Recursive lambda over the scratch array; pts_/idx_ are unzipped after.
    auto rec = [&](auto&& self, int begin, int end) -> int {
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back({});
        if (end - begin <= kLeafSize) {
            nodes_[id].begin = begin;
            nodes_[id].end = end;
            return id;
        }
        Point3 lo = elems[begin].p;
        Point3 hi = elems[begin].p;
        for (int i = begin + 1; i < end; ++i) {
            const Point3& p = elems[i].p;
            lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
            hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
        }
        const Point3 ext = hi - lo;
        int axis = 0;
        if (ext.y > ext.x) axis = 1;
        if (coord(ext, 2) > coord(ext, axis)) axis = 2;
        if (coord(ext, axis) == 0.0) {  // all points coincide: keep one leaf
            nodes_[id].begin = begin;
            nodes_[id].end = end;
            return id;
        }
        const int mid = begin + (end - begin) / 2;
        std::nth_element(elems.begin() + begin, elems.begin() + mid, elems.begin() + end,
                         [axis](const Elem& a, const Elem& b) {
                             const double ca = coord(a.p, axis);
                             const double cb = coord(b.p, axis);
                             return ca < cb || (ca == cb && a.i < b.i);
                         });
        nodes_[id].axis = axis;
        nodes_[id].split = coord(elems[mid].p, axis);
        const int left = self(self, begin, mid);
        const int right = self(self, mid, end);
        nodes_[id].left = left;
        nodes_[id].right = right;
        return id;
    };
    root_ = n == 0 ? -1 : rec(rec, 0, n);

    pts_.resize(n);
    idx_.resize(n);
    slot_of_.resize(n);
    for (int i = 0; i < n; ++i) {
        pts_[i] = elems[i].p;
        idx_[i] = elems[i].i;
        slot_of_[elems[i].i] = i;
    }
}

Neighbor SpatialIndex::nearest(const Point3& query) const {
    if (empty()) throw std::runtime_error("nearest query on empty spatial index");
    Neighbor best;  // distance field holds squared distance during traversal
    nearest_recursive(root_, query, best);
    best.distance = std::sqrt(best.distance);
    return best;
}

void SpatialIndex::nearest_recursive(int node, const Point3& q, Neighbor& best) const {
    const Node& n = nodes_[node];
    if (n.axis < 0) {
        for (int i = n.begin; i < n.end; ++i) {
            const double d2 = squared_distance(pts_[i], q);
            if (best.index < 0 || closer(d2, idx_[i], best.distance, best.index)) {
                best.distance = d2;
                best.index = idx_[i];
            }
        }
        return;
    }
    const double delta = coord(q, n.axis) - n.split;
    const int near = delta < 0.0 ? n.left : n.right;
    const int far = delta < 0.0 ? n.right : n.left;
    nearest_recursive(near, q, best);
    if (best.index < 0 || delta * delta <= best.distance) nearest_recursive(far, q, best);
}

std::vector<Neighbor> SpatialIndex::knn(const Point3& query, int k) const {
    if (k <= 0) throw std::invalid_argument("knn requires k >= 1");
    std::vector<Neighbor> heap;  // max-heap under (d2, index)
    heap.reserve(static_cast<std::size_t>(k) + 1);
    if (root_ >= 0) knn_recursive(root_, query, k, heap);
    auto worse = [](const Neighbor& a, const Neighbor& b) {
        return closer(a.distance, a.index, b.distance, b.index);
    };
    std::sort_heap(heap.begin(), heap.end(), worse);
    for (auto& n : heap) n.distance = std::sqrt(n.distance);
    return heap;
}

void SpatialIndex::knn_recursive(int node, const Point3& q, int k,
                                 std::vector<Neighbor>& heap) const {
    auto worse = [](const Neighbor& a, const Neighbor& b) {
        return closer(a.distance, a.index, b.distance, b.index);
    };
    const Node& n = nodes_[node];
    if (n.axis < 0) {
        for (int i = n.begin; i < n.end; ++i) {
            const double d2 = squared_distance(pts_[i], q);
            if (static_cast<int>(heap.size()) < k) {
                heap.push_back({idx_[i], d2});
                std::push_heap(heap.begin(), heap.end(), worse);
            } else if (closer(d2, idx_[i], heap.front().distance, heap.front().index)) {
                std::pop_heap(heap.begin(), heap.end(), worse);
                heap.back() = {idx_[i], d2};
                std::push_heap(heap.begin(), heap.end(), worse);
            }
        }
        return;
    }
    const double delta = coord(q, n.axis) - n.split;
    const int near = delta < 0.0 ? n.left : n.right;
    const int far = delta < 0.0 ? n.right : n.left;
    knn_recursive(near, q, k, heap);
    if (static_cast<int>(heap.size()) < k || delta * delta <= heap.front().distance)
        knn_recursive(far, q, k, heap);
}

std::vector<int> SpatialIndex::radius(const Point3& query, double r) const {
    if (r < 0.0) throw std::invalid_argument("radius must be non-negative");
    std::vector<int> out;
    if (root_ >= 0) radius_recursive(root_, query, r * r, out);
    std::sort(out.begin(), out.end());
    return out;
}

void SpatialIndex::radius_recursive(int node, const Point3& q, double r2,
                                    std::vector<int>& out) const {
    const Node& n = nodes_[node];
    if (n.axis < 0) {
        for (int i = n.begin; i < n.end; ++i)
            if (squared_distance(pts_[i], q) <= r2) out.push_back(idx_[i]);
        return;
    }
    const double delta = coord(q, n.axis) - n.split;
    const int near = delta < 0.0 ? n.left : n.right;
    const int far = delta < 0.0 ? n.right : n.left;
    radius_recursive(near, q, r2, out);
    if (delta * delta <= r2) radius_recursive(far, q, r2, out);
}

}  // namespace scaffold
