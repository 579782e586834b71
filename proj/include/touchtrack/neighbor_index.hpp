#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <vector>

#include "touchtrack/geometry.hpp"

namespace touchtrack {

struct Neighbor {
    std::size_t index = 0;
    double squared_distance = 0.0;

    double distance() const { return std::sqrt(squared_distance); }
};

// Lexicographic (squared distance, index): equal distances resolve to the
// lowest point index.
inline bool closer(const Neighbor& a, const Neighbor& b) {
    if (a.squared_distance != b.squared_distance) return a.squared_distance < b.squared_distance;
    return a.index < b.index;
}

// Exact k-d tree over a fixed point set. Results are identical to exhaustive
// search, including tie-breaking, because pruning only discards subtrees whose
// splitting-plane distance is strictly larger than the current bound.
class NeighborIndex {
public:
    explicit NeighborIndex(std::span<const Point3> points) : points_(points.begin(), points.end()) {
        if (points_.empty()) {
            throw Error("empty cloud");
        }
        order_.resize(points_.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        nodes_.reserve(2 * points_.size() / kLeafSize + 1);
        build(0, points_.size());
    }

    explicit NeighborIndex(const PointCloud& cloud) : NeighborIndex(std::span<const Point3>(cloud.points)) {}

    std::size_t size() const { return points_.size(); }
    const Point3& point(std::size_t i) const { return points_[i]; }

    Neighbor nearest(const Point3& query) const {
        Neighbor best{std::numeric_limits<std::size_t>::max(), std::numeric_limits<double>::infinity()};
        nearest_recursive(0, query, best);
        return best;
    }

    // Up to k neighbors sorted closest-first.
    std::vector<Neighbor> k_nearest(const Point3& query, std::size_t k) const {
        std::vector<Neighbor> heap;
        if (k == 0) return heap;
        heap.reserve(k + 1);
        knn_recursive(0, query, k, heap);
        std::sort(heap.begin(), heap.end(), closer);
        return heap;
    }

private:
    static constexpr std::size_t kLeafSize = 12;

    struct Node {
        std::size_t begin = 0;
        std::size_t end = 0;
        int axis = -1;  // -1 marks a leaf
        double split = 0.0;
        std::int64_t left = -1;
        std::int64_t right = -1;
    };

    std::int64_t build(std::size_t begin, std::size_t end) {
        const auto id = static_cast<std::int64_t>(nodes_.size());
        nodes_.push_back(Node{begin, end});
        if (end - begin <= kLeafSize) {
            return id;
        }
        Vector3 lo = Vector3::Constant(std::numeric_limits<double>::infinity());
        Vector3 hi = -lo;
        for (std::size_t i = begin; i < end; ++i) {
            lo = lo.cwiseMin(points_[order_[i]]);
            hi = hi.cwiseMax(points_[order_[i]]);
        }
        int axis = 0;
        (hi - lo).maxCoeff(&axis);
        if (!(hi[axis] > lo[axis])) {
            return id;  // all coincident: keep as leaf
        }
        const std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                         order_.begin() + static_cast<std::ptrdiff_t>(mid),
                         order_.begin() + static_cast<std::ptrdiff_t>(end),
                         [&](std::size_t a, std::size_t b) { return points_[a][axis] < points_[b][axis]; });
        const double split = points_[order_[mid]][axis];
        const std::int64_t left = build(begin, mid);
        const std::int64_t right = build(mid, end);
        Node& node = nodes_[static_cast<std::size_t>(id)];
        node.axis = axis;
        node.split = split;
        node.left = left;
        node.right = right;
        return id;
    }

    void nearest_recursive(std::int64_t id, const Point3& q, Neighbor& best) const {
        const Node& node = nodes_[static_cast<std::size_t>(id)];
        if (node.axis < 0) {
            for (std::size_t i = node.begin; i < node.end; ++i) {
                const std::size_t idx = order_[i];
                const Neighbor candidate{idx, (q - points_[idx]).squaredNorm()};
                if (closer(candidate, best)) best = candidate;
            }
            return;
        }
        const double diff = q[node.axis] - node.split;
        const std::int64_t near_side = diff < 0.0 ? node.left : node.right;
        const std::int64_t far_side = diff < 0.0 ? node.right : node.left;
        nearest_recursive(near_side, q, best);
        if (diff * diff <= best.squared_distance) {
            nearest_recursive(far_side, q, best);
        }
    }

    void knn_recursive(std::int64_t id, const Point3& q, std::size_t k, std::vector<Neighbor>& heap) const {
        const Node& node = nodes_[static_cast<std::size_t>(id)];
        if (node.axis < 0) {
            for (std::size_t i = node.begin; i < node.end; ++i) {
                const std::size_t idx = order_[i];
                const Neighbor candidate{idx, (q - points_[idx]).squaredNorm()};
                if (heap.size() < k) {
                    heap.push_back(candidate);
                    std::push_heap(heap.begin(), heap.end(), closer);
                } else if (closer(candidate, heap.front())) {
                    std::pop_heap(heap.begin(), heap.end(), closer);
                    heap.back() = candidate;
                    std::push_heap(heap.begin(), heap.end(), closer);
                }
            }
            return;
        }
        const double diff = q[node.axis] - node.split;
        const std::int64_t near_side = diff < 0.0 ? node.left : node.right;
        const std::int64_t far_side = diff < 0.0 ? node.right : node.left;
        knn_recursive(near_side, q, k, heap);
        if (heap.size() < k || diff * diff <= heap.front().squared_distance) {
            knn_recursive(far_side, q, k, heap);
        }
    }

    std::vector<Point3> points_;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
};

}  // namespace touchtrack
