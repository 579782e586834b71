#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "touchtrack/touchtrack.hpp"

// Slow, obviously-correct reference implementations used as test oracles.
namespace touchtrack::oracle {

// Linear scan; ties resolve to the lowest index.
inline Neighbor nearest(const std::vector<Point3>& points, const Point3& q) {
    Neighbor best{0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = (q - points[i]).squaredNorm();
        if (d < best.squared_distance) best = Neighbor{i, d};
    }
    return best;
}

inline std::vector<Neighbor> k_nearest(const std::vector<Point3>& points, const Point3& q, std::size_t k) {
    std::vector<Neighbor> all;
    for (std::size_t i = 0; i < points.size(); ++i) all.push_back({i, (q - points[i]).squaredNorm()});
    std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
        return a.squared_distance < b.squared_distance ||
               (a.squared_distance == b.squared_distance && a.index < b.index);
    });
    all.resize(std::min(k, all.size()));
    return all;
}

inline double mean_neighbor_distance(const std::vector<Point3>& points) {
    double sum = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (j != i) best = std::min(best, (points[i] - points[j]).squaredNorm());
        }
        sum += std::sqrt(best);
    }
    return sum / static_cast<double>(points.size());
}

// O(N*M) contact: every hand vertex against every arm point.
inline ContactFrame contact(const HandFrame& hand, const PointCloud& arm, double mean_neighbor_distance) {
    ContactFrame f;
    f.timestamp = hand.timestamp;
    for (std::size_t i = 0; i < hand.vertices.size(); ++i) {
        const Point3& p = hand.vertices[i];
        const std::size_t j = nearest(arm.points, p).index;
        if ((*arm.normals)[j].dot(p - arm.points[j]) <= 0.0) {
            f.contacted_hand_indices.push_back(i);
            f.matched_arm_indices.push_back(j);
        }
    }
    f.contact = !f.contacted_hand_indices.empty();
    std::vector<bool> seen(arm.size(), false);
    for (std::size_t j : f.matched_arm_indices) seen[j] = true;
    for (std::size_t j = 0; j < arm.size(); ++j) {
        if (seen[j]) f.contacted_arm_indices.push_back(j);
    }
    if (f.contact) {
        double sum = 0.0;
        for (std::size_t c = 0; c < f.contacted_hand_indices.size(); ++c) {
            sum += (hand.vertices[f.contacted_hand_indices[c]] - arm.points[f.matched_arm_indices[c]]).norm();
        }
        f.depth = sum / (2.0 * static_cast<double>(f.contacted_hand_indices.size()));
        f.area = 3.0 * static_cast<double>(f.contacted_arm_indices.size()) * mean_neighbor_distance *
                 mean_neighbor_distance;
    }
    return f;
}

// Minimum DTW cost over every monotone path, by explicit recursion.
inline double dtw_cost(const std::vector<double>& a, const std::vector<double>& b) {
    double best = std::numeric_limits<double>::infinity();
    std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double acc) {
        acc += std::abs(a[i] - b[j]);
        if (i + 1 == a.size() && j + 1 == b.size()) {
            best = std::min(best, acc);
            return;
        }
        if (i + 1 < a.size()) walk(i + 1, j, acc);
        if (j + 1 < b.size()) walk(i, j + 1, acc);
        if (i + 1 < a.size() && j + 1 < b.size()) walk(i + 1, j + 1, acc);
    };
    walk(0, 0, 0.0);
    return best;
}

struct MannWhitneyExact {
    double u = 0.0;
    double p_value = 1.0;
};

// U counted pairwise; p from every relabeling of the pooled values.
inline MannWhitneyExact mann_whitney(const std::vector<double>& a, const std::vector<double>& b) {
    auto u_of = [](const std::vector<double>& x, const std::vector<double>& y) {
        double u = 0.0;
        for (double xi : x) {
            for (double yj : y) u += xi > yj ? 1.0 : (xi == yj ? 0.5 : 0.0);
        }
        return u;
    };
    MannWhitneyExact r;
    r.u = u_of(a, b);
    const double center = static_cast<double>(a.size() * b.size()) / 2.0;
    const double observed = std::abs(r.u - center);
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::size_t n = pooled.size();
    std::size_t total = 0;
    std::size_t extreme = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != a.size()) continue;
        std::vector<double> x;
        std::vector<double> y;
        for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1u ? x : y).push_back(pooled[i]);
        ++total;
        if (std::abs(u_of(x, y) - center) >= observed - 1e-9) ++extreme;
    }
    r.p_value = static_cast<double>(extreme) / static_cast<double>(total);
    return r;
}

}  // namespace touchtrack::oracle
