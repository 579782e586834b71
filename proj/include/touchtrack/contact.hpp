#pragma once

#include <algorithm>
#include <vector>

#include "touchtrack/geometry.hpp"
#include "touchtrack/neighbor_index.hpp"
#include "touchtrack/surface.hpp"

namespace touchtrack {

// One tracked hand pose. ref_point stands in for the middle MCP joint.
struct HandFrame {
    double timestamp = 0.0;  // seconds
    std::vector<Point3> vertices;
    Point3 ref_point = Point3::Zero();
};

struct ContactFrame {
    double timestamp = 0.0;
    bool contact = false;
    std::vector<std::size_t> contacted_hand_indices;  // ascending
    // Nearest arm point of each contacted hand vertex (parallel to the above).
    std::vector<std::size_t> matched_arm_indices;
    std::vector<std::size_t> contacted_arm_indices;   // deduplicated, ascending
    double depth = 0.0;  // meters
    double area = 0.0;   // square meters
};

// Arm cloud bundled with its spatial index. The arm shape is frozen for a
// trial, so the index and mean neighbor distance are computed once.
class PreparedArm {
public:
    explicit PreparedArm(PointCloud cloud) : cloud_(std::move(cloud)), index_(cloud_) {
        cloud_.validate();
        if (!cloud_.normals) {
            throw Error("arm lacks normals");
        }
        if (!cloud_.mean_neighbor_distance) {
            cloud_.mean_neighbor_distance = compute_mean_neighbor_distance(cloud_, index_);
        }
    }

    const PointCloud& cloud() const { return cloud_; }
    const NeighborIndex& index() const { return index_; }
    double mean_neighbor_distance() const { return *cloud_.mean_neighbor_distance; }

private:
    PointCloud cloud_;
    NeighborIndex index_;
};

// Average of half the hand-to-arm distances over contacted hand vertices.
inline double indentation_depth(const ContactFrame& frame, const HandFrame& hand, const PointCloud& arm) {
    if (!frame.contact || frame.contacted_hand_indices.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < frame.contacted_hand_indices.size(); ++c) {
        sum += (hand.vertices.at(frame.contacted_hand_indices[c]) - arm.points.at(frame.matched_arm_indices[c])).norm();
    }
    return sum / (2.0 * static_cast<double>(frame.contacted_hand_indices.size()));
}

// Each contacted arm point contributes 3 * l^2 (pi rounded to 3), l being the
// arm's mean neighbor distance.
inline double contact_area(const ContactFrame& frame, const PointCloud& arm) {
    if (!frame.contact) {
        return 0.0;
    }
    if (!arm.mean_neighbor_distance) {
        throw Error("arm lacks mean neighbor distance");
    }
    const double l = *arm.mean_neighbor_distance;
    return 3.0 * static_cast<double>(frame.contacted_arm_indices.size()) * l * l;
}

// A vertex is underneath the arm when (p_hand - p_arm) . n_arm <= 0 for its
// nearest arm point; contact holds when at least one vertex is underneath.
inline ContactFrame detect_contact(const HandFrame& hand, const PointCloud& arm, const NeighborIndex& index) {
    if (!arm.normals) {
        throw Error("arm lacks normals");
    }
    if (!arm.mean_neighbor_distance) {
        throw Error("arm lacks mean neighbor distance");
    }
    if (index.size() != arm.size()) {
        throw Error("neighbor index was not built over this arm");
    }
    const auto& normals = *arm.normals;
    ContactFrame frame;
    frame.timestamp = hand.timestamp;
    for (std::size_t i = 0; i < hand.vertices.size(); ++i) {
        const Point3& p = hand.vertices[i];
        const std::size_t j = index.nearest(p).index;
        if (normals[j].dot(p - arm.points[j]) <= 0.0) {
            frame.contacted_hand_indices.push_back(i);
            frame.matched_arm_indices.push_back(j);
        }
    }
    frame.contact = !frame.contacted_hand_indices.empty();
    if (!frame.contact) {
        return frame;
    }
    frame.contacted_arm_indices = frame.matched_arm_indices;
    std::sort(frame.contacted_arm_indices.begin(), frame.contacted_arm_indices.end());
    frame.contacted_arm_indices.erase(std::unique(frame.contacted_arm_indices.begin(), frame.contacted_arm_indices.end()),
                                      frame.contacted_arm_indices.end());
    frame.depth = indentation_depth(frame, hand, arm);
    frame.area = contact_area(frame, arm);
    return frame;
}

inline ContactFrame detect_contact(const HandFrame& hand, const PreparedArm& arm) {
    return detect_contact(hand, arm.cloud(), arm.index());
}

}  // namespace touchtrack
