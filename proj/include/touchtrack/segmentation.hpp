#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "touchtrack/geometry.hpp"
#include "touchtrack/neighbor_index.hpp"
#include "touchtrack/surface.hpp"

namespace touchtrack {

// Plane {p : normal . p + offset = 0}.
struct PlaneModel {
    UnitVector3 normal;
    double offset = 0.0;

    double distance(const Point3& p) const { return std::abs(normal.dot(p) + offset); }
};

// H in degrees [0, 360), S and V in [0, 1].
struct Hsv {
    double h = 0.0;
    double s = 0.0;
    double v = 0.0;
};

struct SegmentationParams {
    double ransac_distance_threshold = 0.005;
    std::size_t ransac_iterations = 200;
    Hsv hsv_low{90.0, 0.25, 0.15};
    Hsv hsv_high{150.0, 1.0, 1.0};
    double smoothness_threshold_deg = 30.0;
    std::size_t neighbor_k = 20;
    // Region-growing reach as a multiple of the cloud's mean neighbor distance.
    double distance_factor = 2.0;
    std::size_t min_cluster_size = 50;
    std::uint64_t rng_seed = 42;
    // Normals are flipped toward this point (sensor position).
    Point3 normal_hint{0.0, 0.0, 1.0};

    void validate() const {
        require(ransac_distance_threshold > 0.0, "ransac_distance_threshold must be positive");
        require(ransac_iterations > 0, "ransac_iterations must be positive");
        require(smoothness_threshold_deg > 0.0, "smoothness_threshold must be positive");
        require(neighbor_k >= 3, "neighbor_k must be at least 3");
        require(distance_factor > 0.0, "distance_factor must be positive");
        require(min_cluster_size > 0, "min_cluster_size must be positive");
        require(hsv_low.s <= hsv_high.s && hsv_low.v <= hsv_high.v, "hsv_low must not exceed hsv_high");
        require(hsv_low.h >= 0.0 && hsv_low.h < 360.0 && hsv_high.h >= 0.0 && hsv_high.h < 360.0,
                "hue bounds must lie in [0, 360)");
    }
};

// A filtered cloud plus, for each kept point, its index in the input.
struct FilteredCloud {
    PointCloud cloud;
    std::vector<std::size_t> kept;
};

struct PlaneRemoval {
    FilteredCloud remaining;
    PlaneModel plane;
};

namespace detail {

inline std::vector<std::size_t> plane_inliers(const PointCloud& cloud, const PlaneModel& plane, double threshold) {
    std::vector<std::size_t> inliers;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (plane.distance(cloud.points[i]) <= threshold) inliers.push_back(i);
    }
    return inliers;
}

inline std::optional<PlaneModel> plane_through(const Point3& a, const Point3& b, const Point3& c) {
    const Vector3 n = (b - a).cross(c - a);
    const double scale = (b - a).norm() * (c - a).norm();
    if (!(n.norm() > 1e-12 * scale) || !(scale > 0.0)) {
        return std::nullopt;
    }
    PlaneModel model;
    model.normal = UnitVector3::normalized(n);
    model.offset = -model.normal.dot(a);
    return model;
}

inline PlaneModel least_squares_plane(const PointCloud& cloud, const std::vector<std::size_t>& members) {
    Vector3 mean = Vector3::Zero();
    for (std::size_t i : members) mean += cloud.points[i];
    mean /= static_cast<double>(members.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (std::size_t i : members) {
        const Vector3 d = cloud.points[i] - mean;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
    PlaneModel model;
    model.normal = UnitVector3::normalized(solver.eigenvectors().col(0));
    model.offset = -model.normal.dot(mean);
    return model;
}

}  // namespace detail

// RANSAC dominant plane; every point within the threshold of the returned
// model is removed.
inline PlaneRemoval remove_plane(const PointCloud& cloud, const SegmentationParams& params) {
    params.validate();
    cloud.validate();
    if (cloud.size() < 3) {
        throw Error("plane removal needs at least three points");
    }
    std::mt19937_64 rng(params.rng_seed);
    std::uniform_int_distribution<std::size_t> pick(0, cloud.size() - 1);

    std::optional<PlaneModel> best;
    std::size_t best_count = 0;
    for (std::size_t it = 0; it < params.ransac_iterations; ++it) {
        const std::size_t a = pick(rng);
        std::size_t b = pick(rng);
        std::size_t c = pick(rng);
        if (a == b || a == c || b == c) continue;
        const auto candidate = detail::plane_through(cloud.points[a], cloud.points[b], cloud.points[c]);
        if (!candidate) continue;
        std::size_t count = 0;
        for (const auto& p : cloud.points) {
            if (candidate->distance(p) <= params.ransac_distance_threshold) ++count;
        }
        if (count > best_count) {
            best_count = count;
            best = candidate;
        }
    }
    // Tiny clouds may never draw three distinct indices; try them in order.
    if (!best && cloud.size() <= 16) {
        for (std::size_t a = 0; a < cloud.size() && !best; ++a)
            for (std::size_t b = a + 1; b < cloud.size() && !best; ++b)
                for (std::size_t c = b + 1; c < cloud.size() && !best; ++c) {
                    best = detail::plane_through(cloud.points[a], cloud.points[b], cloud.points[c]);
                    if (best) {
                        best_count = detail::plane_inliers(cloud, *best, params.ransac_distance_threshold).size();
                    }
                }
    }
    if (!best || best_count < std::min(params.min_cluster_size, cloud.size())) {
        throw Error("no dominant plane");
    }

    PlaneModel plane = *best;
    std::vector<std::size_t> inliers = detail::plane_inliers(cloud, plane, params.ransac_distance_threshold);
    const PlaneModel refined = detail::least_squares_plane(cloud, inliers);
    std::vector<std::size_t> refined_inliers =
        detail::plane_inliers(cloud, refined, params.ransac_distance_threshold);
    if (refined_inliers.size() >= inliers.size()) {
        plane = refined;
        inliers = std::move(refined_inliers);
    }

    std::vector<bool> removed(cloud.size(), false);
    for (std::size_t i : inliers) removed[i] = true;
    PlaneRemoval out;
    out.plane = plane;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (!removed[i]) out.remaining.kept.push_back(i);
    }
    out.remaining.cloud = cloud.subset(out.remaining.kept);
    return out;
}

// Hexcone RGB -> HSV.
inline Hsv rgb_to_hsv(const Rgb& rgb) {
    const double r = rgb[0] / 255.0;
    const double g = rgb[1] / 255.0;
    const double b = rgb[2] / 255.0;
    const double max = std::max({r, g, b});
    const double min = std::min({r, g, b});
    const double delta = max - min;
    Hsv hsv;
    hsv.v = max;
    hsv.s = max > 0.0 ? delta / max : 0.0;
    if (delta > 0.0) {
        if (max == r) {
            hsv.h = 60.0 * ((g - b) / delta);
        } else if (max == g) {
            hsv.h = 60.0 * ((b - r) / delta + 2.0);
        } else {
            hsv.h = 60.0 * ((r - g) / delta + 4.0);
        }
        if (hsv.h < 0.0) hsv.h += 360.0;
        if (hsv.h >= 360.0) hsv.h -= 360.0;
    }
    return hsv;
}

// A low hue above the high hue wraps through 0 degrees.
inline bool in_hsv_band(const Hsv& c, const Hsv& low, const Hsv& high) {
    const bool hue_ok = low.h <= high.h ? (c.h >= low.h && c.h <= high.h) : (c.h >= low.h || c.h <= high.h);
    return hue_ok && c.s >= low.s && c.s <= high.s && c.v >= low.v && c.v <= high.v;
}

inline FilteredCloud remove_by_color(const PointCloud& cloud, const SegmentationParams& params) {
    params.validate();
    cloud.validate();
    if (!cloud.colors) {
        throw Error("no color channel");
    }
    FilteredCloud out;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (!in_hsv_band(rgb_to_hsv((*cloud.colors)[i]), params.hsv_low, params.hsv_high)) {
            out.kept.push_back(i);
        }
    }
    out.cloud = cloud.subset(out.kept);
    return out;
}

// Smoothness-constrained flood fill. Seeds are visited in ascending surface
// variation; normals are compared without regard to sign. Returned clusters
// are sorted by size, largest first.
inline std::vector<std::vector<std::size_t>> region_grow(const PointCloud& cloud, const SegmentationParams& params) {
    params.validate();
    cloud.validate();
    if (!cloud.normals) {
        throw Error("region growing needs normals");
    }
    if (cloud.size() < 2) {
        return {};
    }
    const NeighborIndex index(cloud);
    const double spacing = cloud.mean_neighbor_distance ? *cloud.mean_neighbor_distance
                                                        : compute_mean_neighbor_distance(cloud, index);
    const double reach = params.distance_factor * spacing;
    const double reach_sq = reach * reach;
    const double cos_limit = std::cos(params.smoothness_threshold_deg * std::numbers::pi / 180.0);
    const std::size_t k = std::min(params.neighbor_k + 1, cloud.size());

    std::vector<std::vector<std::size_t>> neighbors(cloud.size());
    std::vector<double> variation(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto knn = index.k_nearest(cloud.points[i], k);
        variation[i] = local_shape(cloud, knn).surface_variation;
        for (const Neighbor& n : knn) {
            if (n.index != i && n.squared_distance <= reach_sq) neighbors[i].push_back(n.index);
        }
    }

    std::vector<std::size_t> seeds(cloud.size());
    std::iota(seeds.begin(), seeds.end(), std::size_t{0});
    std::stable_sort(seeds.begin(), seeds.end(),
                     [&](std::size_t a, std::size_t b) { return variation[a] < variation[b]; });

    const auto& normals = *cloud.normals;
    std::vector<bool> assigned(cloud.size(), false);
    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t seed : seeds) {
        if (assigned[seed]) continue;
        std::vector<std::size_t> cluster{seed};
        assigned[seed] = true;
        std::deque<std::size_t> frontier{seed};
        while (!frontier.empty()) {
            const std::size_t current = frontier.front();
            frontier.pop_front();
            for (std::size_t n : neighbors[current]) {
                if (assigned[n]) continue;
                if (std::abs(normals[current].dot(normals[n].vec())) <= cos_limit) continue;
                assigned[n] = true;
                cluster.push_back(n);
                frontier.push_back(n);
            }
        }
        if (cluster.size() >= params.min_cluster_size) {
            std::sort(cluster.begin(), cluster.end());
            clusters.push_back(std::move(cluster));
        }
    }
    std::stable_sort(clusters.begin(), clusters.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
    return clusters;
}

enum class RemovalMode { plane, color };

struct ArmExtraction {
    PointCloud arm;                        // normals and mean neighbor distance attached
    std::vector<std::size_t> scene_indices;  // arm point i came from scene point scene_indices[i]
    std::optional<PlaneModel> plane;
};

inline ArmExtraction extract_arm(const PointCloud& scene, const SegmentationParams& params, RemovalMode mode) {
    params.validate();
    scene.validate();
    if (scene.empty()) {
        throw Error("empty cloud");
    }
    FilteredCloud remaining;
    std::optional<PlaneModel> plane;
    if (mode == RemovalMode::plane) {
        PlaneRemoval removal = remove_plane(scene, params);
        remaining = std::move(removal.remaining);
        plane = removal.plane;
    } else {
        remaining = remove_by_color(scene, params);
    }
    if (remaining.cloud.size() < std::max(params.min_cluster_size, params.neighbor_k + 1)) {
        throw Error("no arm found");
    }

    PointCloud oriented = estimate_normals(remaining.cloud, params.neighbor_k, params.normal_hint).cloud;
    const auto clusters = region_grow(oriented, params);
    if (clusters.empty() || clusters.front().empty()) {
        throw Error("no arm found");
    }

    ArmExtraction out;
    out.plane = plane;
    PointCloud arm = remaining.cloud.subset(clusters.front());
    for (std::size_t i : clusters.front()) out.scene_indices.push_back(remaining.kept[i]);
    if (arm.size() >= params.neighbor_k + 1) {
        arm = estimate_normals(arm, params.neighbor_k, params.normal_hint).cloud;
    } else {
        arm.normals = oriented.subset(clusters.front()).normals;
    }
    arm.mean_neighbor_distance = compute_mean_neighbor_distance(arm);
    out.arm = std::move(arm);
    return out;
}

}  // namespace touchtrack
