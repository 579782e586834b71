#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "touchtrack/geometry.hpp"
#include "touchtrack/neighbor_index.hpp"

namespace touchtrack {

// Mean over all points of the distance to the nearest *other* point.
inline double compute_mean_neighbor_distance(const PointCloud& cloud, const NeighborIndex& index) {
    if (cloud.size() < 2) {
        throw Error("mean neighbor distance needs at least two points");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        for (const Neighbor& n : index.k_nearest(cloud.points[i], 2)) {
            if (n.index != i) {
                sum += n.distance();
                break;
            }
        }
    }
    return sum / static_cast<double>(cloud.size());
}

inline double compute_mean_neighbor_distance(const PointCloud& cloud) {
    return compute_mean_neighbor_distance(cloud, NeighborIndex(cloud));
}

inline PointCloud with_mean_neighbor_distance(PointCloud cloud) {
    if (!cloud.mean_neighbor_distance) {
        cloud.mean_neighbor_distance = compute_mean_neighbor_distance(cloud);
    }
    return cloud;
}

// Eigen-decomposition of a local neighborhood covariance.
struct LocalShape {
    Vector3 normal = Vector3::UnitZ();  // least-eigenvalue eigenvector, unoriented
    double surface_variation = 0.0;     // lambda_min / (lambda_0 + lambda_1 + lambda_2)
    bool degenerate = false;            // covariance rank < 2
};

inline LocalShape local_shape(const PointCloud& cloud, const std::vector<Neighbor>& neighborhood) {
    Vector3 mean = Vector3::Zero();
    for (const Neighbor& n : neighborhood) mean += cloud.points[n.index];
    mean /= static_cast<double>(neighborhood.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const Neighbor& n : neighborhood) {
        const Vector3 d = cloud.points[n.index] - mean;
        cov += d * d.transpose();
    }
    cov /= static_cast<double>(neighborhood.size());

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
    const Vector3 eval = solver.eigenvalues();  // ascending
    LocalShape shape;
    const double total = eval.sum();
    shape.degenerate = !(eval[2] > 0.0) || eval[1] <= 1e-10 * eval[2];
    shape.normal = solver.eigenvectors().col(0);
    shape.surface_variation = total > 0.0 ? std::max(eval[0], 0.0) / total : 0.0;
    return shape;
}

struct NormalEstimate {
    PointCloud cloud;                    // input cloud with normals attached
    std::vector<double> surface_variation;
    std::size_t degenerate_count = 0;    // neighborhoods that fell back to the hint direction
};

// PCA normals over the k nearest neighbors (the point itself included),
// flipped to face orientation_hint.
inline NormalEstimate estimate_normals(const PointCloud& cloud, std::size_t k, const Point3& orientation_hint) {
    if (k < 3) {
        throw Error("normal estimation needs k >= 3");
    }
    if (cloud.size() < k + 1) {
        throw Error("normal estimation needs at least k+1 points");
    }
    const NeighborIndex index(cloud);
    NormalEstimate result;
    result.cloud = cloud;
    result.surface_variation.resize(cloud.size());
    std::vector<UnitVector3> normals;
    normals.reserve(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Point3& p = cloud.points[i];
        const Vector3 toward_hint = orientation_hint - p;
        const LocalShape shape = local_shape(cloud, index.k_nearest(p, k));
        result.surface_variation[i] = shape.surface_variation;
        if (shape.degenerate) {
            ++result.degenerate_count;
            normals.push_back(toward_hint.norm() > 0.0 ? UnitVector3::normalized(toward_hint) : UnitVector3{});
            continue;
        }
        Vector3 n = shape.normal;
        if (n.dot(toward_hint) < 0.0) n = -n;
        normals.push_back(UnitVector3::normalized(n));
    }
    result.cloud.normals = std::move(normals);
    return result;
}

}  // namespace touchtrack
