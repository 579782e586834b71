#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "touchtrack/error.hpp"

namespace touchtrack {

// Camera/world coordinates in meters.
using Point3 = Eigen::Vector3d;
using Vector3 = Eigen::Vector3d;
using Rgb = std::array<std::uint8_t, 3>;

inline bool is_finite(const Vector3& v) {
    return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

// A direction with unit Euclidean norm. Only constructible by normalizing.
class UnitVector3 {
public:
    UnitVector3() : v_(0.0, 0.0, 1.0) {}

    static UnitVector3 normalized(const Vector3& v) {
        const double n = v.norm();
        if (!(n > 0.0) || !std::isfinite(n)) {
            throw Error("cannot normalize a zero or non-finite vector");
        }
        return UnitVector3(v / n);
    }

    // Keeps an already unit-length vector bit for bit (e.g. one read back
    // from a file); anything else is normalized.
    static UnitVector3 from_stored(const Vector3& v) {
        const double n = v.norm();
        if (std::isfinite(n) && std::abs(n - 1.0) <= 1e-12) {
            return UnitVector3(v);
        }
        return normalized(v);
    }

    UnitVector3 operator-() const { return UnitVector3(-v_); }

    const Vector3& vec() const { return v_; }
    double x() const { return v_.x(); }
    double y() const { return v_.y(); }
    double z() const { return v_.z(); }
    double dot(const Vector3& other) const { return v_.dot(other); }

private:
    explicit UnitVector3(const Vector3& v) : v_(v) {}
    Vector3 v_;
};

struct PointCloud {
    std::vector<Point3> points;
    std::optional<std::vector<UnitVector3>> normals;
    std::optional<std::vector<Rgb>> colors;
    // Average distance from each point to its nearest other point; filled by
    // with_mean_neighbor_distance() (see surface.hpp).
    std::optional<double> mean_neighbor_distance;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    bool has_normals() const { return normals.has_value(); }
    bool has_colors() const { return colors.has_value(); }

    // Optional channels must match the point count.
    void validate() const {
        if (normals && normals->size() != points.size()) {
            throw Error("normal channel length differs from point count");
        }
        if (colors && colors->size() != points.size()) {
            throw Error("color channel length differs from point count");
        }
        for (const auto& p : points) {
            if (!is_finite(p)) {
                throw Error("non-finite point coordinate");
            }
        }
    }

    // Copy of the selected points with every channel carried along.
    PointCloud subset(const std::vector<std::size_t>& indices) const {
        PointCloud out;
        out.points.reserve(indices.size());
        if (normals) out.normals.emplace().reserve(indices.size());
        if (colors) out.colors.emplace().reserve(indices.size());
        for (std::size_t i : indices) {
            out.points.push_back(points.at(i));
            if (normals) out.normals->push_back((*normals)[i]);
            if (colors) out.colors->push_back((*colors)[i]);
        }
        return out;
    }
};

// Right-handed arm frame: lateral = longitudinal x vertical.
struct ArmBasis {
    UnitVector3 vertical;
    UnitVector3 longitudinal;
    UnitVector3 lateral;
};

// vertical_sample_normal: normal of a point on a horizontal support or on top
// of the forearm. camera_y: image y axis, assumed aligned with elbow->wrist.
inline ArmBasis build_arm_basis(const UnitVector3& vertical_sample_normal, const UnitVector3& camera_y) {
    const Vector3& vt = vertical_sample_normal.vec();
    const Vector3& y = camera_y.vec();
    if (std::abs(vt.dot(y)) >= 1.0 - 1e-6) {
        throw Error("degenerate basis");
    }
    const Vector3 projected = y - y.dot(vt) * vt;
    if (!(projected.norm() > 0.0)) {
        throw Error("degenerate basis");
    }
    ArmBasis basis;
    basis.vertical = vertical_sample_normal;
    basis.longitudinal = UnitVector3::normalized(projected);
    basis.lateral = UnitVector3::normalized(basis.longitudinal.vec().cross(vt));
    return basis;
}

// Centroid per occupied voxel. Normals are averaged then renormalized and
// colors averaged with rounding. Output is ordered by voxel key.
inline PointCloud voxel_downsample(const PointCloud& cloud, double leaf = 0.003) {
    if (!(leaf > 0.0)) {
        throw Error("voxel leaf size must be positive");
    }
    cloud.validate();
    using Key = std::tuple<std::int64_t, std::int64_t, std::int64_t>;
    struct Accumulator {
        Vector3 position = Vector3::Zero();
        Vector3 normal = Vector3::Zero();
        std::array<double, 3> color{0.0, 0.0, 0.0};
        std::size_t count = 0;
    };
    std::map<Key, Accumulator> voxels;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Point3& p = cloud.points[i];
        const Key key{static_cast<std::int64_t>(std::floor(p.x() / leaf)),
                      static_cast<std::int64_t>(std::floor(p.y() / leaf)),
                      static_cast<std::int64_t>(std::floor(p.z() / leaf))};
        Accumulator& acc = voxels[key];
        acc.position += p;
        if (cloud.normals) acc.normal += (*cloud.normals)[i].vec();
        if (cloud.colors) {
            for (int c = 0; c < 3; ++c) acc.color[c] += (*cloud.colors)[i][c];
        }
        ++acc.count;
    }

    PointCloud out;
    out.points.reserve(voxels.size());
    if (cloud.normals) out.normals.emplace().reserve(voxels.size());
    if (cloud.colors) out.colors.emplace().reserve(voxels.size());
    for (const auto& [key, acc] : voxels) {
        const double n = static_cast<double>(acc.count);
        out.points.push_back(acc.position / n);
        if (cloud.normals) {
            // Opposing normals that cancel exactly fall back to +z.
            out.normals->push_back(acc.normal.norm() > 1e-12 ? UnitVector3::normalized(acc.normal)
                                                             : UnitVector3{});
        }
        if (cloud.colors) {
            Rgb rgb{};
            for (int c = 0; c < 3; ++c) {
                rgb[c] = static_cast<std::uint8_t>(std::lround(acc.color[c] / n));
            }
            out.colors->push_back(rgb);
        }
    }
    return out;
}

}  // namespace touchtrack
