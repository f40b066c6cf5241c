// SPDX-FileCopyrightText: 2026 densepack contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef DENSEPACK_GEOMETRY_HPP
#define DENSEPACK_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "densepack/error.hpp"
#include "densepack/random.hpp"

namespace dp {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double squared_norm() const { return dot(*this); }
    double norm() const { return std::sqrt(squared_norm()); }
    Vec3 normalized() const {
        double n = norm();
        return n > 0.0 ? *this / n : Vec3{};
    }
    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Unit quaternion, canonicalized to w >= 0. Re-normalized after every
/// composition so long chains stay on the unit sphere.
class Rotation {
public:
    Rotation() : w_(1.0), x_(0.0), y_(0.0), z_(0.0) {}

    static Rotation from_quaternion(double w, double x, double y, double z);
    static Rotation from_axis_angle(const Vec3& axis, double angle_rad);

    double w() const { return w_; }
    double x() const { return x_; }
    double y() const { return y_; }
    double z() const { return z_; }

    Vec3 apply(const Vec3& v) const {
        // v' = v + 2 w (q x v) + 2 q x (q x v)
        Vec3 q{x_, y_, z_};
        Vec3 t = q.cross(v) * 2.0;
        return v + t * w_ + q.cross(t);
    }

    /// this * other: apply `other` first, then this rotation.
    Rotation compose(const Rotation& o) const;
    Rotation inverse() const;

    /// Row-major 3x3 rotation matrix.
    std::array<double, 9> matrix() const;

    double angle_to(const Rotation& o) const;

private:
    Rotation(double w, double x, double y, double z, bool /*raw*/)
        : w_(w), x_(x), y_(y), z_(z) {}

    void normalize_canonical();

    double w_, x_, y_, z_;
};

struct Pose {
    Rotation rotation;
    Vec3 translation;

    static Pose identity() { return {}; }

    Vec3 apply(const Vec3& p) const { return rotation.apply(p) + translation; }

    /// this ∘ other: apply `other` first.
    Pose compose(const Pose& o) const {
        return {rotation.compose(o.rotation), rotation.apply(o.translation) + translation};
    }

    Pose inverse() const {
        Rotation inv = rotation.inverse();
        return {inv, -inv.apply(translation)};
    }
};

struct PinholeIntrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;

    static PinholeIntrinsics create(double fx, double fy, double cx, double cy,
                                    int width, int height);
};

struct PointCloud {
    std::vector<Vec3> points;
    std::vector<std::array<float, 3>> colors;  // empty or same length as points

    bool has_colors() const { return !colors.empty(); }
    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::int32_t, 3>> triangles;

    bool empty() const { return triangles.empty(); }
};

/// Box frame -> world pose plus full extents in meters. Extents are clamped
/// to kMinBoxExtent per axis so degenerate clouds still yield a usable box.
struct OrientedBox3D {
    Pose pose;
    Vec3 dimensions;

    double volume() const { return dimensions.x * dimensions.y * dimensions.z; }
    std::array<Vec3, 8> corners() const;
    bool contains(const Vec3& p, double slack = 1e-9) const;
};

inline constexpr double kMinBoxExtent = 1e-3;  // 1 mm, mirrors the height-map cell
inline constexpr int kDefaultBoxFitRotations = 4096;

struct PixelDepth {
    double u = 0.0;
    double v = 0.0;
    double depth = 0.0;
};

struct OverlapResult {
    double intersection_volume = 0.0;
    double iou = 0.0;
    double iog = 0.0;
};

PointCloud transform_cloud(const Pose& pose, const PointCloud& cloud);

PixelDepth project(const PinholeIntrinsics& intr, const Vec3& p);
Vec3 unproject(const PinholeIntrinsics& intr, double u, double v, double depth);

Rotation sample_uniform_rotation(RandomSource& rng);

/// Uniform surface sampling: triangle chosen with probability proportional to
/// area, point uniform within the triangle. Optional per-point normals
/// (triangle normals, winding order defines outward).
PointCloud sample_mesh_surface(const TriangleMesh& mesh, std::size_t n, RandomSource& rng,
                               std::vector<Vec3>* normals = nullptr);

OrientedBox3D fit_min_volume_box(const PointCloud& cloud, int n_rotations, RandomSource& rng);

/// Exact intersection volume by clipping box `a` against the six face planes
/// of box `b`; iou = inter / (volA + volB - inter), iog = inter / volB.
OverlapResult box_overlap(const OrientedBox3D& a, const OrientedBox3D& b);

// Mesh utilities shared by the simulator and test fixtures.

/// Axis-aligned box mesh centered at the origin, outward winding.
TriangleMesh make_box_mesh(const Vec3& dims);
/// Closed cylinder along +z, centered at the origin.
TriangleMesh make_cylinder_mesh(double radius, double height, int segments = 32);
/// L-shaped prism: an (lx, ly) footprint with a (notch_x, notch_y) corner cut
/// removed at the +x/+y corner, extruded to `height`, centered at the origin.
TriangleMesh make_l_prism_mesh(double lx, double ly, double notch_x, double notch_y,
                               double height);

/// Signed volume via the divergence theorem; positive for outward winding.
double mesh_volume(const TriangleMesh& mesh);

double mesh_surface_area(const TriangleMesh& mesh);

}  // namespace dp

#endif
