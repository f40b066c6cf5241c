// SPDX-FileCopyrightText: 2026 densepack contributors
// SPDX-License-Identifier: Apache-2.0

#include "densepack/geometry.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>

namespace dp {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "InvalidArgument";
        case ErrorCode::empty_cloud: return "EmptyCloud";
        case ErrorCode::empty_mesh: return "EmptyMesh";
        case ErrorCode::non_positive_depth: return "NonPositiveDepth";
        case ErrorCode::index_out_of_range: return "IndexOutOfRange";
        case ErrorCode::invalid_box: return "InvalidBox";
        case ErrorCode::empty_surface: return "EmptySurface";
        case ErrorCode::non_watertight_mesh: return "NonWatertightMesh";
        case ErrorCode::out_of_bounds: return "OutOfBounds";
        case ErrorCode::shape_mismatch: return "ShapeMismatch";
        case ErrorCode::count_mismatch: return "CountMismatch";
        case ErrorCode::missing_key: return "MissingKey";
        case ErrorCode::endianness_mismatch: return "EndiannessMismatch";
        case ErrorCode::no_valid_pixels: return "NoValidPixels";
        case ErrorCode::pool_too_small: return "PoolTooSmall";
        case ErrorCode::invalid_spec: return "InvalidSpec";
        case ErrorCode::io_failure: return "IoFailure";
        case ErrorCode::internal: return "Internal";
    }
    return "Unknown";
}

// ---------------------------------------------------------------------------
// Rotation

void Rotation::normalize_canonical() {
    double n = std::sqrt(w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_);
    require(n > 1e-12, ErrorCode::invalid_argument, "quaternion norm too small");
    double inv = 1.0 / n;
    w_ *= inv;
    x_ *= inv;
    y_ *= inv;
    z_ *= inv;
    if (w_ < 0.0) {
        w_ = -w_;
        x_ = -x_;
        y_ = -y_;
        z_ = -z_;
    }
}

Rotation Rotation::from_quaternion(double w, double x, double y, double z) {
    Rotation r(w, x, y, z, true);
    r.normalize_canonical();
    return r;
}

Rotation Rotation::from_axis_angle(const Vec3& axis, double angle_rad) {
    double n = axis.norm();
    if (n < 1e-15) return Rotation();
    double half = 0.5 * angle_rad;
    double s = std::sin(half) / n;
    return from_quaternion(std::cos(half), axis.x * s, axis.y * s, axis.z * s);
}

Rotation Rotation::compose(const Rotation& o) const {
    double w = w_ * o.w_ - x_ * o.x_ - y_ * o.y_ - z_ * o.z_;
    double x = w_ * o.x_ + x_ * o.w_ + y_ * o.z_ - z_ * o.y_;
    double y = w_ * o.y_ - x_ * o.z_ + y_ * o.w_ + z_ * o.x_;
    double z = w_ * o.z_ + x_ * o.y_ - y_ * o.x_ + z_ * o.w_;
    return from_quaternion(w, x, y, z);
}

Rotation Rotation::inverse() const {
    return Rotation(w_, -x_, -y_, -z_, true);  // already unit, w >= 0
}

std::array<double, 9> Rotation::matrix() const {
    double xx = x_ * x_, yy = y_ * y_, zz = z_ * z_;
    double xy = x_ * y_, xz = x_ * z_, yz = y_ * z_;
    double wx = w_ * x_, wy = w_ * y_, wz = w_ * z_;
    return {1 - 2 * (yy + zz), 2 * (xy - wz),     2 * (xz + wy),
            2 * (xy + wz),     1 - 2 * (xx + zz), 2 * (yz - wx),
            2 * (xz - wy),     2 * (yz + wx),     1 - 2 * (xx + yy)};
}

double Rotation::angle_to(const Rotation& o) const {
    double d = std::abs(w_ * o.w_ + x_ * o.x_ + y_ * o.y_ + z_ * o.z_);
    return 2.0 * std::acos(std::min(1.0, d));
}

// ---------------------------------------------------------------------------
// Pinhole camera

PinholeIntrinsics PinholeIntrinsics::create(double fx, double fy, double cx, double cy,
                                            int width, int height) {
    require(fx > 0.0 && fy > 0.0, ErrorCode::invalid_argument, "focal lengths must be positive");
    require(width > 0 && height > 0, ErrorCode::invalid_argument, "image size must be positive");
    require(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height, ErrorCode::invalid_argument,
            "principal point outside image");
    return {fx, fy, cx, cy, width, height};
}

PixelDepth project(const PinholeIntrinsics& intr, const Vec3& p) {
    require(p.z > 0.0, ErrorCode::non_positive_depth, "point depth must be positive");
    return {intr.fx * p.x / p.z + intr.cx, intr.fy * p.y / p.z + intr.cy, p.z};
}

Vec3 unproject(const PinholeIntrinsics& intr, double u, double v, double depth) {
    require(depth > 0.0, ErrorCode::non_positive_depth, "depth must be positive");
    return {(u - intr.cx) * depth / intr.fx, (v - intr.cy) * depth / intr.fy, depth};
}

PointCloud transform_cloud(const Pose& pose, const PointCloud& cloud) {
    PointCloud out;
    out.points.reserve(cloud.points.size());
    for (const Vec3& p : cloud.points) out.points.push_back(pose.apply(p));
    out.colors = cloud.colors;
    return out;
}

// ---------------------------------------------------------------------------
// Sampling

Rotation sample_uniform_rotation(RandomSource& rng) {
    // Shoemake's subgroup method: uniform on S^3.
    double u1 = rng.uniform();
    double u2 = rng.uniform();
    double u3 = rng.uniform();
    double a = std::sqrt(1.0 - u1);
    double b = std::sqrt(u1);
    return Rotation::from_quaternion(b * std::cos(2.0 * kPi * u3), a * std::sin(2.0 * kPi * u2),
                                     a * std::cos(2.0 * kPi * u2), b * std::sin(2.0 * kPi * u3));
}

PointCloud sample_mesh_surface(const TriangleMesh& mesh, std::size_t n, RandomSource& rng,
                               std::vector<Vec3>* normals) {
    std::vector<double> cumulative;
    cumulative.reserve(mesh.triangles.size());
    double total = 0.0;
    for (const auto& tri : mesh.triangles) {
        const Vec3& a = mesh.vertices[tri[0]];
        const Vec3& b = mesh.vertices[tri[1]];
        const Vec3& c = mesh.vertices[tri[2]];
        total += 0.5 * (b - a).cross(c - a).norm();
        cumulative.push_back(total);
    }
    require(total > 0.0, ErrorCode::empty_mesh, "mesh has no positive-area triangle");

    PointCloud out;
    out.points.reserve(n);
    if (normals) {
        normals->clear();
        normals->reserve(n);
    }
    for (std::size_t i = 0; i < n; ++i) {
        double pick = rng.uniform() * total;
        std::size_t t = std::upper_bound(cumulative.begin(), cumulative.end(), pick) -
                        cumulative.begin();
        if (t >= mesh.triangles.size()) t = mesh.triangles.size() - 1;
        const auto& tri = mesh.triangles[t];
        const Vec3& a = mesh.vertices[tri[0]];
        const Vec3& b = mesh.vertices[tri[1]];
        const Vec3& c = mesh.vertices[tri[2]];
        double r1 = std::sqrt(rng.uniform());
        double r2 = rng.uniform();
        out.points.push_back(a * (1.0 - r1) + b * (r1 * (1.0 - r2)) + c * (r1 * r2));
        if (normals) normals->push_back((b - a).cross(c - a).normalized());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Minimum-volume box fitting

std::array<Vec3, 8> OrientedBox3D::corners() const {
    std::array<Vec3, 8> out;
    int i = 0;
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            for (int sz : {-1, 1})
                out[i++] = pose.apply(
                    {0.5 * sx * dimensions.x, 0.5 * sy * dimensions.y, 0.5 * sz * dimensions.z});
    return out;
}

bool OrientedBox3D::contains(const Vec3& p, double slack) const {
    Vec3 local = pose.inverse().apply(p);
    return std::abs(local.x) <= 0.5 * dimensions.x + slack &&
           std::abs(local.y) <= 0.5 * dimensions.y + slack &&
           std::abs(local.z) <= 0.5 * dimensions.z + slack;
}

namespace {

struct FrameFit {
    double volume = std::numeric_limits<double>::infinity();
    Vec3 dims;
    Vec3 center_local;
};

FrameFit fit_in_frame(const std::vector<Vec3>& points, const Rotation& rotation) {
    const std::array<double, 9> m = rotation.inverse().matrix();
    Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
    Vec3 hi = -lo;
    for (const Vec3& p : points) {
        double lx = m[0] * p.x + m[1] * p.y + m[2] * p.z;
        double ly = m[3] * p.x + m[4] * p.y + m[5] * p.z;
        double lz = m[6] * p.x + m[7] * p.y + m[8] * p.z;
        lo.x = std::min(lo.x, lx);
        lo.y = std::min(lo.y, ly);
        lo.z = std::min(lo.z, lz);
        hi.x = std::max(hi.x, lx);
        hi.y = std::max(hi.y, ly);
        hi.z = std::max(hi.z, lz);
    }
    FrameFit fit;
    fit.dims = {std::max(hi.x - lo.x, kMinBoxExtent), std::max(hi.y - lo.y, kMinBoxExtent),
                std::max(hi.z - lo.z, kMinBoxExtent)};
    fit.center_local = (lo + hi) * 0.5;
    fit.volume = fit.dims.x * fit.dims.y * fit.dims.z;
    return fit;
}

}  // namespace

OrientedBox3D fit_min_volume_box(const PointCloud& cloud, int n_rotations, RandomSource& rng) {
    require(!cloud.empty(), ErrorCode::empty_cloud, "cannot fit a box to an empty cloud");
    require(n_rotations >= 0, ErrorCode::invalid_argument, "rotation count must be >= 0");

    // The axis-aligned frame is always a candidate, so the fitted volume never
    // exceeds the AABB volume. Ties keep the earliest candidate.
    Rotation best_rot;
    FrameFit best = fit_in_frame(cloud.points, best_rot);
    for (int i = 0; i < n_rotations; ++i) {
        Rotation r = sample_uniform_rotation(rng);
        FrameFit fit = fit_in_frame(cloud.points, r);
        if (fit.volume < best.volume) {
            best = fit;
            best_rot = r;
        }
    }

    // Coordinate descent over axis-angle perturbations, step halving from 5
    // degrees, three rounds.
    const Vec3 axes[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    double step = 5.0 * kPi / 180.0;
    for (int round = 0; round < 3; ++round) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (const Vec3& axis : axes) {
                for (double sign : {1.0, -1.0}) {
                    for (;;) {
                        Rotation candidate =
                            best_rot.compose(Rotation::from_axis_angle(axis, sign * step));
                        FrameFit fit = fit_in_frame(cloud.points, candidate);
                        if (fit.volume < best.volume) {
                            best = fit;
                            best_rot = candidate;
                            improved = true;
                        } else {
                            break;
                        }
                    }
                }
            }
        }
        step *= 0.5;
    }

    return {{best_rot, best_rot.apply(best.center_local)}, best.dims};
}

// ---------------------------------------------------------------------------
// Box overlap by half-space clipping

namespace {

using Polygon = std::vector<Vec3>;

struct HalfSpace {
    Vec3 normal;  // unit, outward
    double offset;  // inside: normal . x <= offset
};

std::array<HalfSpace, 6> box_half_spaces(const OrientedBox3D& box) {
    std::array<HalfSpace, 6> planes;
    const std::array<double, 9> m = box.pose.rotation.matrix();
    const Vec3 axes[3] = {{m[0], m[3], m[6]}, {m[1], m[4], m[7]}, {m[2], m[5], m[8]}};
    const double half[3] = {0.5 * box.dimensions.x, 0.5 * box.dimensions.y,
                            0.5 * box.dimensions.z};
    for (int i = 0; i < 3; ++i) {
        double c = axes[i].dot(box.pose.translation);
        planes[2 * i] = {axes[i], c + half[i]};
        planes[2 * i + 1] = {-axes[i], -c + half[i]};
    }
    return planes;
}

std::vector<Polygon> box_faces(const OrientedBox3D& box) {
    auto c = box.corners();  // index bits: x<<2 | y<<1 | z, - before +
    auto quad = [&](int a, int b, int d, int e) { return Polygon{c[a], c[b], c[d], c[e]}; };
    // Outward winding for each face.
    return {
        quad(0, 1, 3, 2),  // -x
        quad(4, 6, 7, 5),  // +x
        quad(0, 4, 5, 1),  // -y
        quad(2, 3, 7, 6),  // +y
        quad(0, 2, 6, 4),  // -z
        quad(1, 5, 7, 3),  // +z
    };
}

// Sutherland-Hodgman against one half-space. `cut` reports whether any vertex
// was strictly outside.
Polygon clip_polygon(const Polygon& poly, const HalfSpace& hs, double eps, bool* cut) {
    Polygon out;
    out.reserve(poly.size() + 2);
    std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& u = poly[i];
        const Vec3& v = poly[(i + 1) % n];
        double su = hs.normal.dot(u) - hs.offset;
        double sv = hs.normal.dot(v) - hs.offset;
        bool in_u = su <= eps;
        bool in_v = sv <= eps;
        if (in_u) out.push_back(u);
        if (in_u != in_v) {
            double t = su / (su - sv);
            out.push_back(u + (v - u) * t);
        }
        if (!in_u) *cut = true;
    }
    return out;
}

double polygon_area_doubled(const Polygon& poly, const Vec3& normal) {
    Vec3 acc{};
    for (std::size_t i = 1; i + 1 < poly.size(); ++i)
        acc = acc + (poly[i] - poly[0]).cross(poly[i + 1] - poly[0]);
    return std::abs(acc.dot(normal));
}

double polyhedron_volume(const std::vector<Polygon>& faces) {
    double six_v = 0.0;
    for (const Polygon& face : faces) {
        for (std::size_t i = 1; i + 1 < face.size(); ++i) {
            six_v += face[0].dot(face[i].cross(face[i + 1]));
        }
    }
    return six_v / 6.0;
}

}  // namespace

OverlapResult box_overlap(const OrientedBox3D& a, const OrientedBox3D& b) {
    double vol_a = a.volume();
    double vol_b = b.volume();
    require(vol_a > 0.0 && vol_b > 0.0, ErrorCode::invalid_box, "boxes must have positive volume");

    double scale = std::max({a.dimensions.x, a.dimensions.y, a.dimensions.z, b.dimensions.x,
                             b.dimensions.y, b.dimensions.z,
                             (a.pose.translation - b.pose.translation).norm()});
    double eps = 1e-12 * std::max(scale, 1.0);

    std::vector<Polygon> faces = box_faces(a);
    for (const HalfSpace& hs : box_half_spaces(b)) {
        bool cut = false;
        std::vector<Polygon> next;
        next.reserve(faces.size() + 1);
        std::vector<Vec3> rim;
        for (const Polygon& face : faces) {
            Polygon clipped = clip_polygon(face, hs, eps, &cut);
            if (clipped.size() >= 3) {
                for (const Vec3& p : clipped)
                    if (std::abs(hs.normal.dot(p) - hs.offset) <= 4.0 * eps) rim.push_back(p);
                next.push_back(std::move(clipped));
            }
        }
        if (cut && rim.size() >= 3) {
            // Deduplicate rim points, then order them around the centroid to
            // build the cap face. The section of a convex solid is convex so
            // angular order is valid.
            std::vector<Vec3> unique;
            for (const Vec3& p : rim) {
                bool dup = false;
                for (const Vec3& q : unique)
                    if ((p - q).squared_norm() <= 1e-20 * std::max(scale * scale, 1.0)) {
                        dup = true;
                        break;
                    }
                if (!dup) unique.push_back(p);
            }
            if (unique.size() >= 3) {
                Vec3 centroid{};
                for (const Vec3& p : unique) centroid = centroid + p;
                centroid = centroid / static_cast<double>(unique.size());
                Vec3 ref = (unique[0] - centroid).normalized();
                Vec3 ortho = hs.normal.cross(ref);
                std::sort(unique.begin(), unique.end(), [&](const Vec3& p, const Vec3& q) {
                    Vec3 dp = p - centroid, dq = q - centroid;
                    return std::atan2(dp.dot(ortho), dp.dot(ref)) <
                           std::atan2(dq.dot(ortho), dq.dot(ref));
                });
                if (polygon_area_doubled(unique, hs.normal) > eps * eps) next.push_back(unique);
            }
        }
        faces = std::move(next);
        if (faces.empty()) break;
    }

    OverlapResult result;
    result.intersection_volume = faces.empty() ? 0.0 : std::max(0.0, polyhedron_volume(faces));
    result.intersection_volume = std::min({result.intersection_volume, vol_a, vol_b});
    double uni = vol_a + vol_b - result.intersection_volume;
    result.iou = uni > 0.0 ? result.intersection_volume / uni : 0.0;
    result.iog = result.intersection_volume / vol_b;
    return result;
}

// ---------------------------------------------------------------------------
// Mesh constructors and integrals

TriangleMesh make_box_mesh(const Vec3& dims) {
    require(dims.x > 0.0 && dims.y > 0.0 && dims.z > 0.0, ErrorCode::invalid_argument,
            "box dimensions must be positive");
    TriangleMesh mesh;
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            for (int sz : {-1, 1})
                mesh.vertices.push_back(
                    {0.5 * sx * dims.x, 0.5 * sy * dims.y, 0.5 * sz * dims.z});
    // Corner index bits: x<<2 | y<<1 | z.
    const std::array<std::int32_t, 3> tris[] = {
        {0, 1, 3}, {0, 3, 2},  // -x
        {4, 6, 7}, {4, 7, 5},  // +x
        {0, 4, 5}, {0, 5, 1},  // -y
        {2, 3, 7}, {2, 7, 6},  // +y
        {0, 2, 6}, {0, 6, 4},  // -z
        {1, 5, 7}, {1, 7, 3},  // +z
    };
    mesh.triangles.assign(std::begin(tris), std::end(tris));
    return mesh;
}

TriangleMesh make_cylinder_mesh(double radius, double height, int segments) {
    require(radius > 0.0 && height > 0.0 && segments >= 3, ErrorCode::invalid_argument,
            "invalid cylinder parameters");
    TriangleMesh mesh;
    double hz = 0.5 * height;
    for (int i = 0; i < segments; ++i) {
        double a = 2.0 * kPi * i / segments;
        mesh.vertices.push_back({radius * std::cos(a), radius * std::sin(a), -hz});
        mesh.vertices.push_back({radius * std::cos(a), radius * std::sin(a), hz});
    }
    std::int32_t bottom_center = static_cast<std::int32_t>(mesh.vertices.size());
    mesh.vertices.push_back({0, 0, -hz});
    std::int32_t top_center = bottom_center + 1;
    mesh.vertices.push_back({0, 0, hz});
    for (int i = 0; i < segments; ++i) {
        std::int32_t b0 = 2 * i, t0 = 2 * i + 1;
        std::int32_t b1 = 2 * ((i + 1) % segments), t1 = b1 + 1;
        mesh.triangles.push_back({b0, b1, t1});
        mesh.triangles.push_back({b0, t1, t0});
        mesh.triangles.push_back({bottom_center, b1, b0});
        mesh.triangles.push_back({top_center, t0, t1});
    }
    return mesh;
}

TriangleMesh make_l_prism_mesh(double lx, double ly, double notch_x, double notch_y,
                               double height) {
    require(lx > 0 && ly > 0 && height > 0, ErrorCode::invalid_argument, "invalid L dimensions");
    require(notch_x > 0 && notch_x < lx && notch_y > 0 && notch_y < ly,
            ErrorCode::invalid_argument, "notch must cut a strict corner");
    // Counter-clockwise outline of the L, centered afterwards.
    const double x0 = 0, x1 = lx - notch_x, x2 = lx;
    const double y0 = 0, y1 = ly - notch_y, y2 = ly;
    const Vec3 offset{-0.5 * lx, -0.5 * ly, 0.0};
    std::array<Vec3, 6> outline = {Vec3{x0, y0, 0}, {x2, y0, 0}, {x2, y1, 0},
                                   {x1, y1, 0},     {x1, y2, 0}, {x0, y2, 0}};
    TriangleMesh mesh;
    double hz = 0.5 * height;
    for (const Vec3& p : outline) mesh.vertices.push_back(p + offset + Vec3{0, 0, -hz});
    for (const Vec3& p : outline) mesh.vertices.push_back(p + offset + Vec3{0, 0, hz});
    // Caps: four triangles avoiding the reflex corner at outline vertex 3.
    const std::array<std::int32_t, 3> bottom[] = {{1, 3, 2}, {0, 3, 1}, {0, 4, 3}, {0, 5, 4}};
    for (const auto& t : bottom) mesh.triangles.push_back(t);
    for (const auto& t : bottom) mesh.triangles.push_back({static_cast<std::int32_t>(t[0] + 6),
                                                           static_cast<std::int32_t>(t[2] + 6),
                                                           static_cast<std::int32_t>(t[1] + 6)});
    for (int i = 0; i < 6; ++i) {
        std::int32_t a = i, b = (i + 1) % 6;
        mesh.triangles.push_back({a, b, static_cast<std::int32_t>(b + 6)});
        mesh.triangles.push_back({a, static_cast<std::int32_t>(b + 6),
                                  static_cast<std::int32_t>(a + 6)});
    }
    return mesh;
}

double mesh_volume(const TriangleMesh& mesh) {
    double six_v = 0.0;
    for (const auto& tri : mesh.triangles) {
        six_v += mesh.vertices[tri[0]].dot(mesh.vertices[tri[1]].cross(mesh.vertices[tri[2]]));
    }
    return six_v / 6.0;
}

double mesh_surface_area(const TriangleMesh& mesh) {
    double area = 0.0;
    for (const auto& tri : mesh.triangles) {
        const Vec3& a = mesh.vertices[tri[0]];
        area += 0.5 * (mesh.vertices[tri[1]] - a).cross(mesh.vertices[tri[2]] - a).norm();
    }
    return area;
}

}  // namespace dp
