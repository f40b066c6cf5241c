// SPDX-FileCopyrightText: 2026 densepack contributors
// SPDX-License-Identifier: Apache-2.0

#include "densepack/frustum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include "marching_cubes_tables.hpp"

namespace dp {

Frustum Frustum::create(const PinholeIntrinsics& intr, const Box2D& box, double near,
                        double far, const GridResolution& res) {
    require(near > 0.0 && near < far, ErrorCode::invalid_argument,
            "need 0 < near < far");
    require(box.x_low < box.x_high && box.y_low < box.y_high, ErrorCode::invalid_box,
            "degenerate 2D box");
    require(res.d >= 2 && res.h >= 2 && res.w >= 2, ErrorCode::invalid_argument,
            "grid resolution must be at least 2 per axis");
    Frustum f;
    f.intr_ = intr;
    f.box_ = box;
    f.near_ = near;
    f.far_ = far;
    f.res_ = res;
    return f;
}

Vec3 Frustum::warp_index(double d, double h, double w) const {
    double depth = near_ + (d + 0.5) * (far_ - near_) / res_.d;
    double u = box_.x_low + (w + 0.5) * box_.width() / res_.w;
    double v = box_.y_low + (h + 0.5) * box_.height() / res_.h;
    // Padding nodes in front of the near plane may dip to non-positive
    // depth when near is tiny; clamp so the map stays defined.
    depth = std::max(depth, 1e-6);
    return unproject(intr_, u, v, depth);
}

Vec3 Frustum::voxel_center(int d, int h, int w) const {
    require(d >= 0 && d < res_.d && h >= 0 && h < res_.h && w >= 0 && w < res_.w,
            ErrorCode::index_out_of_range, "voxel index out of range");
    return warp_index(d, h, w);
}

bool Frustum::voxel_of(const Vec3& p, int* d, int* h, int* w) const {
    if (p.z <= 0.0) return false;
    if (p.z < near_ || p.z >= far_) return false;
    PixelDepth pd = project(intr_, p);
    double fx = (pd.u - box_.x_low) / box_.width() * res_.w;
    double fy = (pd.v - box_.y_low) / box_.height() * res_.h;
    double fz = (pd.depth - near_) / (far_ - near_) * res_.d;
    if (fx < 0.0 || fy < 0.0 || fz < 0.0) return false;
    int iw = static_cast<int>(fx);
    int ih = static_cast<int>(fy);
    int id = static_cast<int>(fz);
    if (iw >= res_.w || ih >= res_.h || id >= res_.d) return false;
    *d = id;
    *h = ih;
    *w = iw;
    return true;
}

Frustum build_frustum(const PinholeIntrinsics& intr, const Box2D& box2d,
                      const PointCloud& partial_cloud, double scene_far,
                      const GridResolution& res, double near_margin) {
    require(!partial_cloud.empty(), ErrorCode::empty_cloud, "partial cloud is empty");
    double min_depth = std::numeric_limits<double>::infinity();
    for (const Vec3& p : partial_cloud.points) {
        require(p.z > 0.0, ErrorCode::invalid_argument, "cloud points must have positive depth");
        min_depth = std::min(min_depth, p.z);
    }
    double near = std::max(min_depth - near_margin, kMinNearPlane);
    return Frustum::create(intr, box2d, near, scene_far, res);
}

float FeatureVolume::at(int c, int d, int h, int w) const {
    const GridResolution& r = frustum.resolution();
    return data[((static_cast<std::size_t>(c) * r.d + d) * r.h + h) * r.w + w];
}

double OccupancyGrid::at(int d, int h, int w) const {
    const GridResolution& r = frustum.resolution();
    return values[(static_cast<std::size_t>(d) * r.h + h) * r.w + w];
}

void OccupancyGrid::set(int d, int h, int w, double p) {
    require(p >= 0.0 && p <= 1.0, ErrorCode::invalid_argument, "occupancy must be in [0,1]");
    const GridResolution& r = frustum.resolution();
    values[(static_cast<std::size_t>(d) * r.h + h) * r.w + w] = p;
}

OccupancyGrid OccupancyGrid::zero(const Frustum& f) {
    return {f, std::vector<double>(f.voxel_count(), 0.0)};
}

FeatureVolume voxelize_cloud(const Frustum& f, const PointCloud& cloud,
                             const std::vector<std::uint8_t>& mask_flags) {
    require(cloud.has_colors() || cloud.empty(), ErrorCode::invalid_argument,
            "voxelize_cloud needs per-point colors");
    require(mask_flags.size() == cloud.size(), ErrorCode::shape_mismatch,
            "mask flag count differs from point count");
    FeatureVolume vol{f, 4, std::vector<float>(4 * f.voxel_count(), 0.0f)};
    const GridResolution& r = f.resolution();
    std::size_t plane = f.voxel_count();
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        int d, h, w;
        if (!f.voxel_of(cloud.points[i], &d, &h, &w)) continue;
        std::size_t at = (static_cast<std::size_t>(d) * r.h + h) * r.w + w;
        vol.data[at] = cloud.colors[i][0];
        vol.data[plane + at] = cloud.colors[i][1];
        vol.data[2 * plane + at] = cloud.colors[i][2];
        vol.data[3 * plane + at] = mask_flags[i] ? 1.0f : 0.0f;
    }
    return vol;
}

// ---------------------------------------------------------------------------
// Ground-truth occupancy by ray parity

namespace {

struct PosedTriangle {
    Vec3 a, b, c;
};

// Moller-Trumbore; counts crossings with t > 0.
bool ray_hits(const Vec3& origin, const Vec3& dir, const PosedTriangle& tri) {
    constexpr double kEps = 1e-12;
    Vec3 e1 = tri.b - tri.a;
    Vec3 e2 = tri.c - tri.a;
    Vec3 p = dir.cross(e2);
    double det = e1.dot(p);
    if (std::abs(det) < 1e-14) return false;
    double inv = 1.0 / det;
    Vec3 tvec = origin - tri.a;
    double u = tvec.dot(p) * inv;
    if (u < -kEps || u > 1.0 + kEps) return false;
    Vec3 q = tvec.cross(e1);
    double v = dir.dot(q) * inv;
    if (v < -kEps || u + v > 1.0 + kEps) return false;
    return e2.dot(q) * inv > kEps;
}

}  // namespace

OccupancyGrid occupancy_from_mesh(const Frustum& f, const TriangleMesh& mesh,
                                  const Pose& mesh_pose) {
    require(!mesh.empty(), ErrorCode::empty_mesh, "mesh has no triangles");
    std::vector<PosedTriangle> tris;
    tris.reserve(mesh.triangles.size());
    for (const auto& t : mesh.triangles)
        tris.push_back({mesh_pose.apply(mesh.vertices[t[0]]), mesh_pose.apply(mesh.vertices[t[1]]),
                        mesh_pose.apply(mesh.vertices[t[2]])});

    const Vec3 dirs[3] = {
        Vec3{0.12847264, 0.46137816, 0.87782431}.normalized(),
        Vec3{0.82451852, -0.51283711, 0.23927371}.normalized(),
        Vec3{-0.42673415, -0.68542162, 0.58934527}.normalized(),
    };

    OccupancyGrid grid = OccupancyGrid::zero(f);
    const GridResolution& r = f.resolution();
    std::size_t ambiguous = 0;
    for (int d = 0; d < r.d; ++d)
        for (int h = 0; h < r.h; ++h)
            for (int w = 0; w < r.w; ++w) {
                Vec3 center = f.warp_index(d, h, w);
                int inside_votes = 0;
                for (const Vec3& dir : dirs) {
                    int crossings = 0;
                    for (const PosedTriangle& tri : tris)
                        if (ray_hits(center, dir, tri)) ++crossings;
                    if (crossings % 2 == 1) ++inside_votes;
                }
                if (inside_votes != 0 && inside_votes != 3) ++ambiguous;
                if (inside_votes >= 2) grid.set(d, h, w, 1.0);
            }
    require(ambiguous <= f.voxel_count() / 1000, ErrorCode::non_watertight_mesh,
            "inside/outside test ambiguous on more than 0.1% of voxels");
    return grid;
}

// ---------------------------------------------------------------------------
// Marching Cubes over the zero-padded grid

TriangleMesh extract_mesh(const OccupancyGrid& grid, double threshold) {
    require(threshold > 0.0 && threshold < 1.0, ErrorCode::invalid_argument,
            "threshold must lie strictly between 0 and 1");
    bool any = false;
    for (double v : grid.values)
        if (v >= threshold) {
            any = true;
            break;
        }
    require(any, ErrorCode::empty_surface, "no voxel reaches the threshold");

    const GridResolution& r = grid.frustum.resolution();
    const int nd = r.d + 2, nh = r.h + 2, nw = r.w + 2;  // one zero layer per face
    auto value_at = [&](int pd, int ph, int pw) -> double {
        int d = pd - 1, h = ph - 1, w = pw - 1;
        if (d < 0 || d >= r.d || h < 0 || h >= r.h || w < 0 || w >= r.w) return 0.0;
        return grid.at(d, h, w);
    };
    auto node_id = [&](int pd, int ph, int pw) -> std::int64_t {
        return (static_cast<std::int64_t>(pd) * nh + ph) * nw + pw;
    };

    TriangleMesh mesh;
    std::unordered_map<std::int64_t, std::int32_t> edge_vertices;

    // Lattice axes: x = w, y = h, z = d (Bourke corner numbering).
    auto corner_node = [&](int pd, int ph, int pw, int corner) {
        return std::array<int, 3>{pd + mc::kCornerOffsets[corner][2],
                                  ph + mc::kCornerOffsets[corner][1],
                                  pw + mc::kCornerOffsets[corner][0]};
    };

    for (int pd = 0; pd + 1 < nd; ++pd)
        for (int ph = 0; ph + 1 < nh; ++ph)
            for (int pw = 0; pw + 1 < nw; ++pw) {
                double vals[8];
                int cube = 0;
                for (int c = 0; c < 8; ++c) {
                    auto n = corner_node(pd, ph, pw, c);
                    vals[c] = value_at(n[0], n[1], n[2]);
                    if (vals[c] < threshold) cube |= 1 << c;
                }
                int edges = mc::kEdgeTable[cube];
                if (edges == 0) continue;

                std::int32_t edge_vertex[12];
                for (int e = 0; e < 12; ++e) {
                    if (!(edges & (1 << e))) continue;
                    auto na = corner_node(pd, ph, pw, mc::kEdgeCorners[e][0]);
                    auto nb = corner_node(pd, ph, pw, mc::kEdgeCorners[e][1]);
                    std::int64_t ka = node_id(na[0], na[1], na[2]);
                    std::int64_t kb = node_id(nb[0], nb[1], nb[2]);
                    const std::int64_t n_nodes = static_cast<std::int64_t>(nd) * nh * nw;
                    std::int64_t key = ka < kb ? ka * n_nodes + kb : kb * n_nodes + ka;
                    auto it = edge_vertices.find(key);
                    if (it != edge_vertices.end()) {
                        edge_vertex[e] = it->second;
                        continue;
                    }
                    double va = vals[mc::kEdgeCorners[e][0]];
                    double vb = vals[mc::kEdgeCorners[e][1]];
                    double t = (threshold - va) / (vb - va);
                    // Fractional (d, h, w) index of the interpolated vertex,
                    // then the exact frustum warp.
                    double fd = (na[0] - 1) + t * (nb[0] - na[0]);
                    double fh = (na[1] - 1) + t * (nb[1] - na[1]);
                    double fw = (na[2] - 1) + t * (nb[2] - na[2]);
                    std::int32_t idx = static_cast<std::int32_t>(mesh.vertices.size());
                    mesh.vertices.push_back(grid.frustum.warp_index(fd, fh, fw));
                    edge_vertices.emplace(key, idx);
                    edge_vertex[e] = idx;
                }

                for (int t = 0; mc::kTriTable[cube][t] != -1; t += 3) {
                    std::int32_t i0 = edge_vertex[mc::kTriTable[cube][t]];
                    std::int32_t i1 = edge_vertex[mc::kTriTable[cube][t + 1]];
                    std::int32_t i2 = edge_vertex[mc::kTriTable[cube][t + 2]];
                    if (i0 == i1 || i1 == i2 || i0 == i2) continue;
                    mesh.triangles.push_back({i0, i1, i2});
                }
            }

    // The tables emit triangles wound for "inside = below threshold"; flip so
    // outward normals enclose the occupied region (positive signed volume).
    if (mesh_volume(mesh) < 0.0)
        for (auto& tri : mesh.triangles) std::swap(tri[1], tri[2]);

    // Drop any degenerate slivers (zero-area triangles).
    std::vector<std::array<std::int32_t, 3>> kept;
    kept.reserve(mesh.triangles.size());
    for (const auto& tri : mesh.triangles) {
        const Vec3& a = mesh.vertices[tri[0]];
        Vec3 n = (mesh.vertices[tri[1]] - a).cross(mesh.vertices[tri[2]] - a);
        if (n.squared_norm() > 0.0) kept.push_back(tri);
    }
    mesh.triangles = std::move(kept);
    require(!mesh.triangles.empty(), ErrorCode::empty_surface, "isosurface is degenerate");
    return mesh;
}

PointCloud complete_to_cloud(const OccupancyGrid& grid, double threshold, std::size_t n_points,
                             RandomSource& rng) {
    TriangleMesh mesh = extract_mesh(grid, threshold);
    return sample_mesh_surface(mesh, n_points, rng);
}

}  // namespace dp
