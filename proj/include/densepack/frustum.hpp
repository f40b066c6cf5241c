// SPDX-FileCopyrightText: 2026 densepack contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef DENSEPACK_FRUSTUM_HPP
#define DENSEPACK_FRUSTUM_HPP

#include <cstdint>
#include <vector>

#include "densepack/geometry.hpp"

namespace dp {

struct Box2D {
    double x_low = 0.0;
    double y_low = 0.0;
    double x_high = 0.0;
    double y_high = 0.0;

    double width() const { return x_high - x_low; }
    double height() const { return y_high - y_low; }
};

struct GridResolution {
    int d = 96;
    int h = 64;
    int w = 64;
};

inline constexpr double kDefaultNearMargin = 0.01;  // "slightly closer" default
inline constexpr double kMinNearPlane = 1e-3;

/// Camera-aligned trapezoidal voxel lattice behind a 2D image box, clipped
/// between a near and a far plane, depths spaced linearly along D.
class Frustum {
public:
    static Frustum create(const PinholeIntrinsics& intr, const Box2D& box, double near,
                          double far, const GridResolution& res);

    const PinholeIntrinsics& intrinsics() const { return intr_; }
    const Box2D& box2d() const { return box_; }
    double near_plane() const { return near_; }
    double far_plane() const { return far_; }
    const GridResolution& resolution() const { return res_; }

    double depth_step() const { return (far_ - near_) / res_.d; }

    /// Camera-space position of the (d, h, w) voxel center.
    Vec3 voxel_center(int d, int h, int w) const;

    /// Continuous frustum coordinate map; accepts fractional indices
    /// (including the padding layer at -1 and D/H/W used by mesh extraction).
    Vec3 warp_index(double d, double h, double w) const;

    /// Voxel containing a camera-space point; false when outside.
    bool voxel_of(const Vec3& p, int* d, int* h, int* w) const;

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(res_.d) * res_.h * res_.w;
    }

private:
    PinholeIntrinsics intr_;
    Box2D box_;
    double near_ = 0.0;
    double far_ = 0.0;
    GridResolution res_;
};

/// near = (min cloud depth) - margin clamped to >= 1 mm; far = scene_far.
Frustum build_frustum(const PinholeIntrinsics& intr, const Box2D& box2d,
                      const PointCloud& partial_cloud, double scene_far,
                      const GridResolution& res = {}, double near_margin = kDefaultNearMargin);

/// C x D x H x W feature volume; the standard encoding is RGB + mask (C=4).
struct FeatureVolume {
    Frustum frustum;
    int channels = 4;
    std::vector<float> data;

    float at(int c, int d, int h, int w) const;
};

struct OccupancyGrid {
    Frustum frustum;
    std::vector<double> values;  // D*H*W in [0,1]

    double at(int d, int h, int w) const;
    void set(int d, int h, int w, double p);

    static OccupancyGrid zero(const Frustum& f);
};

/// Writes each in-frustum point's RGB into channels 0-2 and its mask flag
/// into channel 3; collisions are last-writer-wins.
FeatureVolume voxelize_cloud(const Frustum& f, const PointCloud& cloud,
                             const std::vector<std::uint8_t>& mask_flags);

/// Binary occupancy: 1 where the voxel center lies inside the posed mesh
/// (ray-parity with a 3-direction majority vote).
OccupancyGrid occupancy_from_mesh(const Frustum& f, const TriangleMesh& mesh,
                                  const Pose& mesh_pose);

/// Marching Cubes over the grid padded with one zero layer, vertices warped
/// to camera space through the exact frustum map.
TriangleMesh extract_mesh(const OccupancyGrid& grid, double threshold);

/// extract_mesh then uniform surface sampling.
PointCloud complete_to_cloud(const OccupancyGrid& grid, double threshold, std::size_t n_points,
                             RandomSource& rng);

}  // namespace dp

#endif
