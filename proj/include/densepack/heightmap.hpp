// SPDX-FileCopyrightText: 2026 densepack contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef DENSEPACK_HEIGHTMAP_HPP
#define DENSEPACK_HEIGHTMAP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "densepack/geometry.hpp"

namespace dp {

/// Open-top container; the container frame has its origin at the bottom
/// interior corner with z up. `pose` maps container frame to camera/world.
struct Container {
    Vec3 dims;  // interior (Lx, Ly, Lz), meters
    Pose pose;

    static Container create(const Vec3& dims, const Pose& pose = Pose::identity());
};

inline constexpr double kDefaultCellSize = 1e-3;  // 1 mm cells

struct Footprint;

/// Per-cell record of the highest sensed or placed surface over the container
/// bottom. Values only ever grow over an episode; `place` returns a new map.
class HeightMap {
public:
    static HeightMap zero(const Container& container, double cell_size = kDefaultCellSize);

    const Container& container() const { return container_; }
    double cell_size() const { return cell_; }
    int cells_u() const { return nu_; }
    int cells_v() const { return nv_; }

    double at(int u, int v) const { return grid_[static_cast<std::size_t>(u) * nv_ + v]; }
    void set(int u, int v, double height);

    const std::vector<double>& grid() const { return grid_; }

private:
    HeightMap() = default;

    Container container_;
    double cell_ = kDefaultCellSize;
    int nu_ = 0;
    int nv_ = 0;
    std::vector<double> grid_;  // row-major, u-major

    friend HeightMap place(const HeightMap&, const Footprint&, int, int, double);
    friend HeightMap load_heightmap(const std::string&);
};

/// Rasterized object silhouette: occupied cells over a local grid anchored at
/// the rotated cloud's min corner, with per-cell bottom/top z profiles
/// relative to the object's placement-frame origin.
struct Footprint {
    int nu = 0;
    int nv = 0;
    std::vector<std::uint8_t> mask;  // nu*nv
    std::vector<double> bottom;      // z of lowest point per cell
    std::vector<double> top;         // z of highest point per cell
    double anchor_x = 0.0;           // local x of cell (0,0) low corner
    double anchor_y = 0.0;
    double cell_size = kDefaultCellSize;
    int cell_count = 0;

    bool occupied(int i, int j) const { return mask[static_cast<std::size_t>(i) * nv + j] != 0; }
};

HeightMap heightmap_from_depth(const PinholeIntrinsics& intr, const std::vector<float>& depth,
                               int rows, int cols, const Container& container,
                               double cell_size = kDefaultCellSize);

/// Rotates the cloud, bins the points into cells, and records min/max z per
/// cell. Pinholes left by sparse clouds are filled by a one-cell
/// morphological closing before profiling.
Footprint rasterize(const PointCloud& cloud, const Rotation& rotation, double cell_size);

/// Rest height of the footprint dropped at reference cell (u, v):
/// max over occupied cells of (H[cell] - bottom_profile[cell]).
double lowest_placeable_height(const HeightMap& map, const Footprint& fp, int u, int v);

/// New map where every footprint cell becomes max(H, z + top_profile);
/// all other cells are unchanged.
HeightMap place(const HeightMap& map, const Footprint& fp, int u, int v, double z);

/// Sum of cell heights times cell area.
double integrated_volume(const HeightMap& map);

/// True iff any cell exceeds the container height. The boundary is closed:
/// a cell exactly at Lz does not overflow.
bool overflow(const HeightMap& map);

// Row-major little-endian float32 grid with a small header; see FORMATS.md.
void save_heightmap(const HeightMap& map, const std::string& path);
HeightMap load_heightmap(const std::string& path);

}  // namespace dp

#endif
