// SPDX-FileCopyrightText: 2026 densepack contributors
// SPDX-License-Identifier: Apache-2.0

#include "densepack/heightmap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace dp {

namespace {

int cell_count_for(double length, double cell) {
    return std::max(1, static_cast<int>(std::ceil(length / cell - 1e-9)));
}

}  // namespace

Container Container::create(const Vec3& dims, const Pose& pose) {
    require(dims.x > 0.0 && dims.y > 0.0 && dims.z > 0.0, ErrorCode::invalid_argument,
            "container dimensions must be positive");
    return {dims, pose};
}

HeightMap HeightMap::zero(const Container& container, double cell_size) {
    require(cell_size > 0.0, ErrorCode::invalid_argument, "cell size must be positive");
    HeightMap map;
    map.container_ = container;
    map.cell_ = cell_size;
    map.nu_ = cell_count_for(container.dims.x, cell_size);
    map.nv_ = cell_count_for(container.dims.y, cell_size);
    map.grid_.assign(static_cast<std::size_t>(map.nu_) * map.nv_, 0.0);
    return map;
}

void HeightMap::set(int u, int v, double height) {
    require(u >= 0 && u < nu_ && v >= 0 && v < nv_, ErrorCode::index_out_of_range,
            "height-map cell out of range");
    require(height >= 0.0, ErrorCode::invalid_argument, "heights are non-negative");
    grid_[static_cast<std::size_t>(u) * nv_ + v] = height;
}

HeightMap heightmap_from_depth(const PinholeIntrinsics& intr, const std::vector<float>& depth,
                               int rows, int cols, const Container& container,
                               double cell_size) {
    require(rows > 0 && cols > 0 && depth.size() == static_cast<std::size_t>(rows) * cols,
            ErrorCode::shape_mismatch, "depth map shape mismatch");
    HeightMap map = HeightMap::zero(container, cell_size);
    Pose to_container = container.pose.inverse();
    bool any = false;
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            float d = depth[static_cast<std::size_t>(i) * cols + j];
            if (!(d > 0.0f) || !std::isfinite(d)) continue;
            Vec3 p = to_container.apply(unproject(intr, j + 0.5, i + 0.5, d));
            if (p.x < 0.0 || p.x >= container.dims.x || p.y < 0.0 || p.y >= container.dims.y)
                continue;
            int u = std::min(map.cells_u() - 1, static_cast<int>(p.x / cell_size));
            int v = std::min(map.cells_v() - 1, static_cast<int>(p.y / cell_size));
            double z = std::max(0.0, p.z);
            if (z > map.at(u, v)) map.set(u, v, z);
            any = true;
        }
    }
    require(any, ErrorCode::no_valid_pixels, "no depth pixel falls inside the container");
    return map;
}

namespace {

// One-cell morphological closing (dilate then erode, 8-connected). Added
// cells take their profiles from already-profiled neighbors.
void close_footprint(Footprint& fp) {
    const int nu = fp.nu, nv = fp.nv;
    auto idx = [nv](int i, int j) { return static_cast<std::size_t>(i) * nv + j; };

    std::vector<std::uint8_t> dilated(static_cast<std::size_t>(nu + 2) * (nv + 2), 0);
    auto didx = [nv](int i, int j) {
        return static_cast<std::size_t>(i + 1) * (nv + 2) + (j + 1);
    };
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            if (!fp.mask[idx(i, j)]) continue;
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) dilated[didx(i + di, j + dj)] = 1;
        }

    std::vector<std::uint8_t> closed(fp.mask.size(), 0);
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            bool keep = true;
            for (int di = -1; di <= 1 && keep; ++di)
                for (int dj = -1; dj <= 1 && keep; ++dj)
                    if (!dilated[didx(i + di, j + dj)]) keep = false;
            if (keep) closed[idx(i, j)] = 1;
        }
    // Closing is extensive: everything originally occupied stays occupied.
    for (std::size_t k = 0; k < closed.size(); ++k)
        if (fp.mask[k]) closed[k] = 1;

    std::vector<std::uint8_t> filled = fp.mask;
    bool progress = true;
    while (progress) {
        progress = false;
        for (int i = 0; i < nu; ++i)
            for (int j = 0; j < nv; ++j) {
                std::size_t k = idx(i, j);
                if (!closed[k] || filled[k]) continue;
                double lo = std::numeric_limits<double>::infinity();
                double hi = -lo;
                for (int di = -1; di <= 1; ++di)
                    for (int dj = -1; dj <= 1; ++dj) {
                        int ni = i + di, nj = j + dj;
                        if (ni < 0 || ni >= nu || nj < 0 || nj >= nv) continue;
                        std::size_t nk = idx(ni, nj);
                        if (!filled[nk]) continue;
                        lo = std::min(lo, fp.bottom[nk]);
                        hi = std::max(hi, fp.top[nk]);
                    }
                if (std::isfinite(lo)) {
                    fp.bottom[k] = lo;
                    fp.top[k] = hi;
                    filled[k] = 1;
                    progress = true;
                }
            }
    }
    fp.mask = std::move(filled);
    fp.cell_count = 0;
    for (std::uint8_t m : fp.mask) fp.cell_count += m;
}

}  // namespace

Footprint rasterize(const PointCloud& cloud, const Rotation& rotation, double cell_size) {
    require(!cloud.empty(), ErrorCode::empty_cloud, "cannot rasterize an empty cloud");
    require(cell_size > 0.0, ErrorCode::invalid_argument, "cell size must be positive");

    std::vector<Vec3> rotated;
    rotated.reserve(cloud.size());
    double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
    double max_x = -min_x, max_y = -min_x;
    for (const Vec3& p : cloud.points) {
        Vec3 q = rotation.apply(p);
        rotated.push_back(q);
        min_x = std::min(min_x, q.x);
        max_x = std::max(max_x, q.x);
        min_y = std::min(min_y, q.y);
        max_y = std::max(max_y, q.y);
    }

    Footprint fp;
    fp.cell_size = cell_size;
    fp.anchor_x = min_x;
    fp.anchor_y = min_y;
    fp.nu = cell_count_for(max_x - min_x, cell_size);
    fp.nv = cell_count_for(max_y - min_y, cell_size);
    std::size_t cells = static_cast<std::size_t>(fp.nu) * fp.nv;
    fp.mask.assign(cells, 0);
    fp.bottom.assign(cells, std::numeric_limits<double>::infinity());
    fp.top.assign(cells, -std::numeric_limits<double>::infinity());

    for (const Vec3& q : rotated) {
        int i = std::min(fp.nu - 1, static_cast<int>((q.x - min_x) / cell_size));
        int j = std::min(fp.nv - 1, static_cast<int>((q.y - min_y) / cell_size));
        std::size_t k = static_cast<std::size_t>(i) * fp.nv + j;
        fp.mask[k] = 1;
        fp.bottom[k] = std::min(fp.bottom[k], q.z);
        fp.top[k] = std::max(fp.top[k], q.z);
    }

    close_footprint(fp);
    return fp;
}

double lowest_placeable_height(const HeightMap& map, const Footprint& fp, int u, int v) {
    require(u >= 0 && v >= 0 && u + fp.nu <= map.cells_u() && v + fp.nv <= map.cells_v(),
            ErrorCode::out_of_bounds, "footprint does not fit inside the height-map");
    double z = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < fp.nu; ++i) {
        const std::uint8_t* mask_row = fp.mask.data() + static_cast<std::size_t>(i) * fp.nv;
        const double* bottom_row = fp.bottom.data() + static_cast<std::size_t>(i) * fp.nv;
        for (int j = 0; j < fp.nv; ++j) {
            if (!mask_row[j]) continue;
            double candidate = map.at(u + i, v + j) - bottom_row[j];
            if (candidate > z) z = candidate;
        }
    }
    require(std::isfinite(z), ErrorCode::invalid_argument, "footprint has no occupied cell");
    return z;
}

HeightMap place(const HeightMap& map, const Footprint& fp, int u, int v, double z) {
    require(u >= 0 && v >= 0 && u + fp.nu <= map.cells_u() && v + fp.nv <= map.cells_v(),
            ErrorCode::out_of_bounds, "footprint does not fit inside the height-map");
    HeightMap out = map;
    for (int i = 0; i < fp.nu; ++i)
        for (int j = 0; j < fp.nv; ++j) {
            std::size_t k = static_cast<std::size_t>(i) * fp.nv + j;
            if (!fp.mask[k]) continue;
            double h = z + fp.top[k];
            std::size_t g = static_cast<std::size_t>(u + i) * out.nv_ + (v + j);
            if (h > out.grid_[g]) out.grid_[g] = h;
        }
    return out;
}

double integrated_volume(const HeightMap& map) {
    double sum = 0.0;
    for (double h : map.grid()) sum += h;
    return sum * map.cell_size() * map.cell_size();
}

bool overflow(const HeightMap& map) {
    double lz = map.container().dims.z;
    for (double h : map.grid())
        if (h > lz) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Serialization: "DPHM" magic, u32 version, u32 U, u32 V, f32 cell, f32 Lx,
// f32 Ly, f32 Lz, then U*V row-major f32 heights. Little-endian throughout.

namespace {

void ensure_little_endian() {
    require(std::endian::native == std::endian::little, ErrorCode::endianness_mismatch,
            "height-map serialization requires a little-endian host");
}

template <typename T>
void write_raw(std::ofstream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    return value;
}

}  // namespace

void save_heightmap(const HeightMap& map, const std::string& path) {
    ensure_little_endian();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorCode::io_failure, "cannot open " + path + " for writing");
    out.write("DPHM", 4);
    write_raw<std::uint32_t>(out, 1);
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(map.cells_u()));
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(map.cells_v()));
    write_raw<float>(out, static_cast<float>(map.cell_size()));
    write_raw<float>(out, static_cast<float>(map.container().dims.x));
    write_raw<float>(out, static_cast<float>(map.container().dims.y));
    write_raw<float>(out, static_cast<float>(map.container().dims.z));
    for (double h : map.grid()) write_raw<float>(out, static_cast<float>(h));
    require(out.good(), ErrorCode::io_failure, "failed writing " + path);
}

HeightMap load_heightmap(const std::string& path) {
    ensure_little_endian();
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::io_failure, "cannot open " + path);
    char magic[4] = {};
    in.read(magic, 4);
    require(in.good() && std::memcmp(magic, "DPHM", 4) == 0, ErrorCode::io_failure,
            "not a height-map file: " + path);
    std::uint32_t version = read_raw<std::uint32_t>(in);
    require(version == 1, ErrorCode::io_failure, "unsupported height-map version");
    std::uint32_t nu = read_raw<std::uint32_t>(in);
    std::uint32_t nv = read_raw<std::uint32_t>(in);
    float cell = read_raw<float>(in);
    float lx = read_raw<float>(in);
    float ly = read_raw<float>(in);
    float lz = read_raw<float>(in);
    require(in.good() && nu > 0 && nv > 0 && cell > 0 && lx > 0 && ly > 0 && lz > 0,
            ErrorCode::io_failure, "corrupt height-map header");

    HeightMap map;
    map.container_ = Container::create({lx, ly, lz});
    map.cell_ = cell;
    map.nu_ = static_cast<int>(nu);
    map.nv_ = static_cast<int>(nv);
    map.grid_.resize(static_cast<std::size_t>(nu) * nv);
    for (double& h : map.grid_) h = read_raw<float>(in);
    require(in.good(), ErrorCode::io_failure, "truncated height-map file");
    return map;
}

}  // namespace dp
