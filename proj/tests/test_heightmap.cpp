#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "densepack/heightmap.hpp"
#include "support/oracles.hpp"

using namespace dp;

namespace {

PointCloud cube_surface_cloud(double side, std::size_t n, std::uint64_t seed,
                              const Vec3& offset = {}) {
    // Box mesh centered, then shifted so it spans [0, side]^2 in x/y by default.
    TriangleMesh mesh = make_box_mesh({side, side, side});
    RandomSource rng(seed);
    PointCloud cloud = sample_mesh_surface(mesh, n, rng);
    Vec3 shift = offset + Vec3{0.5 * side, 0.5 * side, 0.5 * side};
    for (Vec3& p : cloud.points) p = p + shift;
    return cloud;
}

// Dense structured sampling of a cube's top and bottom faces: one point per
// `step` so every footprint cell is covered deterministically.
PointCloud cube_grid_cloud(double side, double step) {
    PointCloud cloud;
    int n = static_cast<int>(std::llround(side / step));
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            cloud.points.push_back({i * step, j * step, 0.0});
            cloud.points.push_back({i * step, j * step, side});
        }
    return cloud;
}

}  // namespace

TEST_CASE("rasterize a unit cube surface cloud") {
    PointCloud cloud = cube_grid_cloud(1.0, 1e-3);
    Footprint fp = rasterize(cloud, Rotation(), 1e-3);
    CHECK(fp.nu == 1000);
    CHECK(fp.nv == 1000);
    CHECK(fp.anchor_x == doctest::Approx(0.0).epsilon(1e-6));
    // Every footprint cell carries the full bottom/top profile.
    for (int i = 0; i < fp.nu; ++i)
        for (int j = 0; j < fp.nv; ++j) {
            REQUIRE(fp.occupied(i, j));
            REQUIRE(fp.bottom[i * fp.nv + j] == 0.0);
            REQUIRE(fp.top[i * fp.nv + j] == 1.0);
        }
}

TEST_CASE("rasterize a single point") {
    PointCloud cloud;
    cloud.points = {{0.37, -0.21, 0.64}};
    Footprint fp = rasterize(cloud, Rotation(), 1e-3);
    CHECK(fp.nu == 1);
    CHECK(fp.nv == 1);
    CHECK(fp.cell_count == 1);
    CHECK(fp.bottom[0] == doctest::Approx(0.64));
    CHECK(fp.top[0] == doctest::Approx(0.64));
}

TEST_CASE("rasterize swaps footprint dimensions under a 90 degree yaw") {
    TriangleMesh mesh = make_box_mesh({0.2, 0.1, 0.05});
    RandomSource rng(8);
    PointCloud cloud = sample_mesh_surface(mesh, 50000, rng);
    Footprint fp0 = rasterize(cloud, Rotation(), 1e-3);
    Footprint fp90 = rasterize(cloud, Rotation::from_axis_angle({0, 0, 1}, M_PI / 2), 1e-3);
    CHECK(fp0.nu == doctest::Approx(200).epsilon(0.02));
    CHECK(fp0.nv == doctest::Approx(100).epsilon(0.02));
    CHECK(fp90.nu == doctest::Approx(100).epsilon(0.02));
    CHECK(fp90.nv == doctest::Approx(200).epsilon(0.02));

    PointCloud empty;
    CHECK_THROWS_AS(rasterize(empty, Rotation(), 1e-3), Error);
}

TEST_CASE("lowest placeable height follows the max rule") {
    Container box = Container::create({0.1, 0.1, 0.3});
    HeightMap map = HeightMap::zero(box, 0.01);  // 10x10 cells

    // Flat object covering 4x4 cells with a flat bottom at z=0.
    PointCloud cloud;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (double z : {0.0, 0.02})
                cloud.points.push_back({i * 0.01 + 0.005, j * 0.01 + 0.005, z});
    Footprint fp = rasterize(cloud, Rotation(), 0.01);
    REQUIRE(fp.nu == 4);
    REQUIRE(fp.nv == 4);

    CHECK(lowest_placeable_height(map, fp, 0, 0) == doctest::Approx(0.0));

    // Stair: one half of the container at 0.10 m.
    for (int u = 0; u < 10; ++u)
        for (int v = 5; v < 10; ++v) map.set(u, v, 0.10);
    // Object spanning both regions rests on the step.
    CHECK(lowest_placeable_height(map, fp, 0, 3) == doctest::Approx(0.10));
    // Entirely on the low region.
    CHECK(lowest_placeable_height(map, fp, 0, 0) == doctest::Approx(0.0));

    CHECK_THROWS_AS(lowest_placeable_height(map, fp, 8, 0), Error);
}

TEST_CASE("lowest placeable height matches the descent oracle") {
    RandomSource rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        Container box = Container::create({0.06, 0.06, 1.0});
        HeightMap map = HeightMap::zero(box, 0.01);  // 6x6
        for (int u = 0; u < 6; ++u)
            for (int v = 0; v < 6; ++v) map.set(u, v, rng.uniform(0.0, 0.2));

        PointCloud cloud;
        int nu = 2 + static_cast<int>(rng.uniform_index(3));
        int nv = 2 + static_cast<int>(rng.uniform_index(3));
        for (int i = 0; i < nu; ++i)
            for (int j = 0; j < nv; ++j) {
                double zb = rng.uniform(0.0, 0.05);
                cloud.points.push_back({i * 0.01 + 0.005, j * 0.01 + 0.005, zb});
                cloud.points.push_back({i * 0.01 + 0.005, j * 0.01 + 0.005, zb + 0.03});
            }
        Footprint fp = rasterize(cloud, Rotation(), 0.01);
        int u = static_cast<int>(rng.uniform_index(6 - fp.nu + 1));
        int v = static_cast<int>(rng.uniform_index(6 - fp.nv + 1));
        double z = lowest_placeable_height(map, fp, u, v);
        double oracle = oracles::descent_rest_height(map, fp, u, v);
        CHECK(std::abs(z - oracle) <= 1e-4 + 1e-9);
    }
}

TEST_CASE("placement writes top profiles and leaves other cells untouched") {
    Container box = Container::create({1.2, 1.2, 3.0});
    HeightMap map = HeightMap::zero(box, 0.1);
    PointCloud cloud = cube_surface_cloud(1.0, 60000, 3);
    Footprint fp = rasterize(cloud, Rotation(), 0.1);
    REQUIRE(fp.nu == 10);

    HeightMap placed = place(map, fp, 0, 0, 0.0);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            CHECK(placed.at(i, j) == doctest::Approx(1.0).epsilon(0.02));
    for (int i = 0; i < 12; ++i) {
        CHECK(placed.at(i, 11) == 0.0);
        CHECK(placed.at(11, i) == 0.0);
    }
    // Original map untouched (copy-on-write contract).
    CHECK(map.at(0, 0) == 0.0);

    // Stacking: placing again on top rests at the first object's top.
    double z2 = lowest_placeable_height(placed, fp, 0, 0);
    CHECK(z2 == doctest::Approx(placed.at(0, 0)).epsilon(1e-9));
    HeightMap stacked = place(placed, fp, 0, 0, z2);
    CHECK(stacked.at(5, 5) == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("placement at the lowest height touches without penetrating") {
    RandomSource rng(123);
    for (int trial = 0; trial < 30; ++trial) {
        Container box = Container::create({0.08, 0.08, 2.0});
        HeightMap map = HeightMap::zero(box, 0.01);
        for (int u = 0; u < 8; ++u)
            for (int v = 0; v < 8; ++v) map.set(u, v, rng.uniform(0.0, 0.3));
        PointCloud cloud = cube_surface_cloud(0.03, 4000, 1000 + trial);
        Footprint fp = rasterize(cloud, Rotation(), 0.01);
        int u = static_cast<int>(rng.uniform_index(8 - fp.nu + 1));
        int v = static_cast<int>(rng.uniform_index(8 - fp.nv + 1));
        double z = lowest_placeable_height(map, fp, u, v);
        int contacts = 0;
        for (int i = 0; i < fp.nu; ++i)
            for (int j = 0; j < fp.nv; ++j) {
                if (!fp.occupied(i, j)) continue;
                double gap = z + fp.bottom[i * fp.nv + j] - map.at(u + i, v + j);
                CHECK(gap >= -1e-12);
                if (gap <= 1e-12) ++contacts;
            }
        CHECK(contacts >= 1);
    }
}

TEST_CASE("integrated volume sums cells") {
    Container box = Container::create({0.05, 0.05, 0.3});
    HeightMap map = HeightMap::zero(box, 1e-3);  // 50x50 cells
    CHECK(integrated_volume(map) == 0.0);
    int set_cells = 0;
    for (int u = 0; u < 10 && set_cells < 100; ++u)
        for (int v = 0; v < 10 && set_cells < 100; ++v, ++set_cells) map.set(u, v, 0.02);
    CHECK(integrated_volume(map) == doctest::Approx(2e-6).epsilon(1e-12));
}

TEST_CASE("block volume integrates to the analytic value") {
    Container box = Container::create({0.5, 0.5, 0.5});
    HeightMap map = HeightMap::zero(box, 1e-3);
    PointCloud cloud = cube_surface_cloud(0.2, 100000, 77);
    Footprint fp = rasterize(cloud, Rotation(), 1e-3);
    HeightMap placed = place(map, fp, 10, 10, 0.0);
    // One cell-row of discretization slack around the 0.2^3 block.
    CHECK(integrated_volume(placed) == doctest::Approx(0.008).epsilon(0.02));
}

TEST_CASE("overflow uses a closed boundary at Lz") {
    Container box = Container::create({0.1, 0.1, 0.3});
    HeightMap map = HeightMap::zero(box, 0.01);
    CHECK_FALSE(overflow(map));
    map.set(3, 3, 0.3);
    CHECK_FALSE(overflow(map));  // exactly at Lz is allowed
    map.set(3, 3, 0.301);
    CHECK(overflow(map));
}

TEST_CASE("height-map round trips through serialization") {
    Container box = Container::create({0.16, 0.08, 0.25});
    HeightMap map = HeightMap::zero(box, 2e-3);
    RandomSource rng(4);
    for (int u = 0; u < map.cells_u(); ++u)
        for (int v = 0; v < map.cells_v(); ++v) map.set(u, v, rng.uniform(0.0, 0.25));

    auto path = std::filesystem::temp_directory_path() / "dp_test_heightmap.bin";
    save_heightmap(map, path.string());
    HeightMap loaded = load_heightmap(path.string());
    CHECK(loaded.cells_u() == map.cells_u());
    CHECK(loaded.cells_v() == map.cells_v());
    CHECK(loaded.cell_size() == doctest::Approx(map.cell_size()));
    for (int u = 0; u < map.cells_u(); ++u)
        for (int v = 0; v < map.cells_v(); ++v)
            CHECK(loaded.at(u, v) == doctest::Approx(map.at(u, v)).epsilon(1e-6));

    // Byte-identical on a save/load/save round trip.
    auto path2 = std::filesystem::temp_directory_path() / "dp_test_heightmap2.bin";
    save_heightmap(loaded, path2.string());
    std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
    std::string bytes_a((std::istreambuf_iterator<char>(a)), {});
    std::string bytes_b((std::istreambuf_iterator<char>(b)), {});
    CHECK(bytes_a == bytes_b);
    std::filesystem::remove(path);
    std::filesystem::remove(path2);

    CHECK_THROWS_AS(load_heightmap("/nonexistent/heightmap.bin"), Error);
}

TEST_CASE("depth map ingestion sees the container bottom and a block") {
    // Camera looks straight down at the container from 1 m: container frame
    // z-up equals camera looking along +z after a 180 degree flip about x.
    auto intr = PinholeIntrinsics::create(400, 400, 120, 120, 240, 240);
    Pose cam_from_container{Rotation::from_axis_angle({1, 0, 0}, M_PI), {-0.15, 0.15, 1.0}};
    Container box = Container::create({0.3, 0.3, 0.2}, cam_from_container);

    const int rows = 240, cols = 240;
    std::vector<float> depth(rows * cols, 0.0f);
    Pose to_camera = cam_from_container;
    // Render analytically: for each pixel, intersect the ray with the bottom
    // plane (z=0 in container frame -> depth 1.0) or the block top.
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            // Bottom plane at camera depth 1.0.
            Vec3 at_bottom = unproject(intr, j + 0.5, i + 0.5, 1.0);
            Vec3 in_container = to_camera.inverse().apply(at_bottom);
            if (in_container.x < 0 || in_container.x >= 0.3 || in_container.y < 0 ||
                in_container.y >= 0.3)
                continue;
            bool on_block = in_container.x >= 0.1 && in_container.x < 0.15 &&
                            in_container.y >= 0.1 && in_container.y < 0.15;
            // A 2 cm block: its top surface sits at camera depth 0.98.
            depth[i * cols + j] = on_block ? 0.98f : 1.0f;
        }

    HeightMap map = heightmap_from_depth(intr, depth, rows, cols, box, 0.01);
    CHECK(map.at(0, 0) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(map.at(29, 29) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(map.at(11, 11) == doctest::Approx(0.02).epsilon(1e-4));
    CHECK(map.at(20, 20) == doctest::Approx(0.0).epsilon(1e-6));

    std::vector<float> nothing(rows * cols, 0.0f);
    CHECK_THROWS_AS(heightmap_from_depth(intr, nothing, rows, cols, box, 0.01), Error);
}
