// Test-only oracles, independent of the library code paths they check.

#ifndef DENSEPACK_TESTS_ORACLES_HPP
#define DENSEPACK_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <utility>
#include <vector>

#include "densepack/geometry.hpp"
#include "densepack/heightmap.hpp"
#include "densepack/random.hpp"

namespace oracles {

inline double brute_nearest_l2sq(const dp::Vec3& q, const std::vector<dp::Vec3>& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (const dp::Vec3& p : pts) best = std::min(best, (q - p).squared_norm());
    return best;
}

inline double brute_nearest_l1(const dp::Vec3& q, const std::vector<dp::Vec3>& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (const dp::Vec3& p : pts) {
        double d = std::abs(q.x - p.x) + std::abs(q.y - p.y) + std::abs(q.z - p.z);
        best = std::min(best, d);
    }
    return best;
}

struct BruteChamfer {
    double cd_l1 = 0.0;
    double cd_l2 = 0.0;
};

// O(nm) double loop, the oracle for the accelerated implementation.
inline BruteChamfer brute_chamfer(const dp::PointCloud& x, const dp::PointCloud& y) {
    BruteChamfer r;
    for (const dp::Vec3& p : x.points) {
        r.cd_l2 += brute_nearest_l2sq(p, y.points);
        r.cd_l1 += brute_nearest_l1(p, y.points);
    }
    r.cd_l2 /= static_cast<double>(x.points.size());
    r.cd_l1 /= static_cast<double>(x.points.size());
    double sy2 = 0.0, sy1 = 0.0;
    for (const dp::Vec3& p : y.points) {
        sy2 += brute_nearest_l2sq(p, x.points);
        sy1 += brute_nearest_l1(p, x.points);
    }
    r.cd_l2 += sy2 / static_cast<double>(y.points.size());
    r.cd_l1 += sy1 / static_cast<double>(y.points.size());
    return r;
}

// Monte-Carlo estimate of the intersection volume of two oriented boxes by
// sampling uniformly inside box `a`.
inline double mc_box_intersection(const dp::OrientedBox3D& a, const dp::OrientedBox3D& b,
                                  std::size_t samples, std::uint64_t seed) {
    dp::RandomSource rng(seed);
    dp::Pose b_inv = b.pose.inverse();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        dp::Vec3 local{(rng.uniform() - 0.5) * a.dimensions.x,
                       (rng.uniform() - 0.5) * a.dimensions.y,
                       (rng.uniform() - 0.5) * a.dimensions.z};
        dp::Vec3 q = b_inv.apply(a.pose.apply(local));
        if (std::abs(q.x) <= 0.5 * b.dimensions.x && std::abs(q.y) <= 0.5 * b.dimensions.y &&
            std::abs(q.z) <= 0.5 * b.dimensions.z)
            ++hits;
    }
    return a.volume() * static_cast<double>(hits) / static_cast<double>(samples);
}

// Brute-force descent: lower z in fixed steps until the first penetration.
// Starts well above any surface, returns the last penetration-free height.
inline double descent_rest_height(const dp::HeightMap& map, const dp::Footprint& fp, int u, int v,
                                  double step = 1e-4) {
    double z_hi = 0.0;
    for (int i = 0; i < fp.nu; ++i)
        for (int j = 0; j < fp.nv; ++j) {
            if (!fp.mask[i * fp.nv + j]) continue;
            z_hi = std::max(z_hi, map.at(u + i, v + j) - fp.bottom[i * fp.nv + j]);
        }
    z_hi += 10.0 * step;
    auto penetrates = [&](double z) {
        for (int i = 0; i < fp.nu; ++i)
            for (int j = 0; j < fp.nv; ++j) {
                if (!fp.mask[i * fp.nv + j]) continue;
                if (z + fp.bottom[i * fp.nv + j] < map.at(u + i, v + j) - 1e-12) return true;
            }
        return false;
    };
    double z = z_hi;
    while (!penetrates(z - step)) {
        z -= step;
        if (z < -10.0) break;  // flat map, free fall guard
    }
    return z;
}

// V - E + F over the welded mesh; 2 for a closed surface of sphere topology.
inline long euler_characteristic(const dp::TriangleMesh& mesh) {
    std::set<std::pair<std::int32_t, std::int32_t>> edges;
    for (const auto& t : mesh.triangles) {
        for (int k = 0; k < 3; ++k) {
            std::int32_t a = t[k], b = t[(k + 1) % 3];
            edges.insert({std::min(a, b), std::max(a, b)});
        }
    }
    return static_cast<long>(mesh.vertices.size()) - static_cast<long>(edges.size()) +
           static_cast<long>(mesh.triangles.size());
}

inline dp::PointCloud random_cloud(std::size_t n, dp::RandomSource& rng, double extent = 1.0) {
    dp::PointCloud cloud;
    cloud.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        cloud.points.push_back({rng.uniform(-extent, extent), rng.uniform(-extent, extent),
                                rng.uniform(-extent, extent)});
    return cloud;
}

}  // namespace oracles

#endif
