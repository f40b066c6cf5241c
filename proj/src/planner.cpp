// SPDX-FileCopyrightText: 2026 densepack contributors
// SPDX-License-Identifier: Apache-2.0

#include "densepack/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dp {

std::vector<Rotation> default_yaw_orientations(int count) {
    require(count >= 1, ErrorCode::invalid_argument, "orientation count must be positive");
    std::vector<Rotation> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k)
        out.push_back(Rotation::from_axis_angle({0, 0, 1}, 2.0 * M_PI * k / count));
    return out;
}

double cost_dblf(const Pose& placement, double epsilon) {
    const Vec3& t = placement.translation;
    return t.z + epsilon * (t.x + t.y);
}

double cost_hm(const HeightMap& before, const HeightMap& after) {
    require(before.cells_u() == after.cells_u() && before.cells_v() == after.cells_v(),
            ErrorCode::shape_mismatch, "height-map shapes differ");
    double area = before.cell_size() * before.cell_size();
    return (integrated_volume(after) - integrated_volume(before)) / area;
}

namespace {

struct CandidateEval {
    bool feasible = false;
    double z = 0.0;
    double cost = 0.0;
};

// Rest height, overflow and corridor check, and selection cost in one
// footprint scan. Out-of-grid candidates are infeasible, not errors.
CandidateEval evaluate_candidate(const HeightMap& map, const Footprint& fp, int u, int v,
                                 CostModel cost_model, double epsilon) {
    CandidateEval eval;
    if (u < 0 || v < 0 || u + fp.nu > map.cells_u() || v + fp.nv > map.cells_v()) return eval;

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
    if (!std::isfinite(z)) return eval;

    double lz = map.container().dims.z;
    double delta = 0.0;
    for (int i = 0; i < fp.nu; ++i) {
        const std::uint8_t* mask_row = fp.mask.data() + static_cast<std::size_t>(i) * fp.nv;
        const double* top_row = fp.top.data() + static_cast<std::size_t>(i) * fp.nv;
        for (int j = 0; j < fp.nv; ++j) {
            if (!mask_row[j]) continue;
            double h = z + top_row[j];
            if (h > lz) return eval;  // would overflow
            double rise = h - map.at(u + i, v + j);
            if (rise > 0.0) delta += rise;
        }
    }

    eval.feasible = true;
    eval.z = z;
    if (cost_model == CostModel::dblf) {
        double s = map.cell_size();
        double qx = u * s - fp.anchor_x;
        double qy = v * s - fp.anchor_y;
        eval.cost = z + epsilon * (qx + qy);
    } else {
        eval.cost = delta;
    }
    return eval;
}

Pose placement_pose(const HeightMap& map, const Footprint& fp, const Rotation& rotation, int u,
                    int v, double z) {
    double s = map.cell_size();
    return {rotation, {u * s - fp.anchor_x, v * s - fp.anchor_y, z}};
}

}  // namespace

bool motion_feasible(const Pose& /*grasp*/, const Pose& placement, const Footprint& fp,
                     const HeightMap& map) {
    // Recover the reference cell from the placement translation.
    double s = map.cell_size();
    int u = static_cast<int>(std::llround((placement.translation.x + fp.anchor_x) / s));
    int v = static_cast<int>(std::llround((placement.translation.y + fp.anchor_y) / s));
    if (u < 0 || v < 0 || u + fp.nu > map.cells_u() || v + fp.nv > map.cells_v()) return false;

    double z = placement.translation.z;
    double lz = map.container().dims.z;
    for (int i = 0; i < fp.nu; ++i)
        for (int j = 0; j < fp.nv; ++j) {
            std::size_t k = static_cast<std::size_t>(i) * fp.nv + j;
            if (!fp.mask[k]) continue;
            if (z + fp.top[k] > lz) return false;                       // overflow
            if (z + fp.bottom[k] < map.at(u + i, v + j) - 1e-12) return false;  // penetration
        }
    return true;
}

std::optional<Plan> plan(const HeightMap& map, const std::vector<GraspCandidate>& grasps,
                         CostModel cost_model, const PlannerConfig& cfg) {
    require(!grasps.empty(), ErrorCode::invalid_argument, "no grasp candidates");
    require(cfg.samples >= 1, ErrorCode::invalid_argument, "sample count must be >= 1");
    require(cfg.epsilon > 0.0, ErrorCode::invalid_argument, "epsilon must be positive");

    const std::vector<Rotation> orientations =
        cfg.orientation_set.empty() ? default_yaw_orientations() : cfg.orientation_set;

    // Footprints depend only on (grasp, orientation); compute them once.
    std::vector<std::vector<Footprint>> footprints(grasps.size());
    for (std::size_t g = 0; g < grasps.size(); ++g) {
        require(!grasps[g].object_cloud.empty(), ErrorCode::empty_cloud,
                "grasp candidate with empty object cloud");
        footprints[g].reserve(orientations.size());
        for (const Rotation& r : orientations)
            footprints[g].push_back(rasterize(grasps[g].object_cloud, r, map.cell_size()));
    }

    struct Best {
        double cost = std::numeric_limits<double>::infinity();
        int grasp = -1, u = 0, v = 0, rot = 0;
        double z = 0.0;
    } best;

    auto consider = [&](int g, int u, int v, int r) {
        const Footprint& fp = footprints[g][r];
        CandidateEval eval = evaluate_candidate(map, fp, u, v, cost_model, cfg.epsilon);
        if (eval.feasible && eval.cost < best.cost) {
            best = {eval.cost, g, u, v, r, eval.z};
        }
    };

    if (cfg.mode == PlanMode::sampled) {
        RandomSource rng(cfg.seed);
        const std::uint64_t ng = grasps.size();
        const std::uint64_t nu = map.cells_u();
        const std::uint64_t nv = map.cells_v();
        const std::uint64_t nr = orientations.size();
        for (int k = 0; k < cfg.samples; ++k) {
            int g = static_cast<int>(rng.uniform_index(ng));
            int u = static_cast<int>(rng.uniform_index(nu));
            int v = static_cast<int>(rng.uniform_index(nv));
            int r = static_cast<int>(rng.uniform_index(nr));
            consider(g, u, v, r);
        }
    } else {
        int stride = cfg.stride_cells;
        if (stride <= 0) stride = std::max(1, static_cast<int>(std::lround(5e-3 / map.cell_size())));
        for (std::size_t g = 0; g < grasps.size(); ++g)
            for (int u = 0; u < map.cells_u(); u += stride)
                for (int v = 0; v < map.cells_v(); v += stride)
                    for (std::size_t r = 0; r < orientations.size(); ++r)
                        consider(static_cast<int>(g), u, v, static_cast<int>(r));
    }

    if (best.grasp < 0) return std::nullopt;

    const Footprint& fp = footprints[best.grasp][best.rot];
    Plan result;
    result.grasp_index = best.grasp;
    result.grasp_id = grasps[best.grasp].id;
    result.grasp = grasps[best.grasp].pose;
    result.placement = placement_pose(map, fp, orientations[best.rot], best.u, best.v, best.z);
    result.cell_u = best.u;
    result.cell_v = best.v;
    result.rotation_index = best.rot;
    result.rest_height = best.z;
    // Report the canonical cost so a post-hoc recomputation agrees exactly.
    result.cost = cost_model == CostModel::hm
                      ? cost_hm(map, place(map, fp, best.u, best.v, best.z))
                      : cost_dblf(result.placement, cfg.epsilon);
    return result;
}

}  // namespace dp
