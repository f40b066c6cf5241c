// SPDX-FileCopyrightText: 2026 densepack contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef DENSEPACK_PLANNER_HPP
#define DENSEPACK_PLANNER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "densepack/geometry.hpp"
#include "densepack/heightmap.hpp"

namespace dp {

enum class CostModel { dblf, hm };
enum class PlanMode { sampled, exhaustive };

/// A pickable object: gripper pose in the world plus the completed shape
/// expressed in the gripper frame.
struct GraspCandidate {
    std::string id;
    Pose pose;
    PointCloud object_cloud;
};

struct PlannerConfig {
    int samples = 4096;
    double epsilon = 1e-3;  // DBLF tie weight
    std::vector<Rotation> orientation_set;  // defaults to 8 yaws when empty
    PlanMode mode = PlanMode::sampled;
    std::uint64_t seed = 0;
    /// Cell stride for exhaustive enumeration; 0 picks round(5 mm / cell).
    int stride_cells = 0;
};

struct Plan {
    int grasp_index = -1;
    std::string grasp_id;
    Pose grasp;
    Pose placement;  // container frame; translation holds the object origin
    double cost = 0.0;
    int cell_u = 0;
    int cell_v = 0;
    int rotation_index = 0;
    double rest_height = 0.0;
};

/// Yaw rotations about container z, evenly spaced over a full turn.
std::vector<Rotation> default_yaw_orientations(int count = 8);

double cost_dblf(const Pose& placement, double epsilon);

/// Total cell height increase between two maps of identical shape, in units
/// of meters x cells. Defined as the integrated-volume delta over the cell
/// area so the two accountings agree exactly.
double cost_hm(const HeightMap& before, const HeightMap& after);

/// Geometric feasibility of a straight-down placement: footprint inside the
/// grid, no overflow, and a clear vertical descent corridor.
bool motion_feasible(const Pose& grasp, const Pose& placement, const Footprint& fp,
                     const HeightMap& map);

std::optional<Plan> plan(const HeightMap& map, const std::vector<GraspCandidate>& grasps,
                         CostModel cost, const PlannerConfig& cfg);

}  // namespace dp

#endif
