// SPDX-FileCopyrightText: 2026 densepack contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef DENSEPACK_METRICS_HPP
#define DENSEPACK_METRICS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "densepack/geometry.hpp"

namespace dp {

struct ChamferResult {
    double cd_l1 = 0.0;
    double cd_l2 = 0.0;
};

struct F1Result {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct BoxMetrics {
    double iou = 0.0;
    double iog = 0.0;
    double f1 = 0.0;
};

/// Scales both clouds about the origin so the longest edge of the
/// ground-truth box has length 10.
std::pair<PointCloud, PointCloud> normalize_pair(const PointCloud& pred, const PointCloud& gt,
                                                 const OrientedBox3D& gt_box);

/// Symmetric Chamfer distance; cd_l2 averages squared Euclidean nearest
/// distances, cd_l1 averages L1 nearest distances. The accelerated lookup is
/// exact (uniform grid with ring expansion, brute-force fallback).
ChamferResult chamfer(const PointCloud& x, const PointCloud& y);

F1Result f1_tau(const PointCloud& x, const PointCloud& y, double tau);

/// Fits a minimum-volume box to the prediction and overlaps it with the
/// ground-truth box; f1 is the harmonic mean of IoU and IoG.
BoxMetrics box_metrics(const PointCloud& pred_cloud, const OrientedBox3D& gt_box,
                       int n_rotations, RandomSource& rng);

struct InstanceGroundTruth {
    std::string id;
    TriangleMesh mesh;
    Pose mesh_pose;
    OrientedBox3D box;
};

struct MetricsRow {
    std::string id;
    double cd_l1 = 0.0;
    double cd_l2 = 0.0;
    double f1_tau_0 = 0.0;
    double f1_tau_1 = 0.0;
    double f1_tau_2 = 0.0;
    double box_iou = 0.0;
    double box_iog = 0.0;
    double box_f1 = 0.0;
};

struct EvalOptions {
    std::vector<double> taus = {0.1, 0.3, 0.5};  // normalized units
    int gt_samples = 16384;
    int box_rotations = kDefaultBoxFitRotations;
    std::uint64_t seed = 0;
};

struct EvalReport {
    std::vector<MetricsRow> instances;
    bool has_mean = false;
    MetricsRow mean;
};

/// Per-instance normalize -> chamfer / F1 at the configured taus, plus box
/// metrics in the original frame. The aggregate row is the unweighted mean.
EvalReport evaluate_scene(const std::vector<PointCloud>& predictions,
                          const std::vector<InstanceGroundTruth>& ground_truth,
                          const EvalOptions& options = {});

/// Tab-separated table: instance id, cd_l1, cd_l2, f1 at each tau, box_iou,
/// box_iog, box_f1; one row per instance plus a trailing mean row.
std::string format_metrics_table(const EvalReport& report, const EvalOptions& options = {});

}  // namespace dp

#endif
