// SPDX-FileCopyrightText: 2026 densepack contributors
// SPDX-License-Identifier: Apache-2.0

#include "densepack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <unordered_map>

namespace dp {

namespace {

// Uniform spatial hash over one cloud supporting exact nearest-neighbor
// queries. Rings of cells are expanded until the best distance found is
// provably at most the distance to any unvisited cell.
class NearestNeighborGrid {
public:
    explicit NearestNeighborGrid(const std::vector<Vec3>& pts) : pts_(pts) {
        lo_ = hi_ = pts[0];
        for (const Vec3& p : pts) {
            lo_ = {std::min(lo_.x, p.x), std::min(lo_.y, p.y), std::min(lo_.z, p.z)};
            hi_ = {std::max(hi_.x, p.x), std::max(hi_.y, p.y), std::max(hi_.z, p.z)};
        }
        double extent = std::max({hi_.x - lo_.x, hi_.y - lo_.y, hi_.z - lo_.z});
        brute_ = pts.size() < 32 || extent <= 0.0;
        if (brute_) return;
        double target = std::cbrt(static_cast<double>(pts.size()));
        h_ = extent / target;
        nx_ = cell_of(hi_.x, lo_.x) + 1;
        ny_ = cell_of(hi_.y, lo_.y) + 1;
        nz_ = cell_of(hi_.z, lo_.z) + 1;
        for (std::size_t i = 0; i < pts.size(); ++i)
            cells_[key(cell_of(pts[i].x, lo_.x), cell_of(pts[i].y, lo_.y),
                       cell_of(pts[i].z, lo_.z))]
                .push_back(static_cast<std::uint32_t>(i));
        max_ring_ = std::max({nx_, ny_, nz_});
    }

    double nearest_l2sq(const Vec3& q) const {
        if (brute_) return brute_l2sq(q);
        double best = std::numeric_limits<double>::infinity();
        search(q, [&](const Vec3& p) { best = std::min(best, (q - p).squared_norm()); },
               [&](double ring_dist) { return best <= ring_dist * ring_dist; });
        return best;
    }

    double nearest_l1(const Vec3& q) const {
        if (brute_) return brute_l1(q);
        double best = std::numeric_limits<double>::infinity();
        search(q, [&](const Vec3& p) { best = std::min(best, l1(q, p)); },
               [&](double ring_dist) { return best <= ring_dist; });
        return best;
    }

private:
    static double l1(const Vec3& a, const Vec3& b) {
        return std::abs(a.x - b.x) + std::abs(a.y - b.y) + std::abs(a.z - b.z);
    }

    double brute_l2sq(const Vec3& q) const {
        double best = std::numeric_limits<double>::infinity();
        for (const Vec3& p : pts_) best = std::min(best, (q - p).squared_norm());
        return best;
    }

    double brute_l1(const Vec3& q) const {
        double best = std::numeric_limits<double>::infinity();
        for (const Vec3& p : pts_) best = std::min(best, l1(q, p));
        return best;
    }

    int cell_of(double x, double origin) const {
        return static_cast<int>((x - origin) / h_);
    }

    std::int64_t key(int ix, int iy, int iz) const {
        return (static_cast<std::int64_t>(ix) * ny_ + iy) * nz_ + iz;
    }

    template <typename Visit, typename Done>
    void search(const Vec3& q, Visit visit, Done done) const {
        int qx = std::clamp(cell_of(q.x, lo_.x), 0, nx_ - 1);
        int qy = std::clamp(cell_of(q.y, lo_.y), 0, ny_ - 1);
        int qz = std::clamp(cell_of(q.z, lo_.z), 0, nz_ - 1);
        // Extra margin for query points outside the grid: their own cell
        // index is clamped, so ring distances stay conservative.
        for (int ring = 0; ring <= max_ring_; ++ring) {
            bool any_cell = false;
            for (int ix = qx - ring; ix <= qx + ring; ++ix) {
                if (ix < 0 || ix >= nx_) continue;
                for (int iy = qy - ring; iy <= qy + ring; ++iy) {
                    if (iy < 0 || iy >= ny_) continue;
                    for (int iz = qz - ring; iz <= qz + ring; ++iz) {
                        if (iz < 0 || iz >= nz_) continue;
                        int cheb = std::max({std::abs(ix - qx), std::abs(iy - qy),
                                             std::abs(iz - qz)});
                        if (cheb != ring) continue;
                        any_cell = true;
                        auto it = cells_.find(key(ix, iy, iz));
                        if (it == cells_.end()) continue;
                        for (std::uint32_t idx : it->second) visit(pts_[idx]);
                    }
                }
            }
            // Any point in ring > r lies at per-axis offset >= r cells from
            // the query cell, hence at distance >= r*h (minus the query's
            // in-cell offset, already covered by using ring-1 here).
            if (done(std::max(0, ring - 1) * h_) && ring > 0) return;
            if (!any_cell && ring > 0) {
                bool exhausted = qx - ring < 0 && qx + ring >= nx_ && qy - ring < 0 &&
                                 qy + ring >= ny_ && qz - ring < 0 && qz + ring >= nz_;
                if (exhausted) return;
            }
        }
    }

    const std::vector<Vec3>& pts_;
    Vec3 lo_, hi_;
    double h_ = 1.0;
    int nx_ = 1, ny_ = 1, nz_ = 1;
    int max_ring_ = 0;
    bool brute_ = false;
    std::unordered_map<std::int64_t, std::vector<std::uint32_t>> cells_;
};

}  // namespace

std::pair<PointCloud, PointCloud> normalize_pair(const PointCloud& pred, const PointCloud& gt,
                                                 const OrientedBox3D& gt_box) {
    double longest = std::max({gt_box.dimensions.x, gt_box.dimensions.y, gt_box.dimensions.z});
    require(longest > 0.0, ErrorCode::invalid_box, "ground-truth box has no extent");
    double s = 10.0 / longest;
    auto scaled = [s](const PointCloud& cloud) {
        PointCloud out;
        out.points.reserve(cloud.size());
        for (const Vec3& p : cloud.points) out.points.push_back(p * s);
        out.colors = cloud.colors;
        return out;
    };
    return {scaled(pred), scaled(gt)};
}

ChamferResult chamfer(const PointCloud& x, const PointCloud& y) {
    require(!x.empty() && !y.empty(), ErrorCode::empty_cloud, "chamfer needs non-empty clouds");
    NearestNeighborGrid gx(x.points);
    NearestNeighborGrid gy(y.points);
    ChamferResult r;
    double sum_l2 = 0.0, sum_l1 = 0.0;
    for (const Vec3& p : x.points) {
        sum_l2 += gy.nearest_l2sq(p);
        sum_l1 += gy.nearest_l1(p);
    }
    r.cd_l2 = sum_l2 / static_cast<double>(x.size());
    r.cd_l1 = sum_l1 / static_cast<double>(x.size());
    sum_l2 = sum_l1 = 0.0;
    for (const Vec3& p : y.points) {
        sum_l2 += gx.nearest_l2sq(p);
        sum_l1 += gx.nearest_l1(p);
    }
    r.cd_l2 += sum_l2 / static_cast<double>(y.size());
    r.cd_l1 += sum_l1 / static_cast<double>(y.size());
    return r;
}

F1Result f1_tau(const PointCloud& x, const PointCloud& y, double tau) {
    require(tau > 0.0, ErrorCode::invalid_argument, "tau must be positive");
    require(!x.empty() && !y.empty(), ErrorCode::empty_cloud, "f1 needs non-empty clouds");
    NearestNeighborGrid gx(x.points);
    NearestNeighborGrid gy(y.points);
    double tau_sq = tau * tau;
    std::size_t hit = 0;
    for (const Vec3& p : x.points)
        if (gy.nearest_l2sq(p) <= tau_sq) ++hit;
    F1Result r;
    r.precision = static_cast<double>(hit) / static_cast<double>(x.size());
    hit = 0;
    for (const Vec3& p : y.points)
        if (gx.nearest_l2sq(p) <= tau_sq) ++hit;
    r.recall = static_cast<double>(hit) / static_cast<double>(y.size());
    r.f1 = (r.precision + r.recall) > 0.0
               ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
               : 0.0;
    return r;
}

BoxMetrics box_metrics(const PointCloud& pred_cloud, const OrientedBox3D& gt_box,
                       int n_rotations, RandomSource& rng) {
    OrientedBox3D fitted = fit_min_volume_box(pred_cloud, n_rotations, rng);
    OverlapResult overlap = box_overlap(fitted, gt_box);
    BoxMetrics m;
    m.iou = overlap.iou;
    m.iog = overlap.iog;
    m.f1 = (m.iou + m.iog) > 0.0 ? 2.0 * m.iou * m.iog / (m.iou + m.iog) : 0.0;
    return m;
}

EvalReport evaluate_scene(const std::vector<PointCloud>& predictions,
                          const std::vector<InstanceGroundTruth>& ground_truth,
                          const EvalOptions& options) {
    require(predictions.size() == ground_truth.size(), ErrorCode::count_mismatch,
            "prediction and ground-truth counts differ");
    require(options.taus.size() == 3, ErrorCode::invalid_argument,
            "evaluate_scene expects three tau values");

    EvalReport report;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const InstanceGroundTruth& gt = ground_truth[i];
        RandomSource rng(derive_seed(options.seed, i));
        PointCloud gt_cloud = transform_cloud(
            gt.mesh_pose, sample_mesh_surface(gt.mesh, options.gt_samples, rng));
        auto [pred_n, gt_n] = normalize_pair(predictions[i], gt_cloud, gt.box);

        MetricsRow row;
        row.id = gt.id;
        ChamferResult cd = chamfer(pred_n, gt_n);
        row.cd_l1 = cd.cd_l1;
        row.cd_l2 = cd.cd_l2;
        row.f1_tau_0 = f1_tau(pred_n, gt_n, options.taus[0]).f1;
        row.f1_tau_1 = f1_tau(pred_n, gt_n, options.taus[1]).f1;
        row.f1_tau_2 = f1_tau(pred_n, gt_n, options.taus[2]).f1;
        BoxMetrics bm = box_metrics(predictions[i], gt.box, options.box_rotations, rng);
        row.box_iou = bm.iou;
        row.box_iog = bm.iog;
        row.box_f1 = bm.f1;
        report.instances.push_back(std::move(row));
    }

    if (!report.instances.empty()) {
        MetricsRow& mean = report.mean;
        mean.id = "mean";
        double n = static_cast<double>(report.instances.size());
        for (const MetricsRow& row : report.instances) {
            mean.cd_l1 += row.cd_l1 / n;
            mean.cd_l2 += row.cd_l2 / n;
            mean.f1_tau_0 += row.f1_tau_0 / n;
            mean.f1_tau_1 += row.f1_tau_1 / n;
            mean.f1_tau_2 += row.f1_tau_2 / n;
            mean.box_iou += row.box_iou / n;
            mean.box_iog += row.box_iog / n;
            mean.box_f1 += row.box_f1 / n;
        }
        report.has_mean = true;
    }
    return report;
}

std::string format_metrics_table(const EvalReport& report, const EvalOptions& options) {
    std::string out;
    char line[512];
    std::snprintf(line, sizeof(line),
                  "instance_id\tcd_l1\tcd_l2\tf1_%.1f\tf1_%.1f\tf1_%.1f\tbox_iou\tbox_iog\tbox_f1\n",
                  options.taus[0], options.taus[1], options.taus[2]);
    out += line;
    auto emit = [&](const MetricsRow& row) {
        std::snprintf(line, sizeof(line),
                      "%s\t%.6f\t%.6f\t%.6f\t%.6f\t%.6f\t%.6f\t%.6f\t%.6f\n", row.id.c_str(),
                      row.cd_l1, row.cd_l2, row.f1_tau_0, row.f1_tau_1, row.f1_tau_2, row.box_iou,
                      row.box_iog, row.box_f1);
        out += line;
    };
    for (const MetricsRow& row : report.instances) emit(row);
    if (report.has_mean) emit(report.mean);
    return out;
}

}  // namespace dp
