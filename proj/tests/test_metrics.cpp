#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "densepack/metrics.hpp"
#include "support/oracles.hpp"

using namespace dp;

TEST_CASE("normalize_pair scales about the origin") {
    PointCloud pred, gt;
    pred.points = {{1, 1, 1}};
    gt.points = {{2, 0, 0}};
    OrientedBox3D box{{Rotation(), {0, 0, 0}}, {1, 2, 5}};
    auto [p, g] = normalize_pair(pred, gt, box);
    CHECK(p.points[0].x == doctest::Approx(2.0));
    CHECK(p.points[0].y == doctest::Approx(2.0));
    CHECK(g.points[0].x == doctest::Approx(4.0));

    OrientedBox3D box10{{Rotation(), {0, 0, 0}}, {10, 1, 1}};
    auto [p2, g2] = normalize_pair(pred, gt, box10);
    CHECK(p2.points[0].x == doctest::Approx(1.0));
}

TEST_CASE("chamfer fixtures") {
    PointCloud x, y;
    x.points = {{0, 0, 0}};
    y.points = {{1, 0, 0}};
    ChamferResult r = chamfer(x, y);
    CHECK(r.cd_l2 == doctest::Approx(2.0));
    CHECK(r.cd_l1 == doctest::Approx(2.0));

    RandomSource rng(12);
    PointCloud c = oracles::random_cloud(100, rng);
    r = chamfer(c, c);
    CHECK(r.cd_l2 == doctest::Approx(0.0));
    CHECK(r.cd_l1 == doctest::Approx(0.0));

    PointCloud empty;
    CHECK_THROWS_AS(chamfer(empty, y), Error);
}

TEST_CASE("chamfer equals the brute-force oracle") {
    RandomSource rng(77);
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t nx = 16 + rng.uniform_index(240);
        std::size_t ny = 16 + rng.uniform_index(240);
        PointCloud x = oracles::random_cloud(nx, rng);
        PointCloud y = oracles::random_cloud(ny, rng);
        ChamferResult fast = chamfer(x, y);
        oracles::BruteChamfer brute = oracles::brute_chamfer(x, y);
        CHECK(std::abs(fast.cd_l2 - brute.cd_l2) < 1e-9);
        CHECK(std::abs(fast.cd_l1 - brute.cd_l1) < 1e-9);
    }
}

TEST_CASE("chamfer is symmetric and scale covariant") {
    RandomSource rng(31);
    PointCloud x = oracles::random_cloud(200, rng);
    PointCloud y = oracles::random_cloud(180, rng);
    ChamferResult xy = chamfer(x, y);
    ChamferResult yx = chamfer(y, x);
    CHECK(xy.cd_l2 == yx.cd_l2);
    CHECK(xy.cd_l1 == yx.cd_l1);

    const double s = 3.5;
    PointCloud xs = x, ys = y;
    for (Vec3& p : xs.points) p = p * s;
    for (Vec3& p : ys.points) p = p * s;
    ChamferResult scaled = chamfer(xs, ys);
    CHECK(scaled.cd_l2 == doctest::Approx(s * s * xy.cd_l2).epsilon(1e-9));
    CHECK(scaled.cd_l1 == doctest::Approx(s * xy.cd_l1).epsilon(1e-9));
}

TEST_CASE("f1 threshold straddle and hand-computed fixture") {
    PointCloud x, y;
    x.points = {{0, 0, 0}};
    y.points = {{0.05, 0, 0}};
    F1Result r = f1_tau(x, y, 0.1);
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
    CHECK(r.f1 == 1.0);
    r = f1_tau(x, y, 0.01);
    CHECK(r.precision == 0.0);
    CHECK(r.f1 == 0.0);

    PointCloud x2, y2;
    Vec3 a{0.3, -0.2, 0.9};
    x2.points = {a, a + Vec3{5, 0, 0}};
    y2.points = {a};
    r = f1_tau(x2, y2, 0.1);
    CHECK(r.precision == doctest::Approx(0.5));
    CHECK(r.recall == doctest::Approx(1.0));
    CHECK(r.f1 == doctest::Approx(2.0 / 3.0));

    RandomSource rng(9);
    PointCloud c = oracles::random_cloud(64, rng);
    r = f1_tau(c, c, 0.5);
    CHECK(r.f1 == 1.0);
}

TEST_CASE("f1 is monotone non-decreasing in tau") {
    RandomSource rng(15);
    for (int trial = 0; trial < 10; ++trial) {
        PointCloud x = oracles::random_cloud(120, rng);
        PointCloud y = oracles::random_cloud(110, rng);
        double prev = -1.0;
        for (int k = 1; k <= 30; ++k) {
            double tau = 0.05 * k;
            F1Result r = f1_tau(x, y, tau);
            CHECK(r.f1 >= prev - 1e-12);
            prev = r.f1;
        }
    }
}

TEST_CASE("box metrics against the ground-truth box") {
    OrientedBox3D gt{{Rotation(), {0.2, -0.1, 0.4}}, {0.4, 0.3, 0.2}};
    PointCloud corners;
    for (const Vec3& c : gt.corners()) corners.points.push_back(c);

    RandomSource rng(5);
    BoxMetrics m = box_metrics(corners, gt, 1024, rng);
    CHECK(m.iou >= 0.95);
    CHECK(m.iog >= 0.95);
    CHECK(m.f1 >= std::min(m.iou, m.iog));
    CHECK(m.f1 <= std::max(m.iou, m.iog));

    // Corners at half the extents: fitted box has 1/8 the volume.
    PointCloud half;
    OrientedBox3D half_box{gt.pose, gt.dimensions * 0.5};
    for (const Vec3& c : half_box.corners()) half.points.push_back(c);
    m = box_metrics(half, gt, 1024, rng);
    CHECK(m.iou == doctest::Approx(0.125).epsilon(0.08));
    CHECK(m.iog == doctest::Approx(0.125).epsilon(0.08));

    // A far outlier drags IoU down but leaves IoG high.
    PointCloud outlier = corners;
    outlier.points.push_back({3.0, 0, 0.4});
    m = box_metrics(outlier, gt, 1024, rng);
    CHECK(m.iou < 0.5);
    CHECK(m.iog >= 0.9);
}

TEST_CASE("evaluate_scene on perfect and garbage predictions") {
    TriangleMesh mesh = make_box_mesh({0.2, 0.15, 0.1});
    Pose pose{Rotation::from_axis_angle({0, 0, 1}, 0.4), {0.1, 0.2, 0.8}};
    OrientedBox3D gt_box{pose, {0.2, 0.15, 0.1}};

    RandomSource rng(2);
    PointCloud perfect = transform_cloud(pose, sample_mesh_surface(mesh, 16384, rng));

    std::vector<InstanceGroundTruth> gt;
    gt.push_back({"obj_000", mesh, pose, gt_box});
    EvalOptions options;
    options.box_rotations = 512;

    EvalReport report = evaluate_scene({perfect}, gt, options);
    REQUIRE(report.instances.size() == 1);
    const MetricsRow& row = report.instances[0];
    CHECK(row.cd_l2 < 0.05);
    CHECK(row.f1_tau_0 >= 0.99);
    CHECK(row.f1_tau_1 >= 0.99);
    CHECK(row.f1_tau_2 >= 0.99);
    CHECK(row.box_f1 >= 0.9);

    // Aggregate of one perfect and one garbage row is their mean.
    PointCloud garbage;
    RandomSource grng(3);
    for (int i = 0; i < 512; ++i)
        garbage.points.push_back({grng.uniform(-3, 3), grng.uniform(-3, 3),
                                  grng.uniform(0.1, 3)});
    gt.push_back({"obj_001", mesh, pose, gt_box});
    EvalReport two = evaluate_scene({perfect, garbage}, gt, options);
    REQUIRE(two.instances.size() == 2);
    CHECK(two.mean.cd_l2 ==
          doctest::Approx(0.5 * (two.instances[0].cd_l2 + two.instances[1].cd_l2)));
    CHECK(two.mean.box_iou ==
          doctest::Approx(0.5 * (two.instances[0].box_iou + two.instances[1].box_iou)));

    // Empty in, empty out.
    EvalReport empty = evaluate_scene({}, {}, options);
    CHECK(empty.instances.empty());
    CHECK_FALSE(empty.has_mean);
    CHECK(format_metrics_table(empty, options).find("instance_id") == 0);

    CHECK_THROWS_AS(evaluate_scene({perfect}, {}, options), Error);
}

TEST_CASE("metrics table lists columns in the documented order") {
    EvalReport report;
    MetricsRow row;
    row.id = "obj_000";
    row.cd_l1 = 1.25;
    report.instances.push_back(row);
    std::string table = format_metrics_table(report);
    CHECK(table.find("instance_id\tcd_l1\tcd_l2\tf1_0.1\tf1_0.3\tf1_0.5\tbox_iou\tbox_iog\tbox_f1") == 0);
    CHECK(table.find("obj_000\t1.250000") != std::string::npos);
}
