#include <cmath>

#include "doctest.h"
#include "npos/baselines.hpp"
#include "npos/rng.hpp"
#include "oracles.hpp"

using namespace npos;
using namespace npos::train;

namespace {

feat::FeatureMatrix random_features(long count, int dim, std::uint64_t seed) {
    Rng rng(seed);
    feat::FeatureMatrix m;
    m.count = count;
    m.dim = dim;
    m.data.resize(static_cast<std::size_t>(count) * dim);
    for (float& v : m.data) v = static_cast<float>(rng.uniform(0.0, 1.0));
    return m;
}

TrainConfig tiny_train(int epochs = 8) {
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.batch_size = 64;
    cfg.hidden_dims = {16, 8};
    cfg.adam.lr0 = 3e-3;
    cfg.init_seed = 11;
    cfg.shuffle_seed = 12;
    return cfg;
}

}  // namespace

TEST_SUITE("baselines") {
    TEST_CASE("reconstruction: determined two-sample system") {
        sim::DisplacementLog disp;
        disp.measurements = {{1.0, 0.0}};
        data::AnchorSet anchors;
        anchors.entries = {{0, {0.0, 0.0}, 0.5}};  // unit weight convention
        const PseudoLabels out = reconstruct_trajectory_ls(disp, anchors);
        REQUIRE(out.positions.size() == 2);
        CHECK(out.positions[0].x == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(out.positions[1].x == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(out.residual_norm == doctest::Approx(0.0).epsilon(1e-12));
    }

    TEST_CASE("reconstruction: conflicting anchors split the residual") {
        sim::DisplacementLog disp;
        disp.measurements = {{2.0, 0.0}};
        data::AnchorSet anchors;
        anchors.entries = {{0, {0.0, 0.0}, 0.5}, {1, {0.0, 0.0}, 0.5}};
        const PseudoLabels out = reconstruct_trajectory_ls(disp, anchors);
        CHECK(out.positions[0].x == doctest::Approx(-2.0 / 3.0).epsilon(1e-12));
        CHECK(out.positions[1].x == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }

    TEST_CASE("reconstruction without anchors reports nonuniqueness") {
        sim::DisplacementLog disp;
        disp.measurements = {{1.0, 0.0}};
        CHECK_THROWS_WITH_AS(reconstruct_trajectory_ls(disp, {}),
                             doctest::Contains("translation"), std::invalid_argument);
    }

    TEST_CASE("noiseless reconstruction equals ground truth") {
        sim::WorldConfig w;
        w.area_polygon = {{0, 0}, {2, 0}, {2, 2}, {0, 2}};
        w.ap_positions = {{-1, -1}};
        w.ap_antenna_offsets = {{0, 0}};
        w.dock_position = {0.3, 0.3};
        w.rng_seed = 3;
        sim::MotionModel m;  // noiseless, matched bias
        m.dock_return_period = 300;
        auto [traj, disp] = sim::generate_trajectory(w, m, 2001);
        data::AnchorSet anchors =
            data::build_anchor_set(traj.dock_indices, w.dock_position, 0.5);
        const PseudoLabels out = reconstruct_trajectory_ls(disp, anchors);
        double max_err = 0.0;
        for (std::size_t i = 0; i < out.positions.size(); ++i)
            max_err = std::max(max_err, (out.positions[i] - traj.positions[i]).norm());
        CHECK(max_err <= 1e-9);
    }

    TEST_CASE("thomas solve matches the dense normal-equation oracle") {
        Rng rng(17);
        for (int trial = 0; trial < 5; ++trial) {
            const long n = 50 + static_cast<long>(rng.uniform_index(150));
            sim::DisplacementLog disp;
            for (long i = 0; i < n; ++i)
                disp.measurements.push_back({rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)});
            data::AnchorSet anchors;
            const int n_anchors = 1 + static_cast<int>(rng.uniform_index(4));
            for (int a = 0; a < n_anchors; ++a)
                anchors.entries.push_back({static_cast<long>(rng.uniform_index(n + 1)),
                                           {rng.uniform(-1, 1), rng.uniform(-1, 1)},
                                           0.25 + rng.uniform(0.0, 1.0)});
            const PseudoLabels fast = reconstruct_trajectory_ls(disp, anchors);
            const auto dense = oracle::dense_reconstruct(disp, anchors);
            for (std::size_t i = 0; i < dense.size(); ++i)
                CHECK((fast.positions[i] - dense[i]).norm() <= 1e-9);
        }
    }

    TEST_CASE("reconstruction satisfies the normal equations") {
        Rng rng(23);
        sim::DisplacementLog disp;
        for (int i = 0; i < 300; ++i)
            disp.measurements.push_back({rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)});
        data::AnchorSet anchors;
        anchors.entries = {{0, {0.1, -0.2}, 0.5}, {120, {0.6, 0.8}, 0.5}, {300, {0.0, 0.1}, 0.5}};
        const PseudoLabels out = reconstruct_trajectory_ls(disp, anchors);

        // objective gradient at the solution, infinity norm
        const long count = 301;
        double max_g = 0.0;
        for (long k = 0; k < count; ++k) {
            Vec2 g{0, 0};
            if (k < count - 1) {
                const Vec2 r = disp.measurements[static_cast<std::size_t>(k)] -
                               (out.positions[static_cast<std::size_t>(k + 1)] -
                                out.positions[static_cast<std::size_t>(k)]);
                g += 2.0 * r;  // d/dx_k of ||d - (x_{k+1} - x_k)||^2
            }
            if (k > 0) {
                const Vec2 r = disp.measurements[static_cast<std::size_t>(k - 1)] -
                               (out.positions[static_cast<std::size_t>(k)] -
                                out.positions[static_cast<std::size_t>(k - 1)]);
                g -= 2.0 * r;
            }
            for (const data::AnchorEntry& a : anchors.entries)
                if (a.index == k)
                    g -= (1.0 / a.variance) * (a.position - out.positions[static_cast<std::size_t>(k)]);
            max_g = std::max({max_g, std::fabs(g.x), std::fabs(g.y)});
        }
        CHECK(max_g <= 1e-8);
    }

    TEST_CASE("baseline1: constant target collapses predictions to it") {
        const long n = 300;
        const feat::FeatureMatrix features = random_features(n, 6, 4);
        const std::vector<Vec2> truth(n, Vec2{0.0, 0.0});
        const data::SplitPlan split = data::split_samples(n, 9);
        TrainConfig cfg = tiny_train(30);
        const auto model = train_baseline1(features, truth, split, cfg);
        const auto report = eval::evaluate(model, features, split.test_indices, truth, "b1");
        CHECK(report.mean < 1e-2);
    }

    TEST_CASE("baseline1: loss decreases over the first steps of one-point training") {
        feat::FeatureMatrix features = random_features(5, 4, 8);
        std::vector<Vec2> truth(5, Vec2{1.0, -1.0});
        data::SplitPlan split;
        split.n_samples = 5;
        split.rng_seed = 0;
        split.test_mask.assign(5, 0);
        for (long i = 1; i < 5; ++i) {
            split.test_mask[static_cast<std::size_t>(i)] = 1;  // train on sample 0 only
            split.test_indices.push_back(i);
        }
        std::vector<double> losses;
        TrainConfig cfg = tiny_train(12);
        cfg.batch_size = 1;
        cfg.on_step = [&](long, double v) { losses.push_back(v); };
        train_baseline1(features, truth, split, cfg);
        REQUIRE(losses.size() >= 10);
        for (int s = 1; s < 10; ++s) CHECK(losses[s] < losses[s - 1]);
    }

    TEST_CASE("baseline2: single pair training reduces the magnitude residual") {
        const long n = 30;
        feat::FeatureMatrix features = random_features(n, 5, 6);
        sim::DisplacementLog disp;
        for (long i = 0; i < n - 1; ++i) disp.measurements.push_back({0.05, 0.0});
        sim::Trajectory traj;
        for (long i = 0; i < n; ++i) {
            traj.positions.push_back({0.05 * static_cast<double>(i), 0.0});
            traj.headings.push_back(0.0);
        }
        const std::vector<Vec2> aps = {{0.0, 0.0}};  // ref only: no TDoA terms
        data::SplitPlan split;
        split.n_samples = n;
        split.test_mask.assign(n, 0);

        TrainConfig cfg = tiny_train(10);
        cfg.vbar = 10;
        cfg.batch_size = 4;
        std::vector<double> losses;
        cfg.on_step = [&](long, double v) { losses.push_back(v); };
        train_baseline2(features, disp, traj, aps, split, cfg);
        REQUIRE(losses.size() >= 2);
        CHECK(losses.back() < losses.front());
    }

    TEST_CASE("baseline3: noiseless pipeline matches supervised training") {
        sim::WorldConfig w;
        w.area_polygon = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
        w.ap_positions = {{-0.5, -0.5}};
        w.ap_antenna_offsets = {{0, 0}};
        w.dock_position = {0.2, 0.2};
        w.rng_seed = 44;
        sim::MotionModel m;
        m.forward_min = 0.02;
        m.forward_max = 0.1;
        m.dock_return_period = 100;  // noiseless
        auto [traj, disp] = sim::generate_trajectory(w, m, 401);
        data::AnchorSet anchors = data::build_anchor_set(traj.dock_indices, w.dock_position, 1.0);
        const data::SplitPlan split = data::split_samples(401, 3);
        const feat::FeatureMatrix features = random_features(401, 8, 5);

        TrainConfig cfg = tiny_train(4);
        const auto b3 = train_baseline3(features, disp, anchors, split, cfg);
        const auto b1 = train_baseline1(features, traj.positions, split, cfg);
        // noiseless pseudo-labels equal ground truth, so the two models agree
        const auto rb3 = eval::evaluate(b3, features, split.test_indices, traj.positions, "b3");
        const auto rb1 = eval::evaluate(b1, features, split.test_indices, traj.positions, "b1");
        CHECK(std::fabs(rb3.mean - rb1.mean) <= 1e-6);
    }

    TEST_CASE("proposed: training is deterministic and anchor-free maps are translation-free") {
        Rng rng(70);
        const long n = 400;
        sim::DisplacementLog disp;
        for (long i = 0; i < n - 1; ++i)
            disp.measurements.push_back({rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05)});
        const auto tris = data::build_triangles(disp, 20);
        data::AnchorSet anchors;
        anchors.entries = {{0, {0.0, 0.0}, 1.0}};
        const data::SplitPlan split = data::split_samples(n, 2);
        const feat::FeatureMatrix features = random_features(n, 6, 9);

        TrainConfig cfg = tiny_train(2);
        const auto m1 = train_proposed(features, tris, anchors, split, cfg);
        const auto m2 = train_proposed(features, tris, anchors, split, cfg);
        for (std::size_t l = 0; l < m1.weights.size(); ++l) {
            CHECK(m1.weights[l] == m2.weights[l]);
            CHECK(m1.biases[l] == m2.biases[l]);
        }

        // translation invariance of the triangle part: shifting all
        // predictions leaves the triangle loss unchanged
        loss::LossWeights lw;
        Vec2 preds[3] = {{0.1, 0.2}, {0.5, -0.1}, {0.6, 0.4}};
        Vec2 shifted[3];
        for (int i = 0; i < 3; ++i) shifted[i] = preds[i] + Vec2{3.0, -2.0};
        Vec2 g[3];
        CHECK(loss::triangle_loss(preds, tris[0], lw, g) ==
              doctest::Approx(loss::triangle_loss(shifted, tris[0], lw, g)).epsilon(1e-12));
    }
}
