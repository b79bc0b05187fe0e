#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "npos/sim.hpp"

using namespace npos;
using namespace npos::sim;

namespace {

WorldConfig square_world() {
    WorldConfig w;
    w.area_polygon = {{0, 0}, {2, 0}, {2, 2}, {0, 2}};
    w.ap_positions = {{-0.1, -0.1}};
    w.ap_antenna_offsets = {{0, 0}};
    w.dock_position = {0.2, 0.2};
    w.dock_heading = 0.0;
    w.rng_seed = 99;
    return w;
}

MotionModel quiet_motion() {
    MotionModel m;
    m.forward_noise_std = 0.0;
    m.rotate_noise_std = 0.0;
    m.forward_bias = 1.0;
    m.bias_compensation = 1.0;
    m.dock_return_period = 0;
    return m;
}

}  // namespace

TEST_SUITE("sim") {
    TEST_CASE("noiseless single forward command") {
        WorldConfig w = square_world();
        w.area_polygon = {{-1, -1}, {3, -1}, {3, 3}, {-1, 3}};
        w.dock_position = {0, 0};
        MotionModel m = quiet_motion();
        m.forward_min = m.forward_max = 1.0;
        auto [traj, log] = generate_trajectory(w, m, 2);
        REQUIRE(traj.positions.size() == 2);
        CHECK((traj.positions[1] - traj.positions[0]).x == doctest::Approx(1.0).epsilon(1e-15));
        CHECK((traj.positions[1] - traj.positions[0]).y == doctest::Approx(0.0));
        CHECK(log.measurements[0].x == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(log.measurements[0].y == doctest::Approx(0.0));
    }

    TEST_CASE("matched bias and compensation cancel") {
        WorldConfig w = square_world();
        w.area_polygon = {{-1, -1}, {3, -1}, {3, 3}, {-1, 3}};
        w.dock_position = {0, 0};
        MotionModel m = quiet_motion();
        m.forward_min = m.forward_max = 1.0;
        m.forward_bias = 0.9;
        m.bias_compensation = 0.9;
        auto [traj, log] = generate_trajectory(w, m, 2);
        CHECK((traj.positions[1] - traj.positions[0]).norm() == doctest::Approx(0.9));
        CHECK(log.measurements[0].norm() == doctest::Approx(0.9));
    }

    TEST_CASE("uncompensated bias overshoots dead reckoning by 1 m over 10 moves") {
        WorldConfig w = square_world();
        w.area_polygon = {{-1, -1}, {20, -1}, {20, 3}, {-1, 3}};
        w.dock_position = {0, 0};
        MotionModel m = quiet_motion();
        m.forward_min = m.forward_max = 1.0;
        m.rotate_min = m.rotate_max = 0.0;  // straight line
        m.forward_bias = 0.9;
        m.bias_compensation = 1.0;
        // 10 forwards interleaved with 9 zero-angle rotations = 19 commands
        auto [traj, log] = generate_trajectory(w, m, 20);
        Vec2 true_end = traj.positions.back();
        Vec2 dead_reckoned{0, 0};
        for (const Vec2& d : log.measurements) dead_reckoned += d;
        // oracle: accumulate the two displacement sequences directly
        CHECK(dead_reckoned.x - true_end.x == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("bias compensation invariant: noiseless matched model gives measured == true") {
        WorldConfig w = square_world();
        MotionModel m = quiet_motion();
        m.forward_bias = 0.93;
        m.bias_compensation = 0.93;
        m.dock_return_period = 50;
        auto [traj, log] = generate_trajectory(w, m, 400);
        const auto truth = true_displacements(traj);
        for (std::size_t n = 0; n < log.measurements.size(); ++n) {
            CHECK(log.measurements[n].x == doctest::Approx(truth[n].x).epsilon(1e-12));
            CHECK(log.measurements[n].y == doctest::Approx(truth[n].y).epsilon(1e-12));
        }
    }

    TEST_CASE("true displacements match definition and prefix-sum reconstruction") {
        Trajectory t;
        t.positions = {{0, 0}, {1, 0}, {1, 2}};
        t.headings = {0, 0, 0};
        const auto d = true_displacements(t);
        REQUIRE(d.size() == 2);
        CHECK(d[0] == Vec2{1, 0});
        CHECK(d[1] == Vec2{0, 2});

        Trajectory flat;
        flat.positions = {{1, 1}, {1, 1}, {1, 1}};
        flat.headings = {0, 0, 0};
        for (const Vec2& v : true_displacements(flat)) CHECK(v == Vec2{0, 0});

        WorldConfig w = square_world();
        MotionModel m;
        m.forward_noise_std = 0.01;
        m.rotate_noise_std = 0.02;
        m.dock_return_period = 0;
        w.rng_seed = 5;
        auto [traj, log] = generate_trajectory(w, m, 101);
        const auto disp = true_displacements(traj);
        Vec2 acc = traj.positions[0];
        for (std::size_t n = 0; n < disp.size(); ++n) {
            acc += disp[n];
            CHECK(acc.x == doctest::Approx(traj.positions[n + 1].x).epsilon(1e-12));
            CHECK(acc.y == doctest::Approx(traj.positions[n + 1].y).epsilon(1e-12));
        }
    }

    TEST_CASE("determinism: identical seeds give bit-identical outputs") {
        WorldConfig w = square_world();
        MotionModel m;
        m.forward_noise_std = 0.02;
        m.rotate_noise_std = 0.03;
        m.dock_return_period = 120;
        auto [t1, l1] = generate_trajectory(w, m, 1500);
        auto [t2, l2] = generate_trajectory(w, m, 1500);
        REQUIRE(t1.positions.size() == t2.positions.size());
        for (std::size_t i = 0; i < t1.positions.size(); ++i) {
            CHECK(t1.positions[i].x == t2.positions[i].x);
            CHECK(t1.positions[i].y == t2.positions[i].y);
            CHECK(t1.headings[i] == t2.headings[i]);
        }
        CHECK(t1.dock_indices == t2.dock_indices);
        for (std::size_t i = 0; i < l1.measurements.size(); ++i)
            CHECK(l1.measurements[i] == l2.measurements[i]);
    }

    TEST_CASE("containment and dock invariants on a noisy run") {
        WorldConfig w = square_world();
        MotionModel m;
        m.forward_noise_std = 0.01;
        m.rotate_noise_std = 0.02;
        m.dock_return_period = 200;
        auto [traj, log] = generate_trajectory(w, m, 3000);
        CHECK(log.measurements.size() == traj.positions.size() - 1);
        for (const Vec2& p : traj.positions) CHECK(point_in_polygon(p, w.area_polygon));
        REQUIRE(!traj.dock_indices.empty());
        CHECK(traj.dock_indices.front() == 0);
        CHECK(traj.dock_indices.size() >= 10);
        for (long idx : traj.dock_indices)
            CHECK((traj.positions[static_cast<std::size_t>(idx)] - w.dock_position).norm() <=
                  kDockingTolerance);
        // commands alternate when unobstructed: rotations produce exact zero
        // measurements, forwards do not
        long zeros = 0;
        for (const Vec2& d : log.measurements)
            if (d.x == 0.0 && d.y == 0.0) ++zeros;
        CHECK(zeros > 1000);
        CHECK(zeros < 2200);
    }

    TEST_CASE("area too small for any forward move fails") {
        WorldConfig w = square_world();
        w.area_polygon = {{0.19, 0.19}, {0.21, 0.19}, {0.21, 0.21}, {0.19, 0.21}};
        MotionModel m = quiet_motion();
        m.forward_min = 0.5;
        m.forward_max = 0.6;  // never fits a 2 cm box
        CHECK_THROWS(generate_trajectory(w, m, 50));
    }

    TEST_CASE("csv round trip") {
        WorldConfig w = square_world();
        MotionModel m;
        m.dock_return_period = 0;
        auto [traj, log] = generate_trajectory(w, m, 30);
        const std::string dir = std::filesystem::temp_directory_path().string();
        save_trajectory_csv(traj, dir + "/npos_test_traj.csv");
        save_displacements_csv(log, dir + "/npos_test_disp.csv");
        const Trajectory t2 = load_trajectory_csv(dir + "/npos_test_traj.csv");
        const DisplacementLog l2 = load_displacements_csv(dir + "/npos_test_disp.csv");
        REQUIRE(t2.positions.size() == traj.positions.size());
        for (std::size_t i = 0; i < traj.positions.size(); ++i) {
            CHECK(t2.positions[i].x == traj.positions[i].x);  // %.17g is lossless
            CHECK(t2.headings[i] == traj.headings[i]);
        }
        REQUIRE(l2.measurements.size() == log.measurements.size());
        for (std::size_t i = 0; i < log.measurements.size(); ++i)
            CHECK(l2.measurements[i] == log.measurements[i]);
    }
}
