#include "npos/sim.hpp"

#include <cstdio>
#include <stdexcept>

#include "npos/binio.hpp"
#include "npos/errors.hpp"
#include "npos/rng.hpp"

namespace npos::sim {

void WorldConfig::validate() const {
    if (area_polygon.size() < 3) throw ConfigError("area_polygon needs at least 3 vertices");
    if (!polygon_is_simple(area_polygon)) throw ConfigError("area_polygon self-intersects");
    if (ap_positions.empty()) throw ConfigError("need at least one AP (B >= 1)");
    if (ap_antenna_offsets.empty()) throw ConfigError("need at least one antenna offset (A >= 1)");
    if (!point_in_polygon(dock_position, area_polygon))
        throw ConfigError("dock_position lies outside area_polygon");
}

void MotionModel::validate() const {
    if (!(forward_min <= forward_max) || forward_min < 0.0)
        throw ConfigError("forward distance range is empty or negative");
    if (!(rotate_min <= rotate_max)) throw ConfigError("rotation range is empty");
    if (forward_noise_std < 0.0 || rotate_noise_std < 0.0)
        throw ConfigError("noise standard deviations must be >= 0");
    if (forward_bias <= 0.0 || bias_compensation <= 0.0)
        throw ConfigError("bias factors must be > 0");
    if (dock_return_period < 0) throw ConfigError("dock_return_period must be >= 0");
}

namespace {

// Mutable state threaded through command execution.
struct Walker {
    const WorldConfig& world;
    const MotionModel& motion;
    Rng rng;
    Vec2 pos;
    double heading;     // true heading
    double dr_heading;  // dead-reckoned (commanded) heading
    Trajectory traj;
    DisplacementLog log;

    Walker(const WorldConfig& w, const MotionModel& m)
        : world(w), motion(m), rng(w.rng_seed), pos(w.dock_position), heading(w.dock_heading),
          dr_heading(w.dock_heading) {
        traj.positions.push_back(pos);
        traj.headings.push_back(heading);
        traj.dock_indices.push_back(0);
    }

    long current_index() const { return static_cast<long>(traj.positions.size()) - 1; }

    void record_sample(const Vec2& measurement) {
        traj.positions.push_back(pos);
        traj.headings.push_back(heading);
        log.measurements.push_back(measurement);
    }

    // Executes one forward command. A command whose executed segment would
    // cross the area boundary is rejected and re-drawn (random walk) or
    // halved (dock approach), up to 100 retries. Returns false when no legal
    // distance exists, which happens when the heading points into a nearby
    // wall; the caller then rotates instead.
    bool exec_forward(double commanded, bool redraw_on_reject) {
        double c = commanded;
        for (int attempt = 0; attempt < 100; ++attempt) {
            const double noise = rng.normal(0.0, motion.forward_noise_std);
            const double true_dist = motion.forward_bias * c + noise;
            const Vec2 dir{std::cos(heading), std::sin(heading)};
            const Vec2 candidate = pos + true_dist * dir;
            if (segment_in_polygon(pos, candidate, world.area_polygon)) {
                pos = candidate;
                const Vec2 dr_dir{std::cos(dr_heading), std::sin(dr_heading)};
                record_sample(motion.bias_compensation * c * dr_dir);
                return true;
            }
            c = redraw_on_reject ? rng.uniform(motion.forward_min, motion.forward_max) : 0.5 * c;
        }
        return false;
    }

    void exec_rotate(double commanded) {
        const double noise = rng.normal(0.0, motion.rotate_noise_std);
        heading = wrap_angle(heading + commanded + noise);
        dr_heading = wrap_angle(dr_heading + commanded);
        record_sample({0.0, 0.0});
    }
};

}  // namespace

std::pair<Trajectory, DisplacementLog> generate_trajectory(const WorldConfig& world,
                                                           const MotionModel& motion,
                                                           long n_samples) {
    world.validate();
    motion.validate();
    if (n_samples < 2) throw std::invalid_argument("n_samples must be >= 2");

    Walker w(world, motion);
    const long n_commands = n_samples - 1;
    long since_dock = 0;
    bool docking = false;
    bool docking_rotate_next = true;
    int docking_forwards = 0;
    bool next_is_forward = true;
    int blocked_streak = 0;

    for (long cmd = 0; cmd < n_commands; ++cmd) {
        if (!docking && motion.dock_return_period > 0 && since_dock >= motion.dock_return_period) {
            docking = true;
            docking_rotate_next = true;
            docking_forwards = 0;
        }

        if (docking) {
            if (docking_rotate_next) {
                const Vec2 to_dock = world.dock_position - w.pos;
                const double bearing = std::atan2(to_dock.y, to_dock.x);
                w.exec_rotate(wrap_angle(bearing - w.heading));
                docking_rotate_next = false;
            } else {
                // command the distance that lands on the dock in expectation
                const double dist = (world.dock_position - w.pos).norm() / motion.forward_bias;
                if (!w.exec_forward(dist, /*redraw_on_reject=*/false))
                    throw std::runtime_error("dock approach blocked by the area boundary");
                docking_rotate_next = true;
                ++docking_forwards;
                if ((world.dock_position - w.pos).norm() <= kDockingTolerance) {
                    w.traj.dock_indices.push_back(w.current_index());
                    w.dr_heading = w.heading;  // heading recalibrated while docked
                    docking = false;
                    since_dock = 0;
                    next_is_forward = true;
                } else if (docking_forwards > 100) {
                    throw std::runtime_error(
                        "failed to dock within 100 approach attempts; motion noise exceeds the "
                        "docking tolerance");
                }
            }
            continue;
        }

        if (next_is_forward) {
            if (w.exec_forward(w.rng.uniform(motion.forward_min, motion.forward_max),
                               /*redraw_on_reject=*/true)) {
                next_is_forward = false;
                blocked_streak = 0;
            } else {
                // heading points into a wall: rotate in place and owe the
                // forward to the next command slot
                w.exec_rotate(w.rng.uniform(motion.rotate_min, motion.rotate_max));
                if (++blocked_streak > 100)
                    throw std::runtime_error(
                        "could not place a legal forward move after 100 rotation attempts; area "
                        "too small for the configured forward distances");
            }
        } else {
            w.exec_rotate(w.rng.uniform(motion.rotate_min, motion.rotate_max));
            next_is_forward = true;
        }
        ++since_dock;
    }

    return {std::move(w.traj), std::move(w.log)};
}

std::vector<Vec2> true_displacements(const Trajectory& traj) {
    if (traj.positions.size() < 2)
        throw std::invalid_argument("trajectory needs at least 2 positions");
    std::vector<Vec2> out;
    out.reserve(traj.positions.size() - 1);
    for (std::size_t n = 0; n + 1 < traj.positions.size(); ++n)
        out.push_back(traj.positions[n + 1] - traj.positions[n]);
    return out;
}

void save_trajectory_csv(const Trajectory& traj, const std::string& path) {
    auto f = io::open_out(path, /*binary=*/false);
    f << "n,x,y,heading\n";
    char buf[128];
    for (std::size_t n = 0; n < traj.positions.size(); ++n) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", n, traj.positions[n].x,
                      traj.positions[n].y, traj.headings[n]);
        f << buf;
    }
}

Trajectory load_trajectory_csv(const std::string& path) {
    auto f = io::open_in(path, /*binary=*/false);
    Trajectory traj;
    std::string line;
    std::getline(f, line);  // header
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        unsigned long n = 0;
        double x = 0, y = 0, h = 0;
        if (std::sscanf(line.c_str(), "%lu,%lg,%lg,%lg", &n, &x, &y, &h) != 4)
            throw std::runtime_error("malformed trajectory CSV line: " + line);
        traj.positions.push_back({x, y});
        traj.headings.push_back(h);
    }
    if (traj.positions.empty()) throw std::runtime_error("empty trajectory file: " + path);
    return traj;
}

void save_displacements_csv(const DisplacementLog& log, const std::string& path) {
    auto f = io::open_out(path, /*binary=*/false);
    f << "n,dx,dy\n";
    char buf[96];
    for (std::size_t n = 0; n < log.measurements.size(); ++n) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", n, log.measurements[n].x,
                      log.measurements[n].y);
        f << buf;
    }
}

DisplacementLog load_displacements_csv(const std::string& path) {
    auto f = io::open_in(path, /*binary=*/false);
    DisplacementLog log;
    std::string line;
    std::getline(f, line);
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        unsigned long n = 0;
        double dx = 0, dy = 0;
        if (std::sscanf(line.c_str(), "%lu,%lg,%lg", &n, &dx, &dy) != 3)
            throw std::runtime_error("malformed displacement CSV line: " + line);
        log.measurements.push_back({dx, dy});
    }
    return log;
}

}  // namespace npos::sim
