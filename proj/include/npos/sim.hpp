#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "npos/geom.hpp"

namespace npos::sim {

struct WorldConfig {
    std::vector<Vec2> area_polygon;        // simple polygon, metres
    std::vector<Vec2> ap_positions;        // B access points
    std::vector<Vec2> ap_antenna_offsets;  // A offsets, shared by every AP
    std::vector<Segment> blocker_segments;
    Vec2 dock_position;
    double dock_heading = 0.0;  // rad
    std::vector<Vec2> scatterer_positions;
    std::uint64_t rng_seed = 1;

    std::size_t num_aps() const { return ap_positions.size(); }
    std::size_t num_antennas() const { return ap_antenna_offsets.size(); }

    /// Throws std::invalid_argument on violated invariants (dock outside the
    /// area, empty AP list, self-intersecting polygon).
    void validate() const;
};

struct MotionModel {
    double forward_min = 0.05;  // m, uniform draw support
    double forward_max = 0.25;
    double rotate_min = -M_PI / 4.0;  // rad
    double rotate_max = M_PI / 4.0;
    double forward_bias = 1.0;        // commanded 1 m -> truly travelled forward_bias m
    double forward_noise_std = 0.0;   // m, per forward command
    double rotate_noise_std = 0.0;    // rad, per rotate command
    double bias_compensation = 1.0;   // measured displacement = bias_compensation * command
    long dock_return_period = 1000;   // commands between dock returns; 0 = never return

    void validate() const;
};

/// Ground truth; evaluation-only except for the dock visits.
struct Trajectory {
    std::vector<Vec2> positions;     // N+1
    std::vector<double> headings;    // N+1, rad
    std::vector<long> dock_indices;  // sorted, starts with 0

    long num_samples() const { return static_cast<long>(positions.size()); }
};

/// Bias-compensated displacement measurements, the only motion signal the
/// training side ever sees.
struct DisplacementLog {
    std::vector<Vec2> measurements;  // N
};

/// Robot docks once within this distance of the dock position.
inline constexpr double kDockingTolerance = 0.01;  // m

/// Random walk of alternating forward/rotate commands with periodic dock
/// returns. Produces n_samples poses (so n_samples - 1 commands) and one
/// measurement per command. Deterministic in world.rng_seed.
std::pair<Trajectory, DisplacementLog> generate_trajectory(const WorldConfig& world,
                                                           const MotionModel& motion,
                                                           long n_samples);

/// delta_n = x_{n+1} - x_n for all n.
std::vector<Vec2> true_displacements(const Trajectory& traj);

// CSV serialization: "n,x,y,heading" / "n,dx,dy", '.' decimal separator,
// '\n' line ends. Dock indices are not part of the trajectory CSV; they are
// exported through the anchor set.
void save_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory load_trajectory_csv(const std::string& path);
void save_displacements_csv(const DisplacementLog& log, const std::string& path);
DisplacementLog load_displacements_csv(const std::string& path);

}  // namespace npos::sim
