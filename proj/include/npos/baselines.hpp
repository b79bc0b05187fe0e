#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "npos/dataset.hpp"
#include "npos/features.hpp"
#include "npos/losses.hpp"
#include "npos/mlp.hpp"
#include "npos/sim.hpp"

namespace npos::train {

/// Trajectory estimate reconstructed from displacements and anchors alone.
struct PseudoLabels {
    std::vector<Vec2> positions;  // N+1
    double residual_norm = 0.0;
};

/// Exact minimizer of
///   sum_n ||delta_n - (x_{n+1} - x_n)||^2 + sum_a ||anchor_a - x_a||^2/(2 var_a),
/// solved per coordinate as a symmetric positive-definite tridiagonal system
/// (Thomas algorithm). Throws without an anchor: the displacement part alone
/// is invariant under global translation, so the minimizer is non-unique.
PseudoLabels reconstruct_trajectory_ls(const sim::DisplacementLog& disp,
                                       const data::AnchorSet& anchors);

struct TrainConfig {
    int epochs = 15;
    int batch_size = 256;
    mlp::AdamConfig adam;
    std::vector<int> hidden_dims = {512, 256, 64};
    std::uint64_t init_seed = 1;
    std::uint64_t shuffle_seed = 2;

    // Baseline 2
    int vbar = 200;
    int ref_ap = 0;
    double tdoa_variance_ns2 = 3.0;
    std::uint64_t tdoa_seed = 3;

    /// Optional per-optimizer-step observer (step counter, batch loss).
    std::function<void(long, double)> on_step;
};

/// Proposed method: triangle displacement loss plus anchor loss, mini-batched
/// over training triangles with the anchor term distributed proportionally so
/// each epoch sums to the full objective.
mlp::Mlp<float> train_proposed(const feat::FeatureMatrix& features,
                               const std::vector<data::TriangleSet>& triangles,
                               const data::AnchorSet& anchors, const data::SplitPlan& split,
                               const TrainConfig& cfg);

/// Baseline 1: supervised MSE against ground-truth positions.
mlp::Mlp<float> train_baseline1(const feat::FeatureMatrix& features,
                                const std::vector<Vec2>& ground_truth,
                                const data::SplitPlan& split, const TrainConfig& cfg);

/// Baseline 2: channel-charting objective from displacement magnitudes over
/// (m, m+vbar) pairs plus simulated TDoA measurements.
mlp::Mlp<float> train_baseline2(const feat::FeatureMatrix& features,
                                const sim::DisplacementLog& disp, const sim::Trajectory& traj,
                                const std::vector<Vec2>& ap_positions,
                                const data::SplitPlan& split, const TrainConfig& cfg);

/// Baseline 3: least-squares pseudo-labels, then supervised MSE against them.
mlp::Mlp<float> train_baseline3(const feat::FeatureMatrix& features,
                                const sim::DisplacementLog& disp, const data::AnchorSet& anchors,
                                const data::SplitPlan& split, const TrainConfig& cfg);

}  // namespace npos::train
