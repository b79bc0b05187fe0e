#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "npos/dataset.hpp"
#include "npos/geom.hpp"
#include "npos/sim.hpp"

// Training objectives. Every loss returns its value and writes exact
// gradients with respect to the network outputs involved; computation is
// double precision throughout so the same code serves training and the
// 64-bit gradient checks.
namespace npos::loss {

struct LossWeights {
    double tri_var_a = 1.0;  // E^A
    double tri_var_b = 1.0;  // E^B
    double tri_var_c = 1.0;  // E^C
    double disp_var = 1.0;   // per-step displacement variance
};

/// Triangle displacement loss for one triangle. preds holds the predictions
/// at (m, m+V, m+2V); grads (same layout) is overwritten.
double triangle_loss(const Vec2 preds[3], const data::TriangleSet& tri, const LossWeights& w,
                     Vec2 grads[3]);

/// sum_a ||anchor_a - pred_a||^2 / (2 var_a); one prediction per entry.
double anchor_loss(std::span<const Vec2> preds, std::span<const data::AnchorEntry> anchors,
                   Vec2* grads);

/// Consecutive-step displacement loss: preds has K+1 consecutive predictions,
/// disp the K measured displacements between them.
double displacement_loss(std::span<const Vec2> preds, std::span<const Vec2> disp, double variance,
                         Vec2* grads);

/// Total training objective: triangle part plus anchor part.
double total_loss(double triangle_part, double anchor_part);

/// Mean over the batch of ||pred - truth||^2.
double supervised_mse(std::span<const Vec2> preds, std::span<const Vec2> truth, Vec2* grads);

/// Simulated TDoA measurements tau[m][i] for m = 0..n_rows-1 and every AP i:
/// Gaussian around (||x_ref - x_m|| - ||x_AP,i - x_m||)/c with the given
/// variance in ns^2. Uses ground-truth positions; evaluation-adjacent data
/// reserved for Baseline 2.
std::vector<std::vector<double>> simulate_tdoa(const sim::Trajectory& traj,
                                               std::span<const Vec2> ap_positions, int ref_ap,
                                               double variance_ns2, std::uint64_t seed,
                                               long n_rows);

/// L1 objective of the channel-charting baseline: displacement-magnitude
/// terms over pairs (m, m+Vbar) plus TDoA terms over every non-reference AP.
/// Subgradient 0 at kinks. grads are overwritten.
double baseline2_loss(std::span<const Vec2> pred_start, std::span<const Vec2> pred_end,
                      std::span<const double> magnitudes,
                      const std::vector<std::vector<double>>& tdoa,
                      std::span<const long> tdoa_rows, std::span<const Vec2> ap_positions,
                      int ref_ap, Vec2* grad_start, Vec2* grad_end);

}  // namespace npos::loss
