#include "npos/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "npos/constants.hpp"
#include "npos/rng.hpp"

namespace npos::loss {

double triangle_loss(const Vec2 preds[3], const data::TriangleSet& tri, const LossWeights& w,
                     Vec2 grads[3]) {
    const Vec2 ra = tri.d_a - (preds[1] - preds[0]);
    const Vec2 rb = tri.d_b - (preds[2] - preds[1]);
    const Vec2 rc = tri.d_c - (preds[2] - preds[0]);

    const double value = ra.norm_sq() / (2.0 * w.tri_var_a) + rb.norm_sq() / (2.0 * w.tri_var_b) +
                         rc.norm_sq() / (2.0 * w.tri_var_c);

    const Vec2 ga = (1.0 / w.tri_var_a) * ra;
    const Vec2 gb = (1.0 / w.tri_var_b) * rb;
    const Vec2 gc = (1.0 / w.tri_var_c) * rc;
    grads[0] = ga + gc;
    grads[1] = gb - ga;
    grads[2] = Vec2{0.0, 0.0} - gb - gc;
    return value;
}

double anchor_loss(std::span<const Vec2> preds, std::span<const data::AnchorEntry> anchors,
                   Vec2* grads) {
    if (preds.size() != anchors.size())
        throw std::invalid_argument("one prediction per anchor entry required");
    double value = 0.0;
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        const Vec2 r = anchors[i].position - preds[i];
        value += r.norm_sq() / (2.0 * anchors[i].variance);
        grads[i] = (-1.0 / anchors[i].variance) * r;
    }
    return value;
}

double displacement_loss(std::span<const Vec2> preds, std::span<const Vec2> disp, double variance,
                         Vec2* grads) {
    if (preds.size() != disp.size() + 1)
        throw std::invalid_argument("need one prediction per displacement endpoint");
    if (!(variance > 0.0)) throw std::invalid_argument("variance must be > 0");
    for (std::size_t i = 0; i < preds.size(); ++i) grads[i] = {0.0, 0.0};
    double value = 0.0;
    const double inv = 1.0 / variance;
    for (std::size_t n = 0; n < disp.size(); ++n) {
        const Vec2 r = disp[n] - (preds[n + 1] - preds[n]);
        value += r.norm_sq() / (2.0 * variance);
        grads[n] += inv * r;
        grads[n + 1] -= inv * r;
    }
    return value;
}

double total_loss(double triangle_part, double anchor_part) {
    return triangle_part + anchor_part;
}

double supervised_mse(std::span<const Vec2> preds, std::span<const Vec2> truth, Vec2* grads) {
    if (preds.size() != truth.size()) throw std::invalid_argument("batch size mismatch");
    if (preds.empty()) throw std::invalid_argument("empty batch");
    const double inv_n = 1.0 / static_cast<double>(preds.size());
    double value = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const Vec2 d = preds[i] - truth[i];
        value += d.norm_sq();
        grads[i] = (2.0 * inv_n) * d;
    }
    return value * inv_n;
}

std::vector<std::vector<double>> simulate_tdoa(const sim::Trajectory& traj,
                                               std::span<const Vec2> ap_positions, int ref_ap,
                                               double variance_ns2, std::uint64_t seed,
                                               long n_rows) {
    if (ref_ap < 0 || ref_ap >= static_cast<int>(ap_positions.size()))
        throw std::invalid_argument("reference AP index out of range");
    if (variance_ns2 < 0.0) throw std::invalid_argument("TDoA variance must be >= 0");
    if (n_rows < 0 || n_rows > traj.num_samples())
        throw std::invalid_argument("TDoA row count out of range");

    const double sigma = std::sqrt(variance_ns2) * 1e-9;  // ns -> s
    const Vec2 x_ref = ap_positions[static_cast<std::size_t>(ref_ap)];
    Rng rng(seed);
    std::vector<std::vector<double>> out(static_cast<std::size_t>(n_rows));
    for (long m = 0; m < n_rows; ++m) {
        const Vec2 x = traj.positions[static_cast<std::size_t>(m)];
        std::vector<double>& row = out[static_cast<std::size_t>(m)];
        row.resize(ap_positions.size());
        for (std::size_t i = 0; i < ap_positions.size(); ++i) {
            const double mean =
                ((x_ref - x).norm() - (ap_positions[i] - x).norm()) / kSpeedOfLight;
            row[i] = mean + sigma * rng.normal();
        }
    }
    return out;
}

namespace {

inline double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

double baseline2_loss(std::span<const Vec2> pred_start, std::span<const Vec2> pred_end,
                      std::span<const double> magnitudes,
                      const std::vector<std::vector<double>>& tdoa,
                      std::span<const long> tdoa_rows, std::span<const Vec2> ap_positions,
                      int ref_ap, Vec2* grad_start, Vec2* grad_end) {
    const std::size_t k = pred_start.size();
    if (pred_end.size() != k || magnitudes.size() != k || tdoa_rows.size() != k)
        throw std::invalid_argument("baseline2 batch arrays must have equal length");

    const Vec2 x_ref = ap_positions[static_cast<std::size_t>(ref_ap)];
    double value = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
        grad_start[m] = {0.0, 0.0};
        grad_end[m] = {0.0, 0.0};

        // displacement-magnitude term
        const Vec2 d = pred_end[m] - pred_start[m];
        const double nd = d.norm();
        const double u = nd - magnitudes[m];
        value += std::fabs(u);
        if (nd > 0.0 && u != 0.0) {
            const Vec2 g = (sign(u) / nd) * d;
            grad_end[m] += g;
            grad_start[m] -= g;
        }

        // TDoA terms over all non-reference APs
        const std::vector<double>& row = tdoa[static_cast<std::size_t>(tdoa_rows[m])];
        for (std::size_t i = 0; i < ap_positions.size(); ++i) {
            if (static_cast<int>(i) == ref_ap) continue;
            const Vec2 to_ref = pred_start[m] - x_ref;
            const Vec2 to_ap = pred_start[m] - ap_positions[i];
            const double n_ref = to_ref.norm();
            const double n_ap = to_ap.norm();
            const double v = n_ref - n_ap - kSpeedOfLight * row[i];
            value += std::fabs(v);
            if (v != 0.0) {
                Vec2 g{0.0, 0.0};
                if (n_ref > 0.0) g += (1.0 / n_ref) * to_ref;
                if (n_ap > 0.0) g -= (1.0 / n_ap) * to_ap;
                grad_start[m] += sign(v) * g;
            }
        }
    }
    return value;
}

}  // namespace npos::loss
