#include "npos/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "npos/kernels.hpp"
#include "npos/rng.hpp"

namespace npos::train {

PseudoLabels reconstruct_trajectory_ls(const sim::DisplacementLog& disp,
                                       const data::AnchorSet& anchors) {
    const long n_disp = static_cast<long>(disp.measurements.size());
    const long count = n_disp + 1;
    if (n_disp < 1) throw std::invalid_argument("need at least one displacement");
    if (anchors.entries.empty())
        throw std::invalid_argument(
            "no anchors: the displacement-only least-squares problem is invariant under global "
            "translation and has no unique minimizer; at least one anchor is required");

    // Normal equations decouple per coordinate into a common SPD tridiagonal
    // matrix. Row k: [1(k>0) + 1(k<N) + sum of anchor weights at k] on the
    // diagonal, -1 next to it.
    std::vector<double> diag(static_cast<std::size_t>(count), 0.0);
    std::vector<double> rhs_x(static_cast<std::size_t>(count), 0.0);
    std::vector<double> rhs_y(static_cast<std::size_t>(count), 0.0);

    for (long k = 0; k < count; ++k) {
        double d = 0.0;
        if (k > 0) d += 1.0;
        if (k < n_disp) d += 1.0;
        diag[static_cast<std::size_t>(k)] = d;
        double bx = 0.0, by = 0.0;
        if (k > 0) {
            bx += disp.measurements[static_cast<std::size_t>(k - 1)].x;
            by += disp.measurements[static_cast<std::size_t>(k - 1)].y;
        }
        if (k < n_disp) {
            bx -= disp.measurements[static_cast<std::size_t>(k)].x;
            by -= disp.measurements[static_cast<std::size_t>(k)].y;
        }
        rhs_x[static_cast<std::size_t>(k)] = bx;
        rhs_y[static_cast<std::size_t>(k)] = by;
    }
    for (const data::AnchorEntry& a : anchors.entries) {
        if (a.index < 0 || a.index >= count)
            throw std::invalid_argument("anchor index out of trajectory range");
        const double w = 1.0 / (2.0 * a.variance);
        diag[static_cast<std::size_t>(a.index)] += w;
        rhs_x[static_cast<std::size_t>(a.index)] += w * a.position.x;
        rhs_y[static_cast<std::size_t>(a.index)] += w * a.position.y;
    }

    // Thomas forward sweep (sub- and super-diagonals are all -1).
    std::vector<double> c_prime(static_cast<std::size_t>(count), 0.0);
    std::vector<double> dx(static_cast<std::size_t>(count), 0.0);
    std::vector<double> dy(static_cast<std::size_t>(count), 0.0);
    c_prime[0] = -1.0 / diag[0];
    dx[0] = rhs_x[0] / diag[0];
    dy[0] = rhs_y[0] / diag[0];
    for (long k = 1; k < count; ++k) {
        const std::size_t i = static_cast<std::size_t>(k);
        const double denom = diag[i] + c_prime[i - 1];
        c_prime[i] = -1.0 / denom;
        dx[i] = (rhs_x[i] + dx[i - 1]) / denom;
        dy[i] = (rhs_y[i] + dy[i - 1]) / denom;
    }

    PseudoLabels out;
    out.positions.resize(static_cast<std::size_t>(count));
    out.positions[static_cast<std::size_t>(count - 1)] = {dx[static_cast<std::size_t>(count - 1)],
                                                          dy[static_cast<std::size_t>(count - 1)]};
    for (long k = count - 2; k >= 0; --k) {
        const std::size_t i = static_cast<std::size_t>(k);
        out.positions[i] = {dx[i] - c_prime[i] * out.positions[i + 1].x,
                            dy[i] - c_prime[i] * out.positions[i + 1].y};
    }

    double obj = 0.0;
    for (long n = 0; n < n_disp; ++n) {
        const Vec2 r = disp.measurements[static_cast<std::size_t>(n)] -
                       (out.positions[static_cast<std::size_t>(n + 1)] -
                        out.positions[static_cast<std::size_t>(n)]);
        obj += r.norm_sq();
    }
    for (const data::AnchorEntry& a : anchors.entries) {
        const Vec2 r = a.position - out.positions[static_cast<std::size_t>(a.index)];
        obj += r.norm_sq() / (2.0 * a.variance);
    }
    out.residual_norm = std::sqrt(obj);
    return out;
}

namespace {

// Shared batch machinery: gather rows, forward, push double-precision
// gradients back through the float network.
struct BatchRunner {
    const feat::FeatureMatrix& features;
    mlp::Mlp<float>& model;
    mlp::Adam& opt;
    mlp::MlpWorkspace<float> ws;
    mlp::MlpGrads<float> grads;
    std::vector<float> input;
    std::vector<float> upstream;
    std::vector<Vec2> preds;
    long step = 0;

    BatchRunner(const feat::FeatureMatrix& f, mlp::Mlp<float>& m, mlp::Adam& o)
        : features(f), model(m), opt(o) {
        grads.init_like(m);
    }

    void gather(const std::vector<long>& rows) {
        const int dim = features.dim;
        input.resize(rows.size() * static_cast<std::size_t>(dim));
        for (std::size_t i = 0; i < rows.size(); ++i)
            std::copy_n(features.row(rows[i]), dim,
                        input.data() + i * static_cast<std::size_t>(dim));
    }

    const std::vector<Vec2>& forward_batch(const std::vector<long>& rows) {
        gather(rows);
        const int batch = static_cast<int>(rows.size());
        const float* out = mlp::forward(model, input.data(), batch, ws);
        preds.resize(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            preds[i] = {static_cast<double>(out[2 * i]), static_cast<double>(out[2 * i + 1])};
        return preds;
    }

    void step_with(const std::vector<Vec2>& grad, double loss_value,
                   const std::function<void(long, double)>& on_step) {
        upstream.resize(2 * grad.size());
        for (std::size_t i = 0; i < grad.size(); ++i) {
            upstream[2 * i] = static_cast<float>(grad[i].x);
            upstream[2 * i + 1] = static_cast<float>(grad[i].y);
        }
        grads.zero();
        mlp::backward(model, ws, upstream.data(), grads);
        opt.apply(model, grads);
        ++step;
        if (on_step) on_step(step, loss_value);
    }
};

std::vector<long> shuffled(std::size_t n, std::uint64_t seed) {
    std::vector<long> order(n);
    std::iota(order.begin(), order.end(), 0L);
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.uniform_index(i));
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

std::vector<long> non_test_indices(const data::SplitPlan& split, long count) {
    std::vector<long> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i)
        if (!split.is_test(i)) out.push_back(i);
    return out;
}

mlp::Mlp<float> init_model(const feat::FeatureMatrix& features, const TrainConfig& cfg) {
    std::vector<int> dims;
    dims.push_back(features.dim);
    dims.insert(dims.end(), cfg.hidden_dims.begin(), cfg.hidden_dims.end());
    dims.push_back(2);
    return mlp::make_mlp(dims, cfg.init_seed);
}

// Supervised regression against arbitrary targets; serves Baselines 1 and 3.
mlp::Mlp<float> train_supervised(const feat::FeatureMatrix& features,
                                 const std::vector<Vec2>& targets, const data::SplitPlan& split,
                                 const TrainConfig& cfg) {
    if (static_cast<long>(targets.size()) != features.count)
        throw std::invalid_argument("one target per feature sample required");
    const std::vector<long> train_rows = non_test_indices(split, features.count);
    if (train_rows.empty()) throw std::invalid_argument("empty training set");

    mlp::Mlp<float> model = init_model(features, cfg);
    mlp::Adam opt;
    opt.init(model, cfg.adam);
    BatchRunner runner(features, model, opt);

    std::vector<long> rows;
    std::vector<Vec2> truth, grad;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        opt.set_epoch(epoch);
        const std::vector<long> order = shuffled(train_rows.size(), mix_seed(cfg.shuffle_seed, epoch));
        for (std::size_t at = 0; at < order.size(); at += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(order.size(), at + static_cast<std::size_t>(cfg.batch_size));
            rows.clear();
            truth.clear();
            for (std::size_t i = at; i < end; ++i) {
                rows.push_back(train_rows[static_cast<std::size_t>(order[i])]);
                truth.push_back(targets[static_cast<std::size_t>(rows.back())]);
            }
            const std::vector<Vec2>& preds = runner.forward_batch(rows);
            grad.resize(preds.size());
            const double value = loss::supervised_mse(preds, truth, grad.data());
            runner.step_with(grad, value, cfg.on_step);
        }
    }
    return model;
}

}  // namespace

mlp::Mlp<float> train_proposed(const feat::FeatureMatrix& features,
                               const std::vector<data::TriangleSet>& triangles,
                               const data::AnchorSet& anchors, const data::SplitPlan& split,
                               const TrainConfig& cfg) {
    const std::vector<data::TriangleSet> tris = data::training_triangles(triangles, split);
    data::AnchorSet anc = data::training_anchors(anchors, split);
    if (tris.empty()) throw std::invalid_argument("no training triangles after the split");
    if (anc.entries.empty()) throw std::invalid_argument("anchor set is empty after the split");

    mlp::Mlp<float> model = init_model(features, cfg);
    mlp::Adam opt;
    opt.init(model, cfg.adam);
    BatchRunner runner(features, model, opt);

    const std::size_t n_anchor = anc.entries.size();
    loss::LossWeights weights;  // all variances 1

    std::vector<long> rows;
    std::vector<Vec2> grad;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        opt.set_epoch(epoch);
        const std::vector<long> order = shuffled(tris.size(), mix_seed(cfg.shuffle_seed, epoch));
        for (std::size_t at = 0; at < order.size(); at += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(order.size(), at + static_cast<std::size_t>(cfg.batch_size));
            const std::size_t kb = end - at;

            rows.clear();
            for (std::size_t i = at; i < end; ++i) {
                const data::TriangleSet& t = tris[static_cast<std::size_t>(order[i])];
                rows.push_back(t.start);
                rows.push_back(t.start + t.leap);
                rows.push_back(t.start + 2 * t.leap);
            }
            for (const data::AnchorEntry& a : anc.entries) rows.push_back(a.index);

            const std::vector<Vec2>& preds = runner.forward_batch(rows);
            grad.assign(preds.size(), Vec2{0.0, 0.0});

            double tri_part = 0.0;
            for (std::size_t i = 0; i < kb; ++i) {
                const data::TriangleSet& t = tris[static_cast<std::size_t>(order[at + i])];
                Vec2 g[3];
                tri_part += loss::triangle_loss(&preds[3 * i], t, weights, g);
                grad[3 * i] += g[0];
                grad[3 * i + 1] += g[1];
                grad[3 * i + 2] += g[2];
            }

            // Anchor terms appear in every batch scaled by the batch's share
            // of the epoch, so one epoch sums to the full total loss.
            const double share = static_cast<double>(kb) / static_cast<double>(tris.size());
            std::vector<Vec2> anchor_grad(n_anchor);
            const double anc_part =
                loss::anchor_loss(std::span<const Vec2>(preds.data() + 3 * kb, n_anchor),
                                  anc.entries, anchor_grad.data());
            for (std::size_t i = 0; i < n_anchor; ++i) grad[3 * kb + i] += share * anchor_grad[i];

            runner.step_with(grad, loss::total_loss(tri_part, share * anc_part), cfg.on_step);
        }
    }
    return model;
}

mlp::Mlp<float> train_baseline1(const feat::FeatureMatrix& features,
                                const std::vector<Vec2>& ground_truth,
                                const data::SplitPlan& split, const TrainConfig& cfg) {
    return train_supervised(features, ground_truth, split, cfg);
}

mlp::Mlp<float> train_baseline2(const feat::FeatureMatrix& features,
                                const sim::DisplacementLog& disp, const sim::Trajectory& traj,
                                const std::vector<Vec2>& ap_positions,
                                const data::SplitPlan& split, const TrainConfig& cfg) {
    const long n_disp = static_cast<long>(disp.measurements.size());
    const int vbar = cfg.vbar;
    if (vbar < 1 || n_disp < vbar) throw std::invalid_argument("need N >= vbar displacements");
    const long n_pairs = n_disp - vbar + 1;  // m = 0, ..., N - vbar

    // displacement magnitudes l_m over [m, m+vbar)
    std::vector<Vec2> prefix(static_cast<std::size_t>(n_disp + 1));
    for (long n = 0; n < n_disp; ++n)
        prefix[static_cast<std::size_t>(n + 1)] =
            prefix[static_cast<std::size_t>(n)] + disp.measurements[static_cast<std::size_t>(n)];
    std::vector<double> mags(static_cast<std::size_t>(n_pairs));
    for (long m = 0; m < n_pairs; ++m)
        mags[static_cast<std::size_t>(m)] =
            (prefix[static_cast<std::size_t>(m + vbar)] - prefix[static_cast<std::size_t>(m)])
                .norm();

    const std::vector<std::vector<double>> tdoa = loss::simulate_tdoa(
        traj, ap_positions, cfg.ref_ap, cfg.tdoa_variance_ns2, cfg.tdoa_seed, n_pairs);

    std::vector<long> train_pairs;
    for (long m = 0; m < n_pairs; ++m)
        if (!split.is_test(m) && !split.is_test(m + vbar)) train_pairs.push_back(m);
    if (train_pairs.empty()) throw std::invalid_argument("no training pairs after the split");

    mlp::Mlp<float> model = init_model(features, cfg);
    mlp::Adam opt;
    opt.init(model, cfg.adam);
    BatchRunner runner(features, model, opt);

    std::vector<long> rows, batch_rows;
    std::vector<double> batch_mags;
    std::vector<Vec2> grad, grad_start, grad_end;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        opt.set_epoch(epoch);
        const std::vector<long> order = shuffled(train_pairs.size(), mix_seed(cfg.shuffle_seed, epoch));
        for (std::size_t at = 0; at < order.size(); at += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(order.size(), at + static_cast<std::size_t>(cfg.batch_size));
            const std::size_t kb = end - at;

            rows.clear();
            batch_rows.clear();
            batch_mags.clear();
            for (std::size_t i = at; i < end; ++i) {
                const long m = train_pairs[static_cast<std::size_t>(order[i])];
                rows.push_back(m);
                batch_rows.push_back(m);
                batch_mags.push_back(mags[static_cast<std::size_t>(m)]);
            }
            for (std::size_t i = at; i < end; ++i)
                rows.push_back(train_pairs[static_cast<std::size_t>(order[i])] + vbar);

            const std::vector<Vec2>& preds = runner.forward_batch(rows);
            grad.assign(preds.size(), Vec2{0.0, 0.0});
            grad_start.resize(kb);
            grad_end.resize(kb);
            const double value = loss::baseline2_loss(
                std::span<const Vec2>(preds.data(), kb), std::span<const Vec2>(preds.data() + kb, kb),
                batch_mags, tdoa, batch_rows, ap_positions, cfg.ref_ap, grad_start.data(),
                grad_end.data());
            for (std::size_t i = 0; i < kb; ++i) {
                grad[i] = grad_start[i];
                grad[kb + i] = grad_end[i];
            }
            runner.step_with(grad, value, cfg.on_step);
        }
    }
    return model;
}

mlp::Mlp<float> train_baseline3(const feat::FeatureMatrix& features,
                                const sim::DisplacementLog& disp, const data::AnchorSet& anchors,
                                const data::SplitPlan& split, const TrainConfig& cfg) {
    // Reconstruction weights follow the unit convention 2E = 1 for both the
    // displacement and the anchor terms.
    data::AnchorSet recon = data::training_anchors(anchors, split);
    for (data::AnchorEntry& a : recon.entries) a.variance = 0.5;
    const PseudoLabels labels = reconstruct_trajectory_ls(disp, recon);
    return train_supervised(features, labels.positions, split, cfg);
}

}  // namespace npos::train
