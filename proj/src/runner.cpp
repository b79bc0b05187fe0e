#include "npos/runner.hpp"

#include <filesystem>
#include <fstream>
#include <thread>

#include "npos/baselines.hpp"
#include "npos/errors.hpp"

namespace npos::run {

namespace fs = std::filesystem;

std::string trajectory_path(const std::string& d) { return d + "/trajectory.csv"; }
std::string displacements_path(const std::string& d) { return d + "/displacements.csv"; }
std::string anchors_path(const std::string& d) { return d + "/anchors.csv"; }
std::string csi_path(const std::string& d) { return d + "/csi.npos"; }
std::string features_path(const std::string& d) { return d + "/features.npof"; }
std::string split_path(const std::string& d) { return d + "/split.txt"; }
std::string triangles_path(const std::string& d) { return d + "/triangles.csv"; }
std::string results_path(const std::string& d) { return d + "/results.csv"; }

std::string model_path(const std::string& d, const cfg::ExperimentConfig& c,
                       const std::string& method) {
    return d + "/model_" + method + "_" + c.hash_tag() + ".npom";
}

namespace {

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

void append_manifest(const std::string& out_dir, const cfg::ExperimentConfig& cfg,
                     const std::vector<std::string>& files) {
    std::ofstream f(out_dir + "/manifest.txt", std::ios::app);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(cfg.config_hash()));
    for (const std::string& file : files) f << buf << "  " << file << '\n';
}

std::vector<feat::FeatureVector> average_features(const cfg::ExperimentConfig& cfg,
                                                  std::vector<feat::FeatureVector> raw,
                                                  const sim::DisplacementLog& disp) {
    if (cfg.averaging.mode == feat::AveragingMode::None) return raw;
    return feat::moving_average(raw, cfg.averaging, disp);
}

}  // namespace

std::vector<feat::FeatureVector> raw_features(const cfg::ExperimentConfig& cfg,
                                              const sim::Trajectory& traj) {
    std::vector<feat::FeatureVector> out;
    out.reserve(traj.positions.size());
    for (std::size_t n = 0; n < traj.positions.size(); ++n) {
        chan::CsiSample sample = chan::synthesize_csi_sample(cfg.world, cfg.channel,
                                                             traj.positions[n],
                                                             static_cast<long>(n));
        if (cfg.downsample_factor > 1)
            sample = chan::downsample_subcarriers(sample, cfg.downsample_factor);
        out.push_back(feat::csi_to_feature(sample));
    }
    return out;
}

PipelineData prepare_pipeline(const cfg::ExperimentConfig& cfg) {
    cfg.validate();
    PipelineData d;
    auto [traj, disp] = sim::generate_trajectory(cfg.world, cfg.motion, cfg.run.n_samples);
    d.traj = std::move(traj);
    d.disp = std::move(disp);
    d.features = average_features(cfg, raw_features(cfg, d.traj), d.disp);
    d.fmat = feat::to_feature_matrix(d.features);
    d.anchors = data::build_anchor_set(d.traj.dock_indices, cfg.world.dock_position,
                                       cfg.anchor_variance);
    d.split = data::split_samples(cfg.run.n_samples, cfg.split_seed);
    return d;
}

mlp::Mlp<float> train_method(const cfg::ExperimentConfig& cfg, const PipelineData& d,
                             const std::string& method) {
    if (method == "ours") {
        const std::vector<data::TriangleSet> tris = data::build_triangles(d.disp, cfg.leap);
        return train::train_proposed(d.fmat, tris, d.anchors, d.split, cfg.train);
    }
    if (method == "baseline1")
        return train::train_baseline1(d.fmat, d.traj.positions, d.split, cfg.train);
    if (method == "baseline2")
        return train::train_baseline2(d.fmat, d.disp, d.traj, cfg.world.ap_positions, d.split,
                                      cfg.train);
    if (method == "baseline3")
        return train::train_baseline3(d.fmat, d.disp, d.anchors, d.split, cfg.train);
    throw UnknownMethodError("unknown method '" + method + "'");
}

eval::ErrorReport evaluate_model(const cfg::ExperimentConfig& cfg, const PipelineData& d,
                                 const mlp::Mlp<float>& model, const std::string& method) {
    (void)cfg;
    return eval::evaluate(model, d.fmat, d.split.test_indices, d.traj.positions, method);
}

void stage_simulate(const cfg::ExperimentConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    ensure_dir(out_dir);
    const auto [traj, disp] = sim::generate_trajectory(cfg.world, cfg.motion, cfg.run.n_samples);
    sim::save_trajectory_csv(traj, trajectory_path(out_dir));
    sim::save_displacements_csv(disp, displacements_path(out_dir));
    const data::AnchorSet anchors =
        data::build_anchor_set(traj.dock_indices, cfg.world.dock_position, cfg.anchor_variance);
    data::save_anchors_csv(anchors, anchors_path(out_dir));

    const int w_out = (cfg.channel.n_subcarriers + cfg.downsample_factor - 1) / cfg.downsample_factor;
    chan::CsiFileWriter writer(csi_path(out_dir),
                               static_cast<std::uint32_t>(traj.positions.size()),
                               static_cast<std::uint32_t>(cfg.world.num_aps()),
                               static_cast<std::uint32_t>(cfg.world.num_antennas()),
                               static_cast<std::uint32_t>(w_out));
    for (std::size_t n = 0; n < traj.positions.size(); ++n) {
        chan::CsiSample s = chan::synthesize_csi_sample(cfg.world, cfg.channel, traj.positions[n],
                                                        static_cast<long>(n));
        if (cfg.downsample_factor > 1) s = chan::downsample_subcarriers(s, cfg.downsample_factor);
        writer.append(s);
    }
    append_manifest(out_dir, cfg,
                    {"trajectory.csv", "displacements.csv", "anchors.csv", "csi.npos"});
}

void stage_featurize(const cfg::ExperimentConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    chan::CsiFileReader reader(csi_path(out_dir));
    std::vector<feat::FeatureVector> features;
    features.reserve(reader.count());
    chan::CsiSample s;
    while (reader.next(s)) features.push_back(feat::csi_to_feature(s));
    const sim::DisplacementLog disp = sim::load_displacements_csv(displacements_path(out_dir));
    features = average_features(cfg, std::move(features), disp);
    feat::save_features_file(features_path(out_dir), features);
    append_manifest(out_dir, cfg, {"features.npof"});
}

namespace {

PipelineData load_pipeline_from_files(const cfg::ExperimentConfig& cfg,
                                      const std::string& out_dir, bool need_trajectory) {
    PipelineData d;
    d.features = feat::load_features_file(features_path(out_dir));
    d.fmat = feat::to_feature_matrix(d.features);
    d.disp = sim::load_displacements_csv(displacements_path(out_dir));
    const data::AnchorSet anchors = data::load_anchors_csv(anchors_path(out_dir));
    d.anchors = anchors;
    if (static_cast<long>(d.features.size()) != cfg.run.n_samples)
        throw std::runtime_error("feature file sample count does not match [run] n_samples");
    d.split = data::split_samples(cfg.run.n_samples, cfg.split_seed);
    if (need_trajectory) d.traj = sim::load_trajectory_csv(trajectory_path(out_dir));
    return d;
}

}  // namespace

void stage_train(const cfg::ExperimentConfig& cfg, const std::string& out_dir,
                 const std::string& method) {
    cfg.validate();
    const bool known = method == "ours" || method == "baseline1" || method == "baseline2" ||
                       method == "baseline3";
    if (!known) throw UnknownMethodError("unknown method '" + method + "'");

    // Ground truth enters training only through Baseline 1's labels and
    // Baseline 2's simulated TDoA.
    const bool needs_truth = (method == "baseline1" || method == "baseline2");
    PipelineData d = load_pipeline_from_files(cfg, out_dir, needs_truth);
    data::save_split(d.split, split_path(out_dir));
    if (method == "ours")
        data::save_triangles_csv(data::build_triangles(d.disp, cfg.leap), triangles_path(out_dir));

    const mlp::Mlp<float> model = train_method(cfg, d, method);
    mlp::save_model(model_path(out_dir, cfg, method), model);
    append_manifest(out_dir, cfg, {fs::path(model_path(out_dir, cfg, method)).filename().string()});
}

std::vector<eval::ErrorReport> stage_evaluate(const cfg::ExperimentConfig& cfg,
                                              const std::string& out_dir) {
    cfg.validate();
    PipelineData d = load_pipeline_from_files(cfg, out_dir, /*need_trajectory=*/true);
    std::vector<eval::ErrorReport> reports;
    std::vector<std::string> files;
    for (const std::string& method : cfg.methods) {
        const mlp::Mlp<float> model = mlp::load_model(model_path(out_dir, cfg, method));
        reports.push_back(evaluate_model(cfg, d, model, method));
        eval::save_cdf_csv(out_dir + "/cdf_" + method + ".csv", reports.back());
        files.push_back("cdf_" + method + ".csv");

        const std::vector<Vec2> preds = eval::predict(model, d.fmat, d.split.test_indices);
        eval::write_error_map_svg(out_dir + "/" + cfg.run.name + "_errormap_" + method + ".svg",
                                  preds, reports.back().per_sample_errors,
                                  cfg.world.area_polygon);
        files.push_back(cfg.run.name + "_errormap_" + method + ".svg");
    }
    eval::save_results_csv(results_path(out_dir), reports);
    eval::write_cdf_svg(out_dir + "/" + cfg.run.name + "_cdf.svg", reports);
    files.push_back("results.csv");
    files.push_back(cfg.run.name + "_cdf.svg");
    append_manifest(out_dir, cfg, files);
    return reports;
}

std::vector<eval::SweepRow> stage_sweep(const cfg::ExperimentConfig& cfg,
                                        const std::string& out_dir, const std::string& param,
                                        const std::vector<double>& values) {
    cfg.validate();
    if (param != "V" && param != "L") throw ConfigError("sweep parameter must be V or L");
    ensure_dir(out_dir);

    // One simulation serves every run; only the stage the parameter touches
    // is recomputed per value.
    auto [traj, disp] = sim::generate_trajectory(cfg.world, cfg.motion, cfg.run.n_samples);
    const std::vector<feat::FeatureVector> raw = raw_features(cfg, traj);
    const data::AnchorSet anchors =
        data::build_anchor_set(traj.dock_indices, cfg.world.dock_position, cfg.anchor_variance);
    const data::SplitPlan split = data::split_samples(cfg.run.n_samples, cfg.split_seed);

    std::vector<eval::SweepRow> rows(values.size());
    auto run_one = [&](std::size_t vi) {
        cfg::ExperimentConfig local = cfg;
        if (param == "V") {
            local.leap = static_cast<int>(values[vi]);
        } else {
            local.averaging.mode = feat::AveragingMode::Fixed;
            local.averaging.fixed_len = static_cast<int>(values[vi]);
        }
        PipelineData d;
        d.traj = traj;
        d.disp = disp;
        d.features = average_features(local, raw, disp);
        d.fmat = feat::to_feature_matrix(d.features);
        d.anchors = anchors;
        d.split = split;
        const mlp::Mlp<float> model = train_method(local, d, "ours");
        const eval::ErrorReport r = evaluate_model(local, d, model, "ours");
        rows[vi] = {values[vi], r.mean, r.p95};
    };

    const int threads = std::max(1, cfg.run.threads);
    if (threads <= 1 || values.size() <= 1) {
        for (std::size_t i = 0; i < values.size(); ++i) run_one(i);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&run_one, &values, t, threads]() {
                for (std::size_t i = static_cast<std::size_t>(t); i < values.size(); i += threads)
                    run_one(i);
            });
        for (std::thread& th : pool) th.join();
    }

    eval::save_sweep_csv(out_dir + "/sweep_" + param + ".csv", param, rows);
    append_manifest(out_dir, cfg, {"sweep_" + param + ".csv"});
    return rows;
}

void stage_all(const cfg::ExperimentConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    std::error_code ec;
    fs::remove(out_dir + "/manifest.txt", ec);  // rebuilt from scratch for byte-identical reruns
    stage_simulate(cfg, out_dir);
    stage_featurize(cfg, out_dir);
    for (const std::string& method : cfg.methods) stage_train(cfg, out_dir, method);
    stage_evaluate(cfg, out_dir);
}

}  // namespace npos::run
