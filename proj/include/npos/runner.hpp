#pragma once

#include <string>
#include <vector>

#include "npos/config.hpp"
#include "npos/evalrep.hpp"

namespace npos::run {

/// Everything the training stages consume, produced in memory.
struct PipelineData {
    sim::Trajectory traj;
    sim::DisplacementLog disp;
    std::vector<feat::FeatureVector> features;  // post-averaging
    feat::FeatureMatrix fmat;
    data::AnchorSet anchors;
    data::SplitPlan split;
};

/// simulate -> synthesize CSI (streamed) -> features -> anchors/split.
PipelineData prepare_pipeline(const cfg::ExperimentConfig& cfg);

/// Normalized pre-averaging features; lets sweeps re-average cheaply.
std::vector<feat::FeatureVector> raw_features(const cfg::ExperimentConfig& cfg,
                                              const sim::Trajectory& traj);

mlp::Mlp<float> train_method(const cfg::ExperimentConfig& cfg, const PipelineData& data,
                             const std::string& method);

eval::ErrorReport evaluate_model(const cfg::ExperimentConfig& cfg, const PipelineData& data,
                                 const mlp::Mlp<float>& model, const std::string& method);

// File-based stages behind the CLI subcommands. All artifact paths live in
// out_dir; binary and CSV formats are fixed by the respective modules.
void stage_simulate(const cfg::ExperimentConfig& cfg, const std::string& out_dir);
void stage_featurize(const cfg::ExperimentConfig& cfg, const std::string& out_dir);
void stage_train(const cfg::ExperimentConfig& cfg, const std::string& out_dir,
                 const std::string& method);
std::vector<eval::ErrorReport> stage_evaluate(const cfg::ExperimentConfig& cfg,
                                              const std::string& out_dir);
std::vector<eval::SweepRow> stage_sweep(const cfg::ExperimentConfig& cfg,
                                        const std::string& out_dir, const std::string& param,
                                        const std::vector<double>& values);
void stage_all(const cfg::ExperimentConfig& cfg, const std::string& out_dir);

// Artifact names inside an output directory.
std::string trajectory_path(const std::string& out_dir);
std::string displacements_path(const std::string& out_dir);
std::string anchors_path(const std::string& out_dir);
std::string csi_path(const std::string& out_dir);
std::string features_path(const std::string& out_dir);
std::string split_path(const std::string& out_dir);
std::string triangles_path(const std::string& out_dir);
std::string model_path(const std::string& out_dir, const cfg::ExperimentConfig& cfg,
                       const std::string& method);
std::string results_path(const std::string& out_dir);

}  // namespace npos::run
