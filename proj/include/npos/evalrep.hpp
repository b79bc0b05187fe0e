#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "npos/features.hpp"
#include "npos/geom.hpp"
#include "npos/mlp.hpp"

namespace npos::eval {

struct ErrorReport {
    std::string method;
    std::vector<double> per_sample_errors;  // metres
    double mean = 0.0;
    double median = 0.0;
    double p95 = 0.0;  // nearest-rank 95th percentile
};

/// Per-sample Euclidean error of the model on the test samples. Takes no
/// displacement data: inference needs CSI features only.
ErrorReport evaluate(const mlp::Mlp<float>& model, const feat::FeatureMatrix& features,
                     std::span<const long> test_indices, std::span<const Vec2> ground_truth,
                     const std::string& method);

/// Statistics of an explicit error list (exposed for tests and sweeps).
ErrorReport make_report(std::vector<double> errors, const std::string& method);

/// Predictions for a set of samples (used by the plot artifacts).
std::vector<Vec2> predict(const mlp::Mlp<float>& model, const feat::FeatureMatrix& features,
                          std::span<const long> indices);

/// Sorted (error, cumulative probability) steps, terminal probability 1.
std::vector<std::pair<double, double>> empirical_cdf(const ErrorReport& report);

struct SweepRow {
    double value = 0.0;
    double mean = 0.0;
    double p95 = 0.0;
};

// CSV artifacts.
void save_results_csv(const std::string& path, std::span<const ErrorReport> reports);
void save_cdf_csv(const std::string& path, const ErrorReport& report);
void save_sweep_csv(const std::string& path, const std::string& param,
                    std::span<const SweepRow> rows);

// SVG artifacts: predicted-position scatter colored by error, and CDF curves.
void write_error_map_svg(const std::string& path, std::span<const Vec2> positions,
                         std::span<const double> errors, std::span<const Vec2> area_polygon);
void write_cdf_svg(const std::string& path, std::span<const ErrorReport> reports);

}  // namespace npos::eval
