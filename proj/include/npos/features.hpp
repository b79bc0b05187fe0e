#pragma once

#include <string>
#include <vector>

#include "npos/channel.hpp"
#include "npos/sim.hpp"

namespace npos::feat {

struct FeatureVector {
    std::vector<double> values;  // length F = B*A*W
    long sample_index = 0;
};

enum class AveragingMode { None, Fixed, DisplacementDependent };

struct AveragingPolicy {
    AveragingMode mode = AveragingMode::None;
    int fixed_len = 0;       // L; odd values are rounded up to the next even
    double scale = 5.0;      // a, m*samples
    double epsilon = 1e-3;   // m
    void validate() const;
};

/// Entrywise magnitude, unit Euclidean norm over the whole B x A x W tensor,
/// vectorized row-major over (b, a, w). Throws on an all-zero tensor, naming
/// the sample index.
FeatureVector csi_to_feature(const chan::CsiSample& sample);
std::vector<FeatureVector> csi_to_features(const std::vector<chan::CsiSample>& csi);

/// Symmetric moving average of window length L_n + 1 with zero padding
/// outside [0, N]; the divisor stays L_n + 1 at the boundaries. disp is only
/// consulted in displacement-dependent mode, where
/// L_n = ceil(a / (||sum_{k=n-10}^{n+10} delta_k|| + eps)), rounded up to even.
std::vector<FeatureVector> moving_average(const std::vector<FeatureVector>& features,
                                          const AveragingPolicy& policy,
                                          const sim::DisplacementLog& disp);

/// The per-sample window length the policy produces (exposed for tests).
int window_length(const AveragingPolicy& policy, const sim::DisplacementLog& disp, long n);

// Feature container: magic "NPOF", version u32 LE, count u32, F u32, then
// count real vectors of length F as f32 LE.
void save_features_file(const std::string& path, const std::vector<FeatureVector>& features);
std::vector<FeatureVector> load_features_file(const std::string& path);

/// Dense row-major f32 copy used by the training loops.
struct FeatureMatrix {
    long count = 0;
    int dim = 0;
    std::vector<float> data;
    const float* row(long i) const { return data.data() + static_cast<std::size_t>(i) * dim; }
};

FeatureMatrix to_feature_matrix(const std::vector<FeatureVector>& features);

}  // namespace npos::feat
