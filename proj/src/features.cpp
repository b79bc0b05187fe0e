#include "npos/features.hpp"

#include <cmath>
#include <stdexcept>

#include "npos/binio.hpp"
#include "npos/errors.hpp"
#include "npos/kernels.hpp"

namespace npos::feat {

void AveragingPolicy::validate() const {
    if (fixed_len < 0) throw ConfigError("fixed averaging length must be >= 0");
    if (!(scale > 0.0)) throw ConfigError("averaging scale parameter a must be > 0");
    if (!(epsilon > 0.0)) throw ConfigError("averaging epsilon must be > 0");
}

FeatureVector csi_to_feature(const chan::CsiSample& sample) {
    const std::size_t n = sample.tensor.size();
    FeatureVector f;
    f.sample_index = sample.sample_index;
    f.values.resize(n);
    kern::cmag(reinterpret_cast<const double*>(sample.tensor.data()), f.values.data(), n);
    const double norm = std::sqrt(kern::sumsq(f.values.data(), n));
    if (!(norm > 0.0))
        throw std::runtime_error("all-zero CSI tensor at sample " +
                                 std::to_string(sample.sample_index) +
                                 "; feature normalization undefined");
    kern::scal(1.0 / norm, f.values.data(), n);
    return f;
}

std::vector<FeatureVector> csi_to_features(const std::vector<chan::CsiSample>& csi) {
    if (csi.empty()) throw std::invalid_argument("empty CSI sequence");
    std::vector<FeatureVector> out;
    out.reserve(csi.size());
    for (const chan::CsiSample& s : csi) out.push_back(csi_to_feature(s));
    return out;
}

namespace {

int round_up_even(int k) { return k + (k & 1); }

}  // namespace

int window_length(const AveragingPolicy& policy, const sim::DisplacementLog& disp, long n) {
    switch (policy.mode) {
        case AveragingMode::None:
            return 0;
        case AveragingMode::Fixed:
            return round_up_even(policy.fixed_len);
        case AveragingMode::DisplacementDependent: {
            const long n_disp = static_cast<long>(disp.measurements.size());
            Vec2 sum{0.0, 0.0};
            for (long k = n - 10; k <= n + 10; ++k)
                if (k >= 0 && k < n_disp) sum += disp.measurements[k];
            const double denom = sum.norm() + policy.epsilon;
            return round_up_even(static_cast<int>(std::ceil(policy.scale / denom)));
        }
    }
    return 0;
}

std::vector<FeatureVector> moving_average(const std::vector<FeatureVector>& features,
                                          const AveragingPolicy& policy,
                                          const sim::DisplacementLog& disp) {
    policy.validate();
    if (policy.mode == AveragingMode::None) return features;
    const long count = static_cast<long>(features.size());
    if (count == 0) return {};
    if (policy.mode == AveragingMode::DisplacementDependent &&
        static_cast<long>(disp.measurements.size()) != count - 1)
        throw std::invalid_argument(
            "displacement-dependent averaging needs one displacement per consecutive sample "
            "pair");

    const std::size_t dim = features[0].values.size();
    std::vector<FeatureVector> out(count);
    for (long n = 0; n < count; ++n) {
        const int window = window_length(policy, disp, n);
        out[n].sample_index = features[n].sample_index;
        out[n].values.assign(dim, 0.0);
        const long half = window / 2;
        for (long l = n - half; l <= n + half; ++l) {
            if (l < 0 || l >= count) continue;  // zero padding
            kern::axpy(1.0, features[l].values.data(), out[n].values.data(), dim);
        }
        kern::scal(1.0 / (window + 1.0), out[n].values.data(), dim);
    }
    return out;
}

void save_features_file(const std::string& path, const std::vector<FeatureVector>& features) {
    if (features.empty()) throw std::invalid_argument("cannot save an empty feature sequence");
    auto f = io::open_out(path);
    f.write("NPOF", 4);
    io::write_u32(f, 1);
    io::write_u32(f, static_cast<std::uint32_t>(features.size()));
    io::write_u32(f, static_cast<std::uint32_t>(features[0].values.size()));
    std::vector<float> buf;
    for (const FeatureVector& v : features) {
        buf.assign(v.values.begin(), v.values.end());
        io::write_f32_array(f, buf.data(), buf.size());
    }
}

std::vector<FeatureVector> load_features_file(const std::string& path) {
    auto f = io::open_in(path);
    io::expect_magic(f, "NPOF", "feature");
    const std::uint32_t version = io::read_u32(f);
    if (version != 1) throw std::runtime_error("unsupported feature file version");
    const std::uint32_t count = io::read_u32(f);
    const std::uint32_t dim = io::read_u32(f);
    std::vector<FeatureVector> out(count);
    std::vector<float> buf(dim);
    for (std::uint32_t i = 0; i < count; ++i) {
        io::read_f32_array(f, buf.data(), dim);
        out[i].sample_index = static_cast<long>(i);
        out[i].values.assign(buf.begin(), buf.end());
    }
    return out;
}

FeatureMatrix to_feature_matrix(const std::vector<FeatureVector>& features) {
    FeatureMatrix m;
    m.count = static_cast<long>(features.size());
    m.dim = features.empty() ? 0 : static_cast<int>(features[0].values.size());
    m.data.resize(static_cast<std::size_t>(m.count) * m.dim);
    for (long i = 0; i < m.count; ++i) {
        const std::vector<double>& v = features[i].values;
        float* dst = m.data.data() + static_cast<std::size_t>(i) * m.dim;
        for (int j = 0; j < m.dim; ++j) dst[j] = static_cast<float>(v[j]);
    }
    return m;
}

}  // namespace npos::feat
