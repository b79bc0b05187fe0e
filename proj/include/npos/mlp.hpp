#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace npos::mlp {

/// Fully-connected network with ReLU hidden activations and a linear output
/// head. Instantiated for float (training) and double (gradient checks).
template <typename T>
struct Mlp {
    std::vector<int> dims;                  // e.g. {F, 512, 256, 64, 2}
    std::vector<std::vector<T>> weights;    // [layer], row-major dims[l+1] x dims[l]
    std::vector<std::vector<T>> biases;     // [layer], dims[l+1]

    int input_dim() const { return dims.front(); }
    int output_dim() const { return dims.back(); }
    int num_layers() const { return static_cast<int>(weights.size()); }
    std::size_t num_params() const;
};

/// He-uniform hidden layers, small-uniform (+-1e-3) output layer, zero biases.
Mlp<float> make_mlp(const std::vector<int>& dims, std::uint64_t seed);

/// Exact widening copy for 64-bit gradient checking.
Mlp<double> widen(const Mlp<float>& m);

template <typename T>
struct MlpWorkspace {
    int batch = 0;
    // act[0] = input copy, act[l] = layer l output post-activation
    std::vector<std::vector<T>> act;
};

/// Forward pass for a row-major batch (batch x input_dim). Activations stay
/// in the workspace for the backward pass; the return value points at the
/// batch x output_dim output block.
template <typename T>
const T* forward(const Mlp<T>& m, const T* input, int batch, MlpWorkspace<T>& ws);

template <typename T>
struct MlpGrads {
    std::vector<std::vector<T>> weights;
    std::vector<std::vector<T>> biases;
    void init_like(const Mlp<T>& m);
    void zero();
};

/// Accumulates exact gradients of sum_s <upstream_s, forward(input_s)> into
/// grads. ReLU subgradient at 0 is 0. Workspace must hold the matching
/// forward activations.
template <typename T>
void backward(const Mlp<T>& m, const MlpWorkspace<T>& ws, const T* upstream, MlpGrads<T>& grads);

struct AdamConfig {
    double lr0 = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double decay_factor = 0.5;
    int decay_every = 5;  // epochs
};

/// Adam with bias correction and stepwise learning-rate decay.
struct Adam {
    AdamConfig cfg;
    double lr = 0.0;
    long step = 0;
    std::vector<std::vector<float>> mw, vw, mb, vb;

    void init(const Mlp<float>& m, const AdamConfig& c);
    /// lr = lr0 * decay_factor^(epoch / decay_every); call at epoch starts.
    void set_epoch(int epoch);
    /// One optimizer step. Throws if any gradient is non-finite, naming the
    /// offending parameter block.
    void apply(Mlp<float>& m, const MlpGrads<float>& grads);
};

// Checkpoint container: magic "NPOM", version u32 LE, layer count u32, dims
// u32 each, parameters f32 LE in layer order (W0, b0, W1, b1, ...), then a
// u8 flag and, if set, the optimizer state.
void save_model(const std::string& path, const Mlp<float>& m, const Adam* opt = nullptr);
Mlp<float> load_model(const std::string& path, Adam* opt = nullptr);

}  // namespace npos::mlp
