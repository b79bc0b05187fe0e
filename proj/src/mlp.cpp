#include "npos/mlp.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "npos/binio.hpp"
#include "npos/kernels.hpp"
#include "npos/rng.hpp"

namespace npos::mlp {

template <typename T>
std::size_t Mlp<T>::num_params() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
    return n;
}

Mlp<float> make_mlp(const std::vector<int>& dims, std::uint64_t seed) {
    if (dims.size() < 2) throw std::invalid_argument("network needs at least two layer dims");
    for (int d : dims)
        if (d < 1) throw std::invalid_argument("layer dimensions must be >= 1");

    Mlp<float> m;
    m.dims = dims;
    Rng rng(seed);
    const int layers = static_cast<int>(dims.size()) - 1;
    for (int l = 0; l < layers; ++l) {
        const int rows = dims[l + 1];
        const int cols = dims[l];
        const bool output_layer = (l == layers - 1);
        const double limit = output_layer ? 1e-3 : std::sqrt(6.0 / cols);
        std::vector<float> w(static_cast<std::size_t>(rows) * cols);
        for (float& v : w) v = static_cast<float>(rng.uniform(-limit, limit));
        m.weights.push_back(std::move(w));
        m.biases.emplace_back(rows, 0.0f);
    }
    return m;
}

Mlp<double> widen(const Mlp<float>& m) {
    Mlp<double> out;
    out.dims = m.dims;
    out.weights.reserve(m.weights.size());
    out.biases.reserve(m.biases.size());
    for (const auto& w : m.weights) out.weights.emplace_back(w.begin(), w.end());
    for (const auto& b : m.biases) out.biases.emplace_back(b.begin(), b.end());
    return out;
}

template <typename T>
const T* forward(const Mlp<T>& m, const T* input, int batch, MlpWorkspace<T>& ws) {
    const int layers = m.num_layers();
    ws.batch = batch;
    ws.act.resize(layers + 1);
    ws.act[0].assign(input, input + static_cast<std::size_t>(batch) * m.dims[0]);
    for (int l = 0; l < layers; ++l) {
        const int rows = m.dims[l + 1];
        const int cols = m.dims[l];
        ws.act[l + 1].resize(static_cast<std::size_t>(batch) * rows);
        const bool hidden = (l + 1 < layers);
        for (int s = 0; s < batch; ++s) {
            const T* in = ws.act[l].data() + static_cast<std::size_t>(s) * cols;
            T* out = ws.act[l + 1].data() + static_cast<std::size_t>(s) * rows;
            kern::gemv(m.weights[l].data(), in, m.biases[l].data(), out, rows, cols);
            if (hidden) kern::relu(out, out, static_cast<std::size_t>(rows));
        }
    }
    return ws.act[layers].data();
}

template <typename T>
void MlpGrads<T>::init_like(const Mlp<T>& m) {
    weights.clear();
    biases.clear();
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        weights.emplace_back(m.weights[l].size(), T(0));
        biases.emplace_back(m.biases[l].size(), T(0));
    }
}

template <typename T>
void MlpGrads<T>::zero() {
    for (auto& w : weights) std::memset(w.data(), 0, w.size() * sizeof(T));
    for (auto& b : biases) std::memset(b.data(), 0, b.size() * sizeof(T));
}

template <typename T>
void backward(const Mlp<T>& m, const MlpWorkspace<T>& ws, const T* upstream, MlpGrads<T>& grads) {
    const int layers = m.num_layers();
    const int batch = ws.batch;
    if (grads.weights.size() != m.weights.size()) grads.init_like(m);

    std::vector<T> delta, tmp;
    for (int s = 0; s < batch; ++s) {
        delta.assign(upstream + static_cast<std::size_t>(s) * m.dims[layers],
                     upstream + static_cast<std::size_t>(s + 1) * m.dims[layers]);
        for (int l = layers - 1; l >= 0; --l) {
            const int rows = m.dims[l + 1];
            const int cols = m.dims[l];
            const T* below = ws.act[l].data() + static_cast<std::size_t>(s) * cols;
            kern::ger(grads.weights[l].data(), delta.data(), below, rows, cols);
            T* gb = grads.biases[l].data();
            for (int r = 0; r < rows; ++r) gb[r] += delta[r];
            if (l > 0) {
                tmp.resize(static_cast<std::size_t>(cols));
                kern::gemv_t(m.weights[l].data(), delta.data(), tmp.data(), rows, cols);
                kern::relu_bwd(below, tmp.data(), tmp.data(), static_cast<std::size_t>(cols));
                delta.swap(tmp);
            }
        }
    }
}

void Adam::init(const Mlp<float>& m, const AdamConfig& c) {
    cfg = c;
    lr = c.lr0;
    step = 0;
    mw.clear();
    vw.clear();
    mb.clear();
    vb.clear();
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        mw.emplace_back(m.weights[l].size(), 0.0f);
        vw.emplace_back(m.weights[l].size(), 0.0f);
        mb.emplace_back(m.biases[l].size(), 0.0f);
        vb.emplace_back(m.biases[l].size(), 0.0f);
    }
}

void Adam::set_epoch(int epoch) {
    lr = cfg.lr0 * std::pow(cfg.decay_factor, epoch / cfg.decay_every);
}

namespace {

bool all_finite(const std::vector<float>& v) {
    double sum = 0.0;
    for (float x : v) sum += x;
    if (std::isfinite(sum)) return true;
    for (float x : v)
        if (!std::isfinite(x)) return false;
    return true;  // the sum overflowed but every entry is finite
}

}  // namespace

void Adam::apply(Mlp<float>& m, const MlpGrads<float>& grads) {
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        if (!all_finite(grads.weights[l]))
            throw std::runtime_error("non-finite gradient in weight block W" + std::to_string(l));
        if (!all_finite(grads.biases[l]))
            throw std::runtime_error("non-finite gradient in bias block b" + std::to_string(l));
    }
    ++step;
    const float inv_bc1 = static_cast<float>(1.0 / (1.0 - std::pow(cfg.beta1, step)));
    const float inv_bc2 = static_cast<float>(1.0 / (1.0 - std::pow(cfg.beta2, step)));
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        kern::adam_update(m.weights[l].data(), mw[l].data(), vw[l].data(),
                          grads.weights[l].data(), m.weights[l].size(), static_cast<float>(lr),
                          static_cast<float>(cfg.beta1), static_cast<float>(cfg.beta2),
                          static_cast<float>(cfg.eps), inv_bc1, inv_bc2);
        kern::adam_update(m.biases[l].data(), mb[l].data(), vb[l].data(), grads.biases[l].data(),
                          m.biases[l].size(), static_cast<float>(lr),
                          static_cast<float>(cfg.beta1), static_cast<float>(cfg.beta2),
                          static_cast<float>(cfg.eps), inv_bc1, inv_bc2);
    }
}

void save_model(const std::string& path, const Mlp<float>& m, const Adam* opt) {
    auto f = io::open_out(path);
    f.write("NPOM", 4);
    io::write_u32(f, 1);
    io::write_u32(f, static_cast<std::uint32_t>(m.dims.size()));
    for (int d : m.dims) io::write_u32(f, static_cast<std::uint32_t>(d));
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        io::write_f32_array(f, m.weights[l].data(), m.weights[l].size());
        io::write_f32_array(f, m.biases[l].data(), m.biases[l].size());
    }
    f.put(opt ? 1 : 0);
    if (opt) {
        io::write_u64(f, static_cast<std::uint64_t>(opt->step));
        io::write_f64(f, opt->lr);
        for (std::size_t l = 0; l < m.weights.size(); ++l) {
            io::write_f32_array(f, opt->mw[l].data(), opt->mw[l].size());
            io::write_f32_array(f, opt->vw[l].data(), opt->vw[l].size());
            io::write_f32_array(f, opt->mb[l].data(), opt->mb[l].size());
            io::write_f32_array(f, opt->vb[l].data(), opt->vb[l].size());
        }
    }
}

Mlp<float> load_model(const std::string& path, Adam* opt) {
    auto f = io::open_in(path);
    io::expect_magic(f, "NPOM", "model");
    const std::uint32_t version = io::read_u32(f);
    if (version != 1) throw std::runtime_error("unsupported model file version");
    const std::uint32_t ndims = io::read_u32(f);
    if (ndims < 2 || ndims > 64) throw std::runtime_error("corrupt model file");
    Mlp<float> m;
    m.dims.resize(ndims);
    for (std::uint32_t i = 0; i < ndims; ++i) m.dims[i] = static_cast<int>(io::read_u32(f));
    for (std::uint32_t l = 0; l + 1 < ndims; ++l) {
        std::vector<float> w(static_cast<std::size_t>(m.dims[l + 1]) * m.dims[l]);
        std::vector<float> b(static_cast<std::size_t>(m.dims[l + 1]));
        io::read_f32_array(f, w.data(), w.size());
        io::read_f32_array(f, b.data(), b.size());
        m.weights.push_back(std::move(w));
        m.biases.push_back(std::move(b));
    }
    const int flag = f.get();
    if (flag == 1 && opt) {
        opt->init(m, opt->cfg);
        opt->step = static_cast<long>(io::read_u64(f));
        opt->lr = io::read_f64(f);
        for (std::size_t l = 0; l < m.weights.size(); ++l) {
            io::read_f32_array(f, opt->mw[l].data(), opt->mw[l].size());
            io::read_f32_array(f, opt->vw[l].data(), opt->vw[l].size());
            io::read_f32_array(f, opt->mb[l].data(), opt->mb[l].size());
            io::read_f32_array(f, opt->vb[l].data(), opt->vb[l].size());
        }
    }
    return m;
}

template struct Mlp<float>;
template struct Mlp<double>;
template struct MlpGrads<float>;
template struct MlpGrads<double>;
template const float* forward(const Mlp<float>&, const float*, int, MlpWorkspace<float>&);
template const double* forward(const Mlp<double>&, const double*, int, MlpWorkspace<double>&);
template void backward(const Mlp<float>&, const MlpWorkspace<float>&, const float*,
                       MlpGrads<float>&);
template void backward(const Mlp<double>&, const MlpWorkspace<double>&, const double*,
                       MlpGrads<double>&);

}  // namespace npos::mlp
