#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "npos/kernels.hpp"
#include "npos/mlp.hpp"
#include "npos/rng.hpp"
#include "oracles.hpp"

using namespace npos;
using namespace npos::mlp;

namespace {

// flattened parameter access over a double-precision model
std::size_t param_count(const Mlp<double>& m) {
    std::size_t n = 0;
    for (std::size_t l = 0; l < m.weights.size(); ++l) n += m.weights[l].size() + m.biases[l].size();
    return n;
}

double get_param(Mlp<double>& m, std::size_t i) {
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        if (i < m.weights[l].size()) return m.weights[l][i];
        i -= m.weights[l].size();
        if (i < m.biases[l].size()) return m.biases[l][i];
        i -= m.biases[l].size();
    }
    throw std::out_of_range("param index");
}

void set_param(Mlp<double>& m, std::size_t i, double v) {
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        if (i < m.weights[l].size()) {
            m.weights[l][i] = v;
            return;
        }
        i -= m.weights[l].size();
        if (i < m.biases[l].size()) {
            m.biases[l][i] = v;
            return;
        }
        i -= m.biases[l].size();
    }
    throw std::out_of_range("param index");
}

double grad_at(const MlpGrads<double>& g, std::size_t i) {
    for (std::size_t l = 0; l < g.weights.size(); ++l) {
        if (i < g.weights[l].size()) return g.weights[l][i];
        i -= g.weights[l].size();
        if (i < g.biases[l].size()) return g.biases[l][i];
        i -= g.biases[l].size();
    }
    throw std::out_of_range("grad index");
}

}  // namespace

TEST_SUITE("mlp") {
    TEST_CASE("all-zero parameters map anything to the origin") {
        Mlp<float> m = make_mlp({5, 8, 2}, 1);
        for (auto& w : m.weights) std::fill(w.begin(), w.end(), 0.0f);
        MlpWorkspace<float> ws;
        const std::vector<float> x = {1, -2, 3, 0.5f, 9};
        const float* out = forward(m, x.data(), 1, ws);
        CHECK(out[0] == 0.0f);
        CHECK(out[1] == 0.0f);
    }

    TEST_CASE("single active chain multiplies the weights") {
        Mlp<float> m = make_mlp({2, 3, 2}, 1);
        for (auto& w : m.weights) std::fill(w.begin(), w.end(), 0.0f);
        for (auto& b : m.biases) std::fill(b.begin(), b.end(), 0.0f);
        m.weights[0][0 * 2 + 0] = 0.5f;  // hidden unit 0 <- input 0
        m.weights[1][1 * 3 + 0] = 4.0f;  // output 1 <- hidden 0
        MlpWorkspace<float> ws;
        const std::vector<float> x = {3.0f, -7.0f};
        const float* out = forward(m, x.data(), 1, ws);
        CHECK(out[0] == 0.0f);
        CHECK(out[1] == doctest::Approx(0.5f * 4.0f * 3.0f));
    }

    TEST_CASE("forward matches an independent layer-by-layer oracle") {
        Mlp<double> m = widen(make_mlp({7, 11, 5, 2}, 33));
        Rng rng(9);
        std::vector<double> x(7);
        for (double& v : x) v = rng.uniform(-2.0, 2.0);
        MlpWorkspace<double> ws;
        const double* out = forward(m, x.data(), 1, ws);

        // oracle: naive matrix recursion
        std::vector<double> cur = x;
        for (int l = 0; l < m.num_layers(); ++l) {
            const int rows = m.dims[l + 1], cols = m.dims[l];
            std::vector<double> next(rows);
            for (int r = 0; r < rows; ++r) {
                double acc = m.biases[l][r];
                for (int c = 0; c < cols; ++c) acc += m.weights[l][r * cols + c] * cur[c];
                next[r] = (l + 1 < m.num_layers() && acc < 0.0) ? 0.0 : acc;
            }
            cur = next;
        }
        CHECK(oracle::rel_err(out[0], cur[0]) <= 1e-12);
        CHECK(oracle::rel_err(out[1], cur[1]) <= 1e-12);
    }

    TEST_CASE("zero upstream gradient produces zero parameter gradients") {
        Mlp<float> m = make_mlp({4, 6, 2}, 2);
        MlpWorkspace<float> ws;
        std::vector<float> x = {1, 2, 3, 4};
        forward(m, x.data(), 1, ws);
        MlpGrads<float> g;
        g.init_like(m);
        const std::vector<float> up = {0.0f, 0.0f};
        backward(m, ws, up.data(), g);
        for (const auto& w : g.weights)
            for (float v : w) CHECK(v == 0.0f);
    }

    TEST_CASE("single linear layer gradient is the outer product with the input") {
        Mlp<float> m = make_mlp({3, 2}, 4);  // one layer = linear output head
        MlpWorkspace<float> ws;
        const std::vector<float> x = {1.0f, -2.0f, 0.5f};
        forward(m, x.data(), 1, ws);
        MlpGrads<float> g;
        g.init_like(m);
        const std::vector<float> up = {1.0f, 0.0f};  // d loss / d out
        backward(m, ws, up.data(), g);
        CHECK(g.weights[0][0] == doctest::Approx(1.0f));
        CHECK(g.weights[0][1] == doctest::Approx(-2.0f));
        CHECK(g.weights[0][2] == doctest::Approx(0.5f));
        CHECK(g.weights[0][3] == 0.0f);  // second output row untouched
        CHECK(g.biases[0][0] == 1.0f);
        CHECK(g.biases[0][1] == 0.0f);
    }

    TEST_CASE("backward matches central finite differences on a small model") {
        Mlp<double> m = widen(make_mlp({3, 4, 2}, 17));
        Rng rng(5);
        const int batch = 3;
        std::vector<double> x(3 * batch), up(2 * batch);
        for (double& v : x) v = rng.uniform(-1.5, 1.5);
        for (double& v : up) v = rng.uniform(-1.0, 1.0);

        MlpWorkspace<double> ws;
        forward(m, x.data(), batch, ws);
        MlpGrads<double> g;
        g.init_like(m);
        backward(m, ws, up.data(), g);

        auto objective = [&]() {
            MlpWorkspace<double> w2;
            const double* out = forward(m, x.data(), batch, w2);
            double s = 0.0;
            for (int i = 0; i < 2 * batch; ++i) s += up[static_cast<std::size_t>(i)] * out[i];
            return s;
        };
        std::vector<std::size_t> coords;
        std::vector<double> analytic;
        for (std::size_t i = 0; i < param_count(m); ++i) {
            coords.push_back(i);
            analytic.push_back(grad_at(g, i));
        }
        const auto fd = oracle::finite_difference(
            objective, [&](std::size_t i) { return get_param(m, i); },
            [&](std::size_t i, double v) { set_param(m, i, v); }, coords, analytic, 1e-5);
        CHECK(fd.max_rel_err <= 1e-6);
    }

    TEST_CASE("adam: first step moves each coordinate by about lr") {
        Mlp<float> m = make_mlp({2, 2}, 3);
        const Mlp<float> before = m;
        Adam opt;
        AdamConfig cfg;
        cfg.lr0 = 1e-3;
        opt.init(m, cfg);
        opt.set_epoch(0);
        MlpGrads<float> g;
        g.init_like(m);
        for (auto& w : g.weights) std::fill(w.begin(), w.end(), 0.7f);
        for (auto& b : g.biases) std::fill(b.begin(), b.end(), -0.2f);
        opt.apply(m, g);
        for (std::size_t i = 0; i < m.weights[0].size(); ++i)
            CHECK(before.weights[0][i] - m.weights[0][i] == doctest::Approx(1e-3).epsilon(1e-3));
        for (std::size_t i = 0; i < m.biases[0].size(); ++i)
            CHECK(m.biases[0][i] - before.biases[0][i] == doctest::Approx(1e-3).epsilon(1e-3));
    }

    TEST_CASE("adam: zero gradients leave parameters unchanged") {
        Mlp<float> m = make_mlp({3, 3, 2}, 6);
        const Mlp<float> before = m;
        Adam opt;
        opt.init(m, AdamConfig{});
        MlpGrads<float> g;
        g.init_like(m);
        for (int s = 0; s < 5; ++s) opt.apply(m, g);
        for (std::size_t l = 0; l < m.weights.size(); ++l)
            CHECK(m.weights[l] == before.weights[l]);
    }

    TEST_CASE("adam: non-finite gradient names the parameter block") {
        Mlp<float> m = make_mlp({2, 3, 2}, 6);
        Adam opt;
        opt.init(m, AdamConfig{});
        MlpGrads<float> g;
        g.init_like(m);
        g.weights[1][0] = std::numeric_limits<float>::quiet_NaN();
        CHECK_THROWS_WITH_AS(opt.apply(m, g), doctest::Contains("W1"), std::runtime_error);
    }

    TEST_CASE("adam drives a 1-D quadratic to its minimum") {
        // loss (x - 3)^2 through the adam kernel; oracle = the scalar recursion
        float x = 0.0f, mm = 0.0f, vv = 0.0f;
        const float lr = 1e-2f, b1 = 0.9f, b2 = 0.999f, eps = 1e-8f;
        for (int t = 1; t <= 2000; ++t) {
            const float grad = 2.0f * (x - 3.0f);
            const float bc1 = 1.0f / (1.0f - std::pow(b1, static_cast<float>(t)));
            const float bc2 = 1.0f / (1.0f - std::pow(b2, static_cast<float>(t)));
            kern::adam_update(&x, &mm, &vv, &grad, 1, lr, b1, b2, eps, bc1, bc2);
        }
        CHECK(std::fabs(x - 3.0f) < 1e-2);
    }

    TEST_CASE("learning-rate decay halves every decay_every epochs") {
        Mlp<float> m = make_mlp({2, 2}, 3);
        Adam opt;
        AdamConfig cfg;
        cfg.lr0 = 1e-4;
        cfg.decay_factor = 0.5;
        cfg.decay_every = 5;
        opt.init(m, cfg);
        opt.set_epoch(0);
        CHECK(opt.lr == doctest::Approx(1e-4));
        opt.set_epoch(4);
        CHECK(opt.lr == doctest::Approx(1e-4));
        opt.set_epoch(5);
        CHECK(opt.lr == doctest::Approx(5e-5));
        opt.set_epoch(14);
        CHECK(opt.lr == doctest::Approx(2.5e-5));
    }

    TEST_CASE("scaling the output layer scales the outputs") {
        Mlp<float> m = make_mlp({4, 8, 2}, 11);
        MlpWorkspace<float> ws;
        const std::vector<float> x = {0.3f, -0.7f, 1.1f, 0.0f};
        const float* out1 = forward(m, x.data(), 1, ws);
        const float o0 = out1[0], o1 = out1[1];
        for (float& w : m.weights.back()) w *= 3.0f;
        for (float& b : m.biases.back()) b *= 3.0f;
        const float* out3 = forward(m, x.data(), 1, ws);
        CHECK(out3[0] == doctest::Approx(3.0f * o0).epsilon(1e-5));
        CHECK(out3[1] == doctest::Approx(3.0f * o1).epsilon(1e-5));
    }

    TEST_CASE("checkpoint round trip with optimizer state") {
        Mlp<float> m = make_mlp({3, 5, 2}, 8);
        Adam opt;
        opt.init(m, AdamConfig{});
        MlpGrads<float> g;
        g.init_like(m);
        for (auto& w : g.weights) std::fill(w.begin(), w.end(), 0.1f);
        opt.apply(m, g);

        const std::string path =
            std::filesystem::temp_directory_path().string() + "/npos_test_model.npom";
        save_model(path, m, &opt);
        Adam opt2;
        opt2.cfg = opt.cfg;
        const Mlp<float> m2 = load_model(path, &opt2);
        CHECK(m2.dims == m.dims);
        for (std::size_t l = 0; l < m.weights.size(); ++l) {
            CHECK(m2.weights[l] == m.weights[l]);
            CHECK(m2.biases[l] == m.biases[l]);
        }
        CHECK(opt2.step == opt.step);
        CHECK(opt2.mw[0] == opt.mw[0]);
    }
}
