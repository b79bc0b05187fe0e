#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "npos/kernels.hpp"
#include "npos/rng.hpp"

using namespace npos;

namespace {

// Runs a check under both backends; the guard restores the ambient backend.
struct BackendGuard {
    kern::Backend saved;
    BackendGuard() : saved(kern::backend()) {}
    ~BackendGuard() { kern::set_backend(saved); }
};

template <typename F>
void for_each_backend(F&& body) {
    BackendGuard guard;
    kern::set_backend(kern::Backend::Scalar);
    body(kern::Backend::Scalar);
    if (kern::avx2_supported()) {
        kern::set_backend(kern::Backend::Avx2);
        body(kern::Backend::Avx2);
    }
}

std::vector<float> random_f32(Rng& rng, std::size_t n) {
    std::vector<float> v(n);
    for (float& x : v) x = static_cast<float>(rng.uniform(-1.0, 1.0));
    return v;
}

std::vector<double> random_f64(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
}

}  // namespace

TEST_SUITE("kernels") {
    TEST_CASE("gemv f32 matches naive reference on both backends") {
        Rng rng(42);
        const int rows = 37, cols = 129;  // deliberately unaligned sizes
        const auto w = random_f32(rng, static_cast<std::size_t>(rows) * cols);
        const auto x = random_f32(rng, cols);
        const auto b = random_f32(rng, rows);
        std::vector<double> naive(rows);
        for (int r = 0; r < rows; ++r) {
            double acc = b[r];
            for (int c = 0; c < cols; ++c) acc += double(w[r * cols + c]) * double(x[c]);
            naive[r] = acc;
        }
        for_each_backend([&](kern::Backend) {
            std::vector<float> y(rows);
            kern::gemv(w.data(), x.data(), b.data(), y.data(), rows, cols);
            for (int r = 0; r < rows; ++r)
                CHECK(double(y[r]) == doctest::Approx(naive[r]).epsilon(1e-4));
        });
    }

    TEST_CASE("scalar and AVX2 agree to reduction round-off") {
        if (!kern::avx2_supported()) return;
        BackendGuard guard;
        Rng rng(7);
        const int rows = 64, cols = 300;
        const auto w = random_f32(rng, static_cast<std::size_t>(rows) * cols);
        const auto x = random_f32(rng, cols);
        const auto g = random_f32(rng, rows);

        std::vector<float> y_s(rows), y_v(rows), t_s(cols), t_v(cols);
        kern::set_backend(kern::Backend::Scalar);
        kern::gemv(w.data(), x.data(), nullptr, y_s.data(), rows, cols);
        kern::gemv_t(w.data(), g.data(), t_s.data(), rows, cols);
        kern::set_backend(kern::Backend::Avx2);
        kern::gemv(w.data(), x.data(), nullptr, y_v.data(), rows, cols);
        kern::gemv_t(w.data(), g.data(), t_v.data(), rows, cols);
        for (int r = 0; r < rows; ++r) CHECK(y_s[r] == doctest::Approx(y_v[r]).epsilon(1e-4));
        for (int c = 0; c < cols; ++c) CHECK(t_s[c] == doctest::Approx(t_v[c]).epsilon(1e-4));

        // f64 lane
        const auto wd = random_f64(rng, 41 * 77);
        const auto xd = random_f64(rng, 77);
        std::vector<double> yd_s(41), yd_v(41);
        kern::set_backend(kern::Backend::Scalar);
        kern::gemv(wd.data(), xd.data(), nullptr, yd_s.data(), 41, 77);
        const double dot_s = kern::dot(wd.data(), wd.data() + 77, 77);
        kern::set_backend(kern::Backend::Avx2);
        kern::gemv(wd.data(), xd.data(), nullptr, yd_v.data(), 41, 77);
        const double dot_v = kern::dot(wd.data(), wd.data() + 77, 77);
        for (int r = 0; r < 41; ++r) CHECK(yd_s[r] == doctest::Approx(yd_v[r]).epsilon(1e-12));
        CHECK(dot_s == doctest::Approx(dot_v).epsilon(1e-12));
    }

    TEST_CASE("ger accumulates a rank-1 update") {
        for_each_backend([&](kern::Backend) {
            Rng rng(3);
            const int rows = 19, cols = 23;
            auto w = random_f32(rng, static_cast<std::size_t>(rows) * cols);
            const auto w0 = w;
            const auto g = random_f32(rng, rows);
            const auto x = random_f32(rng, cols);
            kern::ger(w.data(), g.data(), x.data(), rows, cols);
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c)
                    CHECK(w[r * cols + c] ==
                          doctest::Approx(w0[r * cols + c] + g[r] * x[c]).epsilon(1e-5));
        });
    }

    TEST_CASE("relu forward and backward") {
        for_each_backend([&](kern::Backend) {
            const std::vector<float> x = {-1.0f, 0.0f, 2.5f, -0.1f, 7.0f, -3.0f, 0.5f, 1.0f, -2.0f};
            std::vector<float> y(x.size()), dx(x.size());
            kern::relu(x.data(), y.data(), x.size());
            for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == std::max(0.0f, x[i]));
            std::vector<float> dy(x.size(), 1.0f);
            kern::relu_bwd(y.data(), dy.data(), dx.data(), x.size());
            for (std::size_t i = 0; i < x.size(); ++i) CHECK(dx[i] == (x[i] > 0.0f ? 1.0f : 0.0f));
        });
    }

    TEST_CASE("rotacc equals direct complex accumulation") {
        for_each_backend([&](kern::Backend) {
            const std::size_t n = 201;
            std::vector<double> acc(2 * n, 0.25);
            const std::complex<double> z0 = std::polar(1.0, 0.3);
            const std::complex<double> rot = std::polar(1.0, -0.021);
            kern::rotacc(acc.data(), n, 0.7, z0.real(), z0.imag(), rot.real(), rot.imag());
            std::complex<double> z = z0;
            for (std::size_t k = 0; k < n; ++k) {
                CHECK(acc[2 * k] == doctest::Approx(0.25 + 0.7 * z.real()).epsilon(1e-11));
                CHECK(acc[2 * k + 1] == doctest::Approx(0.25 + 0.7 * z.imag()).epsilon(1e-11));
                z *= rot;
            }
        });
    }

    TEST_CASE("cmag/axpy/scal/sumsq") {
        for_each_backend([&](kern::Backend) {
            Rng rng(11);
            const std::size_t n = 53;
            const auto iq = random_f64(rng, 2 * n);
            std::vector<double> mag(n);
            kern::cmag(iq.data(), mag.data(), n);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(mag[i] == doctest::Approx(std::hypot(iq[2 * i], iq[2 * i + 1])).epsilon(1e-14));

            auto x = random_f64(rng, n);
            auto y = random_f64(rng, n);
            const auto y0 = y;
            kern::axpy(1.5, x.data(), y.data(), n);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(y[i] == doctest::Approx(y0[i] + 1.5 * x[i]).epsilon(1e-14));
            kern::scal(0.5, x.data(), n);

            double ss = 0.0;
            for (std::size_t i = 0; i < n; ++i) ss += x[i] * x[i];
            CHECK(kern::sumsq(x.data(), n) == doctest::Approx(ss).epsilon(1e-12));
        });
    }

    TEST_CASE("adam kernel: first step moves by roughly lr") {
        for_each_backend([&](kern::Backend) {
            const std::size_t n = 10;
            std::vector<float> p(n, 1.0f), m(n, 0.0f), v(n, 0.0f), g(n, 0.5f);
            const float beta1 = 0.9f, beta2 = 0.999f, lr = 0.01f, eps = 1e-8f;
            const float bc1 = 1.0f / (1.0f - beta1);
            const float bc2 = 1.0f / (1.0f - beta2);
            kern::adam_update(p.data(), m.data(), v.data(), g.data(), n, lr, beta1, beta2, eps,
                              bc1, bc2);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(p[i] == doctest::Approx(1.0f - lr).epsilon(1e-4));
        });
    }
}
