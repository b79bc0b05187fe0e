#include <cmath>
#include <cstddef>

#include "kernels_impl.hpp"

// Reference kernels. Plain loops, no intrinsics; these define the semantics
// the SIMD variants are tested against.
namespace npos::kern::scalar {

void gemv_f32(const float* w, const float* x, const float* bias, float* y, int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        const float* row = w + static_cast<std::size_t>(r) * cols;
        float acc = 0.0f;
        for (int c = 0; c < cols; ++c) acc += row[c] * x[c];
        y[r] = acc + (bias ? bias[r] : 0.0f);
    }
}

void gemv_t_f32(const float* w, const float* g, float* y, int rows, int cols) {
    for (int c = 0; c < cols; ++c) y[c] = 0.0f;
    for (int r = 0; r < rows; ++r) {
        const float* row = w + static_cast<std::size_t>(r) * cols;
        const float gr = g[r];
        for (int c = 0; c < cols; ++c) y[c] += gr * row[c];
    }
}

void ger_f32(float* w, const float* g, const float* x, int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        float* row = w + static_cast<std::size_t>(r) * cols;
        const float gr = g[r];
        for (int c = 0; c < cols; ++c) row[c] += gr * x[c];
    }
}

void relu_f32(const float* x, float* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

void relu_bwd_f32(const float* act, const float* dy, float* dx, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dx[i] = act[i] > 0.0f ? dy[i] : 0.0f;
}

void adam_f32(float* p, float* m, float* v, const float* g, std::size_t n, float lr, float beta1,
              float beta2, float eps, float inv_bc1, float inv_bc2) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0f - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0f - beta2) * g[i] * g[i];
        const float mhat = m[i] * inv_bc1;
        const float vhat = v[i] * inv_bc2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

void gemv_f64(const double* w, const double* x, const double* bias, double* y, int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        const double* row = w + static_cast<std::size_t>(r) * cols;
        double acc = 0.0;
        for (int c = 0; c < cols; ++c) acc += row[c] * x[c];
        y[r] = acc + (bias ? bias[r] : 0.0);
    }
}

void gemv_t_f64(const double* w, const double* g, double* y, int rows, int cols) {
    for (int c = 0; c < cols; ++c) y[c] = 0.0;
    for (int r = 0; r < rows; ++r) {
        const double* row = w + static_cast<std::size_t>(r) * cols;
        const double gr = g[r];
        for (int c = 0; c < cols; ++c) y[c] += gr * row[c];
    }
}

void ger_f64(double* w, const double* g, const double* x, int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        double* row = w + static_cast<std::size_t>(r) * cols;
        const double gr = g[r];
        for (int c = 0; c < cols; ++c) row[c] += gr * x[c];
    }
}

void relu_f64(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_bwd_f64(const double* act, const double* dy, double* dx, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dx[i] = act[i] > 0.0 ? dy[i] : 0.0;
}

double dot_f64(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sumsq_f64(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
    return acc;
}

void axpy_f64(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal_f64(double alpha, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void cmag_f64(const double* iq, double* mag, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double re = iq[2 * i];
        const double im = iq[2 * i + 1];
        mag[i] = std::sqrt(re * re + im * im);
    }
}

void rotacc_f64(double* acc, std::size_t n, double gain, double z_re, double z_im, double rot_re,
                double rot_im) {
    for (std::size_t k = 0; k < n; ++k) {
        acc[2 * k] += gain * z_re;
        acc[2 * k + 1] += gain * z_im;
        const double nr = z_re * rot_re - z_im * rot_im;
        const double ni = z_re * rot_im + z_im * rot_re;
        z_re = nr;
        z_im = ni;
    }
}

}  // namespace npos::kern::scalar
