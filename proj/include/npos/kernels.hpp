#pragma once

#include <cstddef>

// Data-parallel inner loops used by the MLP, the channel synthesizer and the
// feature pipeline. Every kernel has a scalar reference implementation and,
// on x86-64, an AVX2/FMA variant selected at runtime. The two variants are
// equivalence-tested against each other; SIMD results may differ from scalar
// by reduction-order round-off only.
namespace npos::kern {

enum class Backend { Scalar, Avx2 };

/// Backend chosen at first use: AVX2 when the CPU supports it, otherwise
/// scalar. NPOS_KERNELS=scalar|avx2|auto overrides.
Backend backend();
const char* backend_name();
bool avx2_supported();

/// Force a backend (tests). Throws if AVX2 is requested but unavailable.
void set_backend(Backend b);

// ---- single precision: MLP training path ----

/// y = W*x + bias, W row-major rows x cols.
void gemv(const float* w, const float* x, const float* bias, float* y, int rows, int cols);
/// y = W^T * g  (length cols), W row-major rows x cols.
void gemv_t(const float* w, const float* g, float* y, int rows, int cols);
/// W += g * x^T  (rank-1 update).
void ger(float* w, const float* g, const float* x, int rows, int cols);
void relu(const float* x, float* y, std::size_t n);
/// dx = dy where the stored activation is > 0, else 0.
void relu_bwd(const float* act, const float* dy, float* dx, std::size_t n);
/// Adam update with precomputed bias corrections inv_bc1 = 1/(1-beta1^t),
/// inv_bc2 = 1/(1-beta2^t).
void adam_update(float* p, float* m, float* v, const float* g, std::size_t n, float lr,
                 float beta1, float beta2, float eps, float inv_bc1, float inv_bc2);

// ---- double precision: gradient checks, features, channel ----

void gemv(const double* w, const double* x, const double* bias, double* y, int rows, int cols);
void gemv_t(const double* w, const double* g, double* y, int rows, int cols);
void ger(double* w, const double* g, const double* x, int rows, int cols);
void relu(const double* x, double* y, std::size_t n);
void relu_bwd(const double* act, const double* dy, double* dx, std::size_t n);

double dot(const double* a, const double* b, std::size_t n);
double sumsq(const double* a, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void scal(double a, double* x, std::size_t n);
/// mag[i] = |(iq[2i], iq[2i+1])| for n interleaved complex values.
void cmag(const double* iq, double* mag, std::size_t n);
/// acc[k] += gain * z_k with z_{k+1} = z_k * rot, complex interleaved, n
/// entries starting at z_0 = (z_re, z_im). Callers restart the recurrence
/// with an exactly computed z_0 every few hundred entries to bound drift.
void rotacc(double* acc, std::size_t n, double gain, double z_re, double z_im, double rot_re,
            double rot_im);

}  // namespace npos::kern
