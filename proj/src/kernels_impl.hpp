#pragma once

#include <cstddef>

// Internal declarations shared by the kernel backends and the dispatcher.
namespace npos::kern {

namespace scalar {
void gemv_f32(const float* w, const float* x, const float* bias, float* y, int rows, int cols);
void gemv_t_f32(const float* w, const float* g, float* y, int rows, int cols);
void ger_f32(float* w, const float* g, const float* x, int rows, int cols);
void relu_f32(const float* x, float* y, std::size_t n);
void relu_bwd_f32(const float* act, const float* dy, float* dx, std::size_t n);
void adam_f32(float* p, float* m, float* v, const float* g, std::size_t n, float lr, float beta1,
              float beta2, float eps, float inv_bc1, float inv_bc2);
void gemv_f64(const double* w, const double* x, const double* bias, double* y, int rows, int cols);
void gemv_t_f64(const double* w, const double* g, double* y, int rows, int cols);
void ger_f64(double* w, const double* g, const double* x, int rows, int cols);
void relu_f64(const double* x, double* y, std::size_t n);
void relu_bwd_f64(const double* act, const double* dy, double* dx, std::size_t n);
double dot_f64(const double* a, const double* b, std::size_t n);
double sumsq_f64(const double* a, std::size_t n);
void axpy_f64(double alpha, const double* x, double* y, std::size_t n);
void scal_f64(double alpha, double* x, std::size_t n);
void cmag_f64(const double* iq, double* mag, std::size_t n);
void rotacc_f64(double* acc, std::size_t n, double gain, double z_re, double z_im, double rot_re,
                double rot_im);
}  // namespace scalar

#if defined(NPOS_HAVE_AVX2)
namespace avx2 {
void gemv_f32(const float* w, const float* x, const float* bias, float* y, int rows, int cols);
void gemv_t_f32(const float* w, const float* g, float* y, int rows, int cols);
void ger_f32(float* w, const float* g, const float* x, int rows, int cols);
void relu_f32(const float* x, float* y, std::size_t n);
void relu_bwd_f32(const float* act, const float* dy, float* dx, std::size_t n);
void adam_f32(float* p, float* m, float* v, const float* g, std::size_t n, float lr, float beta1,
              float beta2, float eps, float inv_bc1, float inv_bc2);
void gemv_f64(const double* w, const double* x, const double* bias, double* y, int rows, int cols);
void gemv_t_f64(const double* w, const double* g, double* y, int rows, int cols);
void ger_f64(double* w, const double* g, const double* x, int rows, int cols);
void relu_f64(const double* x, double* y, std::size_t n);
void relu_bwd_f64(const double* act, const double* dy, double* dx, std::size_t n);
double dot_f64(const double* a, const double* b, std::size_t n);
double sumsq_f64(const double* a, std::size_t n);
void axpy_f64(double alpha, const double* x, double* y, std::size_t n);
void scal_f64(double alpha, double* x, std::size_t n);
void cmag_f64(const double* iq, double* mag, std::size_t n);
void rotacc_f64(double* acc, std::size_t n, double gain, double z_re, double z_im, double rot_re,
                double rot_im);
}  // namespace avx2
#endif

}  // namespace npos::kern
