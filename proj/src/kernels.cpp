#include "npos/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "kernels_impl.hpp"

namespace npos::kern {

namespace {

struct Table {
    void (*gemv_f32)(const float*, const float*, const float*, float*, int, int);
    void (*gemv_t_f32)(const float*, const float*, float*, int, int);
    void (*ger_f32)(float*, const float*, const float*, int, int);
    void (*relu_f32)(const float*, float*, std::size_t);
    void (*relu_bwd_f32)(const float*, const float*, float*, std::size_t);
    void (*adam_f32)(float*, float*, float*, const float*, std::size_t, float, float, float, float,
                     float, float);
    void (*gemv_f64)(const double*, const double*, const double*, double*, int, int);
    void (*gemv_t_f64)(const double*, const double*, double*, int, int);
    void (*ger_f64)(double*, const double*, const double*, int, int);
    void (*relu_f64)(const double*, double*, std::size_t);
    void (*relu_bwd_f64)(const double*, const double*, double*, std::size_t);
    double (*dot_f64)(const double*, const double*, std::size_t);
    double (*sumsq_f64)(const double*, std::size_t);
    void (*axpy_f64)(double, const double*, double*, std::size_t);
    void (*scal_f64)(double, double*, std::size_t);
    void (*cmag_f64)(const double*, double*, std::size_t);
    void (*rotacc_f64)(double*, std::size_t, double, double, double, double, double);
};

constexpr Table kScalarTable = {
    scalar::gemv_f32, scalar::gemv_t_f32, scalar::ger_f32,   scalar::relu_f32,
    scalar::relu_bwd_f32, scalar::adam_f32, scalar::gemv_f64, scalar::gemv_t_f64,
    scalar::ger_f64,  scalar::relu_f64,   scalar::relu_bwd_f64, scalar::dot_f64,
    scalar::sumsq_f64, scalar::axpy_f64,  scalar::scal_f64,  scalar::cmag_f64,
    scalar::rotacc_f64,
};

#if defined(NPOS_HAVE_AVX2)
constexpr Table kAvx2Table = {
    avx2::gemv_f32, avx2::gemv_t_f32, avx2::ger_f32,   avx2::relu_f32,
    avx2::relu_bwd_f32, avx2::adam_f32, avx2::gemv_f64, avx2::gemv_t_f64,
    avx2::ger_f64,  avx2::relu_f64,   avx2::relu_bwd_f64, avx2::dot_f64,
    avx2::sumsq_f64, avx2::axpy_f64,  avx2::scal_f64,  avx2::cmag_f64,
    avx2::rotacc_f64,
};
#endif

Backend g_backend = Backend::Scalar;
const Table* g_table = &kScalarTable;
bool g_initialized = false;

bool cpu_has_avx2() {
#if defined(NPOS_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

void apply(Backend b) {
    g_backend = b;
#if defined(NPOS_HAVE_AVX2)
    g_table = (b == Backend::Avx2) ? &kAvx2Table : &kScalarTable;
#else
    g_table = &kScalarTable;
#endif
}

void init_once() {
    if (g_initialized) return;
    g_initialized = true;
    Backend b = cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
    if (const char* env = std::getenv("NPOS_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) b = Backend::Scalar;
        else if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) b = Backend::Avx2;
        // "auto" or anything else keeps the CPU-detected choice
    }
    apply(b);
}

}  // namespace

Backend backend() {
    init_once();
    return g_backend;
}

const char* backend_name() { return backend() == Backend::Avx2 ? "avx2" : "scalar"; }

bool avx2_supported() { return cpu_has_avx2(); }

void set_backend(Backend b) {
    init_once();
    if (b == Backend::Avx2 && !cpu_has_avx2())
        throw std::runtime_error("AVX2 backend requested but the CPU does not support AVX2/FMA");
    apply(b);
}

void gemv(const float* w, const float* x, const float* bias, float* y, int rows, int cols) {
    init_once();
    g_table->gemv_f32(w, x, bias, y, rows, cols);
}
void gemv_t(const float* w, const float* g, float* y, int rows, int cols) {
    init_once();
    g_table->gemv_t_f32(w, g, y, rows, cols);
}
void ger(float* w, const float* g, const float* x, int rows, int cols) {
    init_once();
    g_table->ger_f32(w, g, x, rows, cols);
}
void relu(const float* x, float* y, std::size_t n) {
    init_once();
    g_table->relu_f32(x, y, n);
}
void relu_bwd(const float* act, const float* dy, float* dx, std::size_t n) {
    init_once();
    g_table->relu_bwd_f32(act, dy, dx, n);
}
void adam_update(float* p, float* m, float* v, const float* g, std::size_t n, float lr,
                 float beta1, float beta2, float eps, float inv_bc1, float inv_bc2) {
    init_once();
    g_table->adam_f32(p, m, v, g, n, lr, beta1, beta2, eps, inv_bc1, inv_bc2);
}

void gemv(const double* w, const double* x, const double* bias, double* y, int rows, int cols) {
    init_once();
    g_table->gemv_f64(w, x, bias, y, rows, cols);
}
void gemv_t(const double* w, const double* g, double* y, int rows, int cols) {
    init_once();
    g_table->gemv_t_f64(w, g, y, rows, cols);
}
void ger(double* w, const double* g, const double* x, int rows, int cols) {
    init_once();
    g_table->ger_f64(w, g, x, rows, cols);
}
void relu(const double* x, double* y, std::size_t n) {
    init_once();
    g_table->relu_f64(x, y, n);
}
void relu_bwd(const double* act, const double* dy, double* dx, std::size_t n) {
    init_once();
    g_table->relu_bwd_f64(act, dy, dx, n);
}

double dot(const double* a, const double* b, std::size_t n) {
    init_once();
    return g_table->dot_f64(a, b, n);
}
double sumsq(const double* a, std::size_t n) {
    init_once();
    return g_table->sumsq_f64(a, n);
}
void axpy(double a, const double* x, double* y, std::size_t n) {
    init_once();
    g_table->axpy_f64(a, x, y, n);
}
void scal(double a, double* x, std::size_t n) {
    init_once();
    g_table->scal_f64(a, x, n);
}
void cmag(const double* iq, double* mag, std::size_t n) {
    init_once();
    g_table->cmag_f64(iq, mag, n);
}
void rotacc(double* acc, std::size_t n, double gain, double z_re, double z_im, double rot_re,
            double rot_im) {
    init_once();
    g_table->rotacc_f64(acc, n, gain, z_re, z_im, rot_re, rot_im);
}

}  // namespace npos::kern
