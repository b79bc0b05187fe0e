#include "kernels_impl.hpp"

#if defined(NPOS_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

// AVX2/FMA variants. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after a runtime CPU check (see kernels.cpp).
namespace npos::kern::avx2 {

namespace {

inline float hsum256(__m256 v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    lo = _mm_add_ps(lo, hi);
    lo = _mm_add_ps(lo, _mm_movehl_ps(lo, lo));
    lo = _mm_add_ss(lo, _mm_shuffle_ps(lo, lo, 1));
    return _mm_cvtss_f32(lo);
}

inline double hsum256d(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

}  // namespace

void gemv_f32(const float* w, const float* x, const float* bias, float* y, int rows, int cols) {
    int r = 0;
    for (; r + 4 <= rows; r += 4) {
        const float* w0 = w + static_cast<std::size_t>(r) * cols;
        const float* w1 = w0 + cols;
        const float* w2 = w1 + cols;
        const float* w3 = w2 + cols;
        __m256 a0 = _mm256_setzero_ps();
        __m256 a1 = _mm256_setzero_ps();
        __m256 a2 = _mm256_setzero_ps();
        __m256 a3 = _mm256_setzero_ps();
        int c = 0;
        for (; c + 8 <= cols; c += 8) {
            const __m256 xv = _mm256_loadu_ps(x + c);
            a0 = _mm256_fmadd_ps(_mm256_loadu_ps(w0 + c), xv, a0);
            a1 = _mm256_fmadd_ps(_mm256_loadu_ps(w1 + c), xv, a1);
            a2 = _mm256_fmadd_ps(_mm256_loadu_ps(w2 + c), xv, a2);
            a3 = _mm256_fmadd_ps(_mm256_loadu_ps(w3 + c), xv, a3);
        }
        float s0 = hsum256(a0), s1 = hsum256(a1), s2 = hsum256(a2), s3 = hsum256(a3);
        for (; c < cols; ++c) {
            s0 += w0[c] * x[c];
            s1 += w1[c] * x[c];
            s2 += w2[c] * x[c];
            s3 += w3[c] * x[c];
        }
        y[r + 0] = s0 + (bias ? bias[r + 0] : 0.0f);
        y[r + 1] = s1 + (bias ? bias[r + 1] : 0.0f);
        y[r + 2] = s2 + (bias ? bias[r + 2] : 0.0f);
        y[r + 3] = s3 + (bias ? bias[r + 3] : 0.0f);
    }
    for (; r < rows; ++r) {
        const float* row = w + static_cast<std::size_t>(r) * cols;
        __m256 acc = _mm256_setzero_ps();
        int c = 0;
        for (; c + 8 <= cols; c += 8)
            acc = _mm256_fmadd_ps(_mm256_loadu_ps(row + c), _mm256_loadu_ps(x + c), acc);
        float s = hsum256(acc);
        for (; c < cols; ++c) s += row[c] * x[c];
        y[r] = s + (bias ? bias[r] : 0.0f);
    }
}

void gemv_t_f32(const float* w, const float* g, float* y, int rows, int cols) {
    for (int c = 0; c < cols; ++c) y[c] = 0.0f;
    for (int r = 0; r < rows; ++r) {
        const float* row = w + static_cast<std::size_t>(r) * cols;
        const __m256 gv = _mm256_set1_ps(g[r]);
        int c = 0;
        for (; c + 8 <= cols; c += 8) {
            __m256 yv = _mm256_loadu_ps(y + c);
            yv = _mm256_fmadd_ps(gv, _mm256_loadu_ps(row + c), yv);
            _mm256_storeu_ps(y + c, yv);
        }
        const float gr = g[r];
        for (; c < cols; ++c) y[c] += gr * row[c];
    }
}

void ger_f32(float* w, const float* g, const float* x, int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        float* row = w + static_cast<std::size_t>(r) * cols;
        const __m256 gv = _mm256_set1_ps(g[r]);
        int c = 0;
        for (; c + 8 <= cols; c += 8) {
            __m256 wv = _mm256_loadu_ps(row + c);
            wv = _mm256_fmadd_ps(gv, _mm256_loadu_ps(x + c), wv);
            _mm256_storeu_ps(row + c, wv);
        }
        const float gr = g[r];
        for (; c < cols; ++c) row[c] += gr * x[c];
    }
}

void relu_f32(const float* x, float* y, std::size_t n) {
    const __m256 zero = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(y + i, _mm256_max_ps(_mm256_loadu_ps(x + i), zero));
    for (; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

void relu_bwd_f32(const float* act, const float* dy, float* dx, std::size_t n) {
    const __m256 zero = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 mask = _mm256_cmp_ps(_mm256_loadu_ps(act + i), zero, _CMP_GT_OQ);
        _mm256_storeu_ps(dx + i, _mm256_and_ps(_mm256_loadu_ps(dy + i), mask));
    }
    for (; i < n; ++i) dx[i] = act[i] > 0.0f ? dy[i] : 0.0f;
}

void adam_f32(float* p, float* m, float* v, const float* g, std::size_t n, float lr, float beta1,
              float beta2, float eps, float inv_bc1, float inv_bc2) {
    const __m256 b1 = _mm256_set1_ps(beta1);
    const __m256 b2 = _mm256_set1_ps(beta2);
    const __m256 ob1 = _mm256_set1_ps(1.0f - beta1);
    const __m256 ob2 = _mm256_set1_ps(1.0f - beta2);
    const __m256 lrv = _mm256_set1_ps(lr);
    const __m256 epsv = _mm256_set1_ps(eps);
    const __m256 bc1 = _mm256_set1_ps(inv_bc1);
    const __m256 bc2 = _mm256_set1_ps(inv_bc2);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 gv = _mm256_loadu_ps(g + i);
        __m256 mv = _mm256_loadu_ps(m + i);
        __m256 vv = _mm256_loadu_ps(v + i);
        mv = _mm256_fmadd_ps(b1, mv, _mm256_mul_ps(ob1, gv));
        vv = _mm256_fmadd_ps(b2, vv, _mm256_mul_ps(ob2, _mm256_mul_ps(gv, gv)));
        _mm256_storeu_ps(m + i, mv);
        _mm256_storeu_ps(v + i, vv);
        const __m256 mhat = _mm256_mul_ps(mv, bc1);
        const __m256 vhat = _mm256_mul_ps(vv, bc2);
        const __m256 denom = _mm256_add_ps(_mm256_sqrt_ps(vhat), epsv);
        const __m256 upd = _mm256_div_ps(_mm256_mul_ps(lrv, mhat), denom);
        _mm256_storeu_ps(p + i, _mm256_sub_ps(_mm256_loadu_ps(p + i), upd));
    }
    for (; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0f - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0f - beta2) * g[i] * g[i];
        const float mhat = m[i] * inv_bc1;
        const float vhat = v[i] * inv_bc2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

void gemv_f64(const double* w, const double* x, const double* bias, double* y, int rows,
              int cols) {
    int r = 0;
    for (; r + 2 <= rows; r += 2) {
        const double* w0 = w + static_cast<std::size_t>(r) * cols;
        const double* w1 = w0 + cols;
        __m256d a0 = _mm256_setzero_pd();
        __m256d a1 = _mm256_setzero_pd();
        int c = 0;
        for (; c + 4 <= cols; c += 4) {
            const __m256d xv = _mm256_loadu_pd(x + c);
            a0 = _mm256_fmadd_pd(_mm256_loadu_pd(w0 + c), xv, a0);
            a1 = _mm256_fmadd_pd(_mm256_loadu_pd(w1 + c), xv, a1);
        }
        double s0 = hsum256d(a0), s1 = hsum256d(a1);
        for (; c < cols; ++c) {
            s0 += w0[c] * x[c];
            s1 += w1[c] * x[c];
        }
        y[r + 0] = s0 + (bias ? bias[r + 0] : 0.0);
        y[r + 1] = s1 + (bias ? bias[r + 1] : 0.0);
    }
    for (; r < rows; ++r) {
        const double* row = w + static_cast<std::size_t>(r) * cols;
        __m256d acc = _mm256_setzero_pd();
        int c = 0;
        for (; c + 4 <= cols; c += 4)
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(x + c), acc);
        double s = hsum256d(acc);
        for (; c < cols; ++c) s += row[c] * x[c];
        y[r] = s + (bias ? bias[r] : 0.0);
    }
}

void gemv_t_f64(const double* w, const double* g, double* y, int rows, int cols) {
    for (int c = 0; c < cols; ++c) y[c] = 0.0;
    for (int r = 0; r < rows; ++r) {
        const double* row = w + static_cast<std::size_t>(r) * cols;
        const __m256d gv = _mm256_set1_pd(g[r]);
        int c = 0;
        for (; c + 4 <= cols; c += 4) {
            __m256d yv = _mm256_loadu_pd(y + c);
            yv = _mm256_fmadd_pd(gv, _mm256_loadu_pd(row + c), yv);
            _mm256_storeu_pd(y + c, yv);
        }
        const double gr = g[r];
        for (; c < cols; ++c) y[c] += gr * row[c];
    }
}

void ger_f64(double* w, const double* g, const double* x, int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        double* row = w + static_cast<std::size_t>(r) * cols;
        const __m256d gv = _mm256_set1_pd(g[r]);
        int c = 0;
        for (; c + 4 <= cols; c += 4) {
            __m256d wv = _mm256_loadu_pd(row + c);
            wv = _mm256_fmadd_pd(gv, _mm256_loadu_pd(x + c), wv);
            _mm256_storeu_pd(row + c, wv);
        }
        const double gr = g[r];
        for (; c < cols; ++c) row[c] += gr * x[c];
    }
}

void relu_f64(const double* x, double* y, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
    for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_bwd_f64(const double* act, const double* dy, double* dx, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(act + i), zero, _CMP_GT_OQ);
        _mm256_storeu_pd(dx + i, _mm256_and_pd(_mm256_loadu_pd(dy + i), mask));
    }
    for (; i < n; ++i) dx[i] = act[i] > 0.0 ? dy[i] : 0.0;
}

double dot_f64(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    double s = hsum256d(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sumsq_f64(const double* a, std::size_t n) { return dot_f64(a, a, n); }

void axpy_f64(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d av = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d yv = _mm256_loadu_pd(y + i);
        yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv);
        _mm256_storeu_pd(y + i, yv);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scal_f64(double alpha, double* x, std::size_t n) {
    const __m256d av = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

void cmag_f64(const double* iq, double* mag, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        // two registers of interleaved (re,im) -> separate via shuffles
        const __m256d p0 = _mm256_loadu_pd(iq + 2 * i);      // re0 im0 re1 im1
        const __m256d p1 = _mm256_loadu_pd(iq + 2 * i + 4);  // re2 im2 re3 im3
        const __m256d re = _mm256_unpacklo_pd(p0, p1);       // re0 re2 re1 re3
        const __m256d im = _mm256_unpackhi_pd(p0, p1);       // im0 im2 im1 im3
        __m256d sq = _mm256_fmadd_pd(im, im, _mm256_mul_pd(re, re));
        sq = _mm256_sqrt_pd(sq);
        // undo the 0,2,1,3 ordering
        const __m256d out = _mm256_permute4x64_pd(sq, _MM_SHUFFLE(3, 1, 2, 0));
        _mm256_storeu_pd(mag + i, out);
    }
    for (; i < n; ++i) {
        const double re = iq[2 * i];
        const double im = iq[2 * i + 1];
        mag[i] = std::sqrt(re * re + im * im);
    }
}

void rotacc_f64(double* acc, std::size_t n, double gain, double z_re, double z_im, double rot_re,
                double rot_im) {
    if (n < 8) {
        scalar::rotacc_f64(acc, n, gain, z_re, z_im, rot_re, rot_im);
        return;
    }
    // four interleaved phasor streams, each advanced by rot^4
    double zr[4], zi[4];
    zr[0] = z_re;
    zi[0] = z_im;
    for (int j = 1; j < 4; ++j) {
        zr[j] = zr[j - 1] * rot_re - zi[j - 1] * rot_im;
        zi[j] = zr[j - 1] * rot_im + zi[j - 1] * rot_re;
    }
    const double r2_re = rot_re * rot_re - rot_im * rot_im;
    const double r2_im = 2.0 * rot_re * rot_im;
    const double rot4_re = r2_re * r2_re - r2_im * r2_im;
    const double rot4_im = 2.0 * r2_re * r2_im;

    __m256d re = _mm256_setr_pd(zr[0], zr[1], zr[2], zr[3]);
    __m256d im = _mm256_setr_pd(zi[0], zi[1], zi[2], zi[3]);
    const __m256d cr = _mm256_set1_pd(rot4_re);
    const __m256d ci = _mm256_set1_pd(rot4_im);
    const __m256d gv = _mm256_set1_pd(gain);

    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d sre = _mm256_mul_pd(gv, re);
        const __m256d sim = _mm256_mul_pd(gv, im);
        // interleave (re,im) pairs back into the complex layout
        const __m256d lo = _mm256_unpacklo_pd(sre, sim);  // re0 im0 re2 im2
        const __m256d hi = _mm256_unpackhi_pd(sre, sim);  // re1 im1 re3 im3
        const __m256d c01 = _mm256_permute2f128_pd(lo, hi, 0x20);
        const __m256d c23 = _mm256_permute2f128_pd(lo, hi, 0x31);
        __m256d a01 = _mm256_loadu_pd(acc + 2 * k);
        __m256d a23 = _mm256_loadu_pd(acc + 2 * k + 4);
        _mm256_storeu_pd(acc + 2 * k, _mm256_add_pd(a01, c01));
        _mm256_storeu_pd(acc + 2 * k + 4, _mm256_add_pd(a23, c23));
        const __m256d nre = _mm256_fmsub_pd(re, cr, _mm256_mul_pd(im, ci));
        const __m256d nim = _mm256_fmadd_pd(re, ci, _mm256_mul_pd(im, cr));
        re = nre;
        im = nim;
    }
    if (k < n) {
        double tr[4], ti[4];
        _mm256_storeu_pd(tr, re);
        _mm256_storeu_pd(ti, im);
        scalar::rotacc_f64(acc + 2 * k, n - k, gain, tr[0], ti[0], rot_re, rot_im);
    }
}

}  // namespace npos::kern::avx2

#endif  // NPOS_HAVE_AVX2
