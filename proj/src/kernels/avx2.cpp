#include "csl/kernels/dispatch.hpp"

#include <immintrin.h>

// AVX2+FMA variants.  The complex reductions treat the interleaved
// (re, im) data as flat double arrays; per-entry weights are expanded
// to lane pairs with a cross-lane permute.  Tail elements fall back to
// scalar code.

namespace csl::kern {
namespace {

double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double sq_diff_sum_v(const cplx* a, const cplx* b, std::size_t n) {
    const auto* pa = reinterpret_cast<const double*>(a);
    const auto* pb = reinterpret_cast<const double*>(b);
    const std::size_t m = 2 * n;
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double tail = 0.0;
    for (; i < m; ++i) {
        const double d = pa[i] - pb[i];
        tail += d * d;
    }
    return hsum(acc) + tail;
}

double weighted_sq_diff_sum_v(const double* w, const cplx* a, const cplx* b, std::size_t n) {
    const auto* pa = reinterpret_cast<const double*>(a);
    const auto* pb = reinterpret_cast<const double*>(b);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(pa + 2 * i), _mm256_loadu_pd(pb + 2 * i));
        __m256d wp = _mm256_castpd128_pd256(_mm_loadu_pd(w + i));
        __m256d w4 = _mm256_permute4x64_pd(wp, 0x50);  // w0 w0 w1 w1
        acc = _mm256_fmadd_pd(_mm256_mul_pd(d, d), w4, acc);
    }
    double tail = 0.0;
    for (; i < n; ++i) {
        const double dr = pa[2 * i] - pb[2 * i];
        const double di = pa[2 * i + 1] - pb[2 * i + 1];
        tail += w[i] * (dr * dr + di * di);
    }
    return hsum(acc) + tail;
}

double re_dot_diff_sum_v(const cplx* a, const cplx* b, const cplx* c, const cplx* d,
                         std::size_t n) {
    const auto* pa = reinterpret_cast<const double*>(a);
    const auto* pb = reinterpret_cast<const double*>(b);
    const auto* pc = reinterpret_cast<const double*>(c);
    const auto* pd = reinterpret_cast<const double*>(d);
    const std::size_t m = 2 * n;
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        __m256d x = _mm256_sub_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i));
        __m256d y = _mm256_sub_pd(_mm256_loadu_pd(pc + i), _mm256_loadu_pd(pd + i));
        acc = _mm256_fmadd_pd(x, y, acc);
    }
    double tail = 0.0;
    for (; i < m; ++i) tail += (pa[i] - pb[i]) * (pc[i] - pd[i]);
    return hsum(acc) + tail;
}

void axpy_v(double* y, const double* x, double alpha, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_sum2_v(double* dst, const double* x, double alpha, const double* y, double beta,
                  std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    const __m256d vb = _mm256_set1_pd(beta);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(dst + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), t));
    }
    for (; i < n; ++i) dst[i] = alpha * x[i] + beta * y[i];
}

void scale_sum2_acc_v(double* dst, const double* x, double alpha, const double* y, double beta,
                      std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    const __m256d vb = _mm256_set1_pd(beta);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_fmadd_pd(vb, _mm256_loadu_pd(y + i), _mm256_loadu_pd(dst + i));
        _mm256_storeu_pd(dst + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), t));
    }
    for (; i < n; ++i) dst[i] += alpha * x[i] + beta * y[i];
}

void elem_fma_v(double* dst, const double* x, const double* w, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(w + i),
                                    _mm256_loadu_pd(dst + i));
        _mm256_storeu_pd(dst + i, t);
    }
    for (; i < n; ++i) dst[i] += x[i] * w[i];
}

void imag_scale_fma_v(cplx* dst, const cplx* x, double base, const double* w, std::size_t n) {
    auto* pd = reinterpret_cast<double*>(dst);
    const auto* px = reinterpret_cast<const double*>(x);
    const __m256d vbase = _mm256_set1_pd(base);
    const __m256d sign = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);  // + - + - per complex pair
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d wp = _mm256_castpd128_pd256(_mm_loadu_pd(w + i));
        __m256d c = _mm256_sub_pd(vbase, _mm256_permute4x64_pd(wp, 0x50));
        __m256d xv = _mm256_loadu_pd(px + 2 * i);
        __m256d sw = _mm256_permute_pd(xv, 0x5);  // im re im re
        __m256d prod = _mm256_xor_pd(_mm256_mul_pd(c, sw), sign);
        _mm256_storeu_pd(pd + 2 * i, _mm256_add_pd(_mm256_loadu_pd(pd + 2 * i), prod));
    }
    for (; i < n; ++i) {
        const double c = base - w[i];
        pd[2 * i] += c * px[2 * i + 1];
        pd[2 * i + 1] -= c * px[2 * i];
    }
}

}  // namespace

const Backend* avx2_backend() {
    if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) return nullptr;
    static const Backend b{
        "avx2",          sq_diff_sum_v, weighted_sq_diff_sum_v, re_dot_diff_sum_v,
        axpy_v,          scale_sum2_v,  scale_sum2_acc_v,       elem_fma_v,
        imag_scale_fma_v,
    };
    return &b;
}

}  // namespace csl::kern
