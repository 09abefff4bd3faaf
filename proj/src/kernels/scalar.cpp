#include "csl/kernels/dispatch.hpp"

// Reference implementations.  Plain sequential loops; these define the
// semantics the SIMD variants are tested against.

namespace csl::kern {
namespace {

double sq_diff_sum_s(const cplx* a, const cplx* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dr = a[i].real() - b[i].real();
        const double di = a[i].imag() - b[i].imag();
        acc += dr * dr + di * di;
    }
    return acc;
}

double weighted_sq_diff_sum_s(const double* w, const cplx* a, const cplx* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dr = a[i].real() - b[i].real();
        const double di = a[i].imag() - b[i].imag();
        acc += w[i] * (dr * dr + di * di);
    }
    return acc;
}

double re_dot_diff_sum_s(const cplx* a, const cplx* b, const cplx* c, const cplx* d,
                         std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = a[i].real() - b[i].real();
        const double xi = a[i].imag() - b[i].imag();
        const double yr = c[i].real() - d[i].real();
        const double yi = c[i].imag() - d[i].imag();
        acc += xr * yr + xi * yi;
    }
    return acc;
}

void axpy_s(double* y, const double* x, double alpha, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_sum2_s(double* dst, const double* x, double alpha, const double* y, double beta,
                  std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = alpha * x[i] + beta * y[i];
}

void scale_sum2_acc_s(double* dst, const double* x, double alpha, const double* y, double beta,
                      std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += alpha * x[i] + beta * y[i];
}

void elem_fma_s(double* dst, const double* x, const double* w, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += x[i] * w[i];
}

void imag_scale_fma_s(cplx* dst, const cplx* x, double base, const double* w, std::size_t n) {
    auto* d = reinterpret_cast<double*>(dst);
    const auto* s = reinterpret_cast<const double*>(x);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = base - w[i];
        d[2 * i] += c * s[2 * i + 1];
        d[2 * i + 1] -= c * s[2 * i];
    }
}

}  // namespace

const Backend& scalar_backend() {
    static const Backend b{
        "scalar",        sq_diff_sum_s, weighted_sq_diff_sum_s, re_dot_diff_sum_s,
        axpy_s,          scale_sum2_s,  scale_sum2_acc_s,       elem_fma_s,
        imag_scale_fma_s,
    };
    return b;
}

}  // namespace csl::kern
