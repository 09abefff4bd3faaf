#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

// Low-level array kernels used by the mode-sum evaluators and the
// truncated-Fock integrator.  Every kernel has a scalar reference
// implementation; on x86 an AVX2+FMA variant is selected at runtime.
// Complex arrays use the interleaved (re, im) layout guaranteed by
// std::complex, so the axpy-family kernels can treat them as plain
// double arrays of twice the length.

namespace csl::kern {

using cplx = std::complex<double>;

struct Backend {
    std::string_view name;

    // sum_i |a_i - b_i|^2
    double (*sq_diff_sum)(const cplx* a, const cplx* b, std::size_t n);
    // sum_i w_i |a_i - b_i|^2
    double (*weighted_sq_diff_sum)(const double* w, const cplx* a, const cplx* b, std::size_t n);
    // sum_i Re[(a_i - b_i) * conj(c_i - d_i)]
    double (*re_dot_diff_sum)(const cplx* a, const cplx* b, const cplx* c, const cplx* d,
                              std::size_t n);
    // y += alpha * x
    void (*axpy)(double* y, const double* x, double alpha, std::size_t n);
    // dst = alpha * x + beta * y
    void (*scale_sum2)(double* dst, const double* x, double alpha, const double* y, double beta,
                       std::size_t n);
    // dst += alpha * x + beta * y
    void (*scale_sum2_acc)(double* dst, const double* x, double alpha, const double* y, double beta,
                           std::size_t n);
    // dst += x .* w   (elementwise)
    void (*elem_fma)(double* dst, const double* x, const double* w, std::size_t n);
    // complex entries: dst_j += -i * (base - w_j) * x_j
    void (*imag_scale_fma)(cplx* dst, const cplx* x, double base, const double* w, std::size_t n);
};

const Backend& scalar_backend();
const Backend* avx2_backend();  // nullptr when unsupported by the build or CPU

enum class BackendKind { automatic, scalar, avx2 };

// Selects the backend (automatic = AVX2 when the CPU supports it).
// Returns the backend actually in effect.
const Backend& select_backend(BackendKind kind);
const Backend& active();

inline double sq_diff_sum(const cplx* a, const cplx* b, std::size_t n) {
    return active().sq_diff_sum(a, b, n);
}
inline double weighted_sq_diff_sum(const double* w, const cplx* a, const cplx* b, std::size_t n) {
    return active().weighted_sq_diff_sum(w, a, b, n);
}
inline double re_dot_diff_sum(const cplx* a, const cplx* b, const cplx* c, const cplx* d,
                              std::size_t n) {
    return active().re_dot_diff_sum(a, b, c, d, n);
}
inline void axpy(double* y, const double* x, double alpha, std::size_t n) {
    active().axpy(y, x, alpha, n);
}
inline void scale_sum2(double* dst, const double* x, double alpha, const double* y, double beta,
                       std::size_t n) {
    active().scale_sum2(dst, x, alpha, y, beta, n);
}
inline void scale_sum2_acc(double* dst, const double* x, double alpha, const double* y, double beta,
                           std::size_t n) {
    active().scale_sum2_acc(dst, x, alpha, y, beta, n);
}
inline void elem_fma(double* dst, const double* x, const double* w, std::size_t n) {
    active().elem_fma(dst, x, w, n);
}
inline void imag_scale_fma(cplx* dst, const cplx* x, double base, const double* w, std::size_t n) {
    active().imag_scale_fma(dst, x, base, w, n);
}

}  // namespace csl::kern
