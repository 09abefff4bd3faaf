#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "csl/clump_states.hpp"
#include "csl/units_modes.hpp"

// Density-matrix functionals of the multimode collapse model in the
// field basis (drift-free and driven-at-stroboscopic-times forms) and in
// the clump basis, together with the exponent maximizers and the
// produced-particle factor K.  Gaussian measure prefactors are excluded
// from element values (absorbed in the functional measure); only
// exponents and relative magnitudes are physical outputs.

namespace csl {

// Complex field components f~(k_j) on the mode grid plus matching real
// x-lattice samples.  The lattice has 2*n_modes points spaced
// L/(2*n_modes) starting at -L/2, and the transform pair
//   f(x_i)  = (dk/sqrt(2 pi)) sum_j [f~(k_j) e^{i k_j x_i} + c.c.]
//   f~(k_j) = (dx/sqrt(2 pi)) sum_i f(x_i) e^{-i k_j x_i}
// is unitary on the half-shifted momentum grid, so the discrete Parseval
// identity  sum_i dx f g = 2 sum_j dk Re[f~* g~]  holds exactly.
struct FieldProfile {
    std::vector<double> f_samples;
    std::vector<cplx> f_tilde;
};

std::vector<double> x_lattice(const ModeGrid& grid);
FieldProfile field_profile_from_x(const std::vector<double>& samples, const ModeGrid& grid);
FieldProfile field_profile_from_k(const std::vector<cplx>& f_tilde, const ModeGrid& grid);

// Center profile of one clump in the field basis, f~ = sqrt(2/m) chi~
// (sqrt(2/omega(k)) with the narrow-band approximation off).
FieldProfile clump_center_profile(const ClumpProfile& clump, const ModeGrid& grid,
                                  const ModelParams& params, bool omega_approx_m = true);

// Log-domain carrier for products over thousands of modes.
struct DMElementLog {
    double log_magnitude = 0.0;  // may be -inf, never NaN
    int sign = 1;                // +1 or -1
};

// Drift-free per-mode exponent,
//   -lambda t dk |f~-f~'|^2 - dk w |f~ - c chi_s|^2 - dk w |f~' - c chi_s'|^2
// with c = sqrt(2/m) (or sqrt(2/omega)); <= 0 always.
double h0_mode_exponent(cplx f_k, cplx fp_k, double k, double t, cplx chi_s, cplx chi_sp,
                        const ModelParams& params, bool omega_approx_m = true);

// log of (1/2) sum_{ss'} exp(sum_k h0_mode_exponent), log-sum-exp over
// the four clump-pair terms, modes reduced in ascending k.
DMElementLog h0_field_element_log(const FieldProfile& f, const FieldProfile& fp, double t,
                                  const ClumpPair& pair, const ModeGrid& grid,
                                  const ModelParams& params, bool omega_approx_m = true);

// Arguments maximizing the drift-free exponent at one mode:
//   f~0 = c [lambda t (chi_s + chi_s') + w chi_s]/(2 lambda t + w)
// and the primed twin with s <-> s'.
std::pair<cplx, cplx> h0_maximizer(double k, double t, cplx chi_s, cplx chi_sp,
                                   const ModelParams& params, bool omega_approx_m = true);

// Value of the drift-free exponent at its maximizer, per unit dk:
//   -(2 lambda t w)/(m (2 lambda t + w)) |chi_s - chi_s'|^2
double h0_max_exponent(double k, double t, cplx chi_s, cplx chi_sp, const ModelParams& params,
                       bool omega_approx_m = true);

// t -> infinity limit of the maximized exponent summed over the grid,
// sum_k -dk (w/m) |chi_1 - chi_2|^2; approaches the log clump overlap as
// the mode band narrows relative to m.
double h0_max_limit_log(const ClumpPair& pair, const ModeGrid& grid, const ModelParams& params,
                        bool omega_approx_m = true);

// int dx dx' e^{-a(x-x')^2} e^{-(x-A)^2} e^{-(x-B)^2} e^{-(x'-C)^2} e^{-(x'-D)^2}
//   = pi/(2 sqrt(a+1)) e^{-(A-B)^2/2} e^{-(C-D)^2/2} e^{-a(A+B-C-D)^2/(4(a+1))}
double gaussian_pair_integral(double alpha, double a, double b, double c, double d);

// Per-mode clump-basis element <l_i| rho_ss'_k |l_j>, indices in {1,2}:
//   1/(lt/w+1) exp(-[(lt/w)/(2(1+lt/w))] dk |chi_i+chi_s-chi_j-chi_s'|^2)
//            * exp(-dk|chi_i-chi_s|^2) exp(-dk|chi_j-chi_s'|^2)
double clump_basis_mode_element(int i, int j, int s, int sp, double k, double t,
                                const ClumpPair& pair, const ModelParams& params);

struct ClumpBasisDM {
    double elements[2][2];  // <l_i|rho|l_j>, 0-based storage for i,j in {1,2}
    double k_factor;
};

// Full clump-basis density matrix, exact small-N closed form (the
// e^{-N} terms and the residual clump overlap g are retained, so the
// mode-by-mode product over a fine grid reproduces it at any
// separation); the time dependence enters through sbar = (lt/m)/(lt/m+1)
// and the K factor.
ClumpBasisDM clump_dm(double t, const ClumpPair& pair, const ModeGrid& grid,
                      const ModelParams& params);

// (diagonal, off-diagonal) clump-basis elements with the K factor
// divided out, for ratio work where K underflows.
std::pair<double, double> clump_dm_parts(double t, const ClumpPair& pair,
                                         const ModelParams& params);

// K = exp(-sum_k ln(1 + lambda t/w(k))), the no-created-particle weight;
// decreasing in t and in the cutoff, 1 at t = 0.
double k_factor(double t, const ModeGrid& grid, const ModelParams& params);

struct HModeExponent {
    double log_gauss;      // data exponent
    double log_prefactor;  // ln(2(1-S)/(pi(1+S))), measure-absorbed downstream
};

// Driven per-mode exponent at stroboscopic times, with S = a/(1+a),
// a = lambda t/2w(k):
//   -2Sw dk/(1-S^2) |f~-f~'|^2
//   - dk w (1-S)/(1+S) [|f~ - c((1+a)chi_s - a chi_s')|^2 + (s<->s')]
//   + 2a dk |chi_s - chi_s'|^2          (trace-preserving compensator)
HModeExponent h_mode_exponent(cplx f_k, cplx fp_k, double k, double t, cplx chi_s, cplx chi_sp,
                              const ModelParams& params, bool omega_approx_m = true);

// log of (1/2) sum_{ss'} exp(sum_k h_mode_exponent.log_gauss)
DMElementLog h_field_element_log(const FieldProfile& f, const FieldProfile& fp, double t,
                                 const ClumpPair& pair, const ModeGrid& grid,
                                 const ModelParams& params, bool omega_approx_m = true);

// Large-time per-mode exponent,
//   -(lambda t/2) dk |f~-f~'|^2 + sqrt(2m) dk Re[(f~-f~')(chi_s-chi_s')*]
//   - (dk/lambda t) w^2 (|f~|^2+|f~'|^2) - dk |chi_s-chi_s'|^2
double h_long_time_exponent(cplx f_k, cplx fp_k, double k, double t, cplx chi_s, cplx chi_sp,
                            const ModelParams& params);

// The large-time form needs lambda t >= 2e3 * w(k) on every mode
// carrying weight |f~(k)| > 1e-12 max|f~|.
bool long_time_smoothness_ok(const FieldProfile& f, const ModeGrid& grid, double t,
                             const ModelParams& params);

}  // namespace csl
