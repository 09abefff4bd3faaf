#pragma once

#include <complex>

// Closed-form solution of the single-mode collapse problem
//   d rho/dt = -i w [a'a, rho] - (lambda/4w) [a'+a, [a'+a, rho]]
// from the Gaussian ansatz
//   rho(t) = C e^{R a'^2} e^{beta1 a'} e^{S a'_L a_R}|0><0| e^{beta2* a} e^{R* a^2},
// with initial displacements gamma1 (ket side) and gamma2 (bra side).
// The initial trace is e^{-(gamma1-gamma2)^2/2} and is conserved.

namespace csl {

using cplx = std::complex<double>;

enum class KernelRegime { exact, approx };

struct KernelCoeffs {
    double s = 0.0;
    cplx r{0.0, 0.0};
    cplx beta1{0.0, 0.0};
    cplx beta2_star{0.0, 0.0};
    // Complex off stroboscopic times: the raw ansatz trace picks up a phase
    // that the normalization has to cancel.
    cplx c{1.0, 0.0};
    double t = 0.0;
    double omega = 1.0;
    double lambda = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    KernelRegime regime = KernelRegime::approx;
    bool stroboscopic = false;
};

// Trace-weighted (unnormalized) expectation values.
struct MomentSet {
    cplx a_mean;
    cplx adag_mean;
    cplx n_mean;
    cplx a2_mean;
    cplx adag2_mean;
};

// Full coefficients including the oscillatory sin(wt) terms.  The
// normalization c is fixed numerically by the trace condition (the
// ansatz trace is evaluated in a truncated number basis).  Throws
// std::domain_error when the coefficient denominator
// (lambda t/2w + 1)^2 - (lambda/2w^2 sin wt)^2 is not positive.
KernelCoeffs coeffs_exact(double t, double omega, double lambda, double gamma1, double gamma2);

// sin(wt)-free approximation: S = a/(1+a) with a = lambda t/2w, R = 0,
// beta1 = (1-S) gamma1 e^{-iwt}, beta2* = (1-S) gamma2 e^{+iwt},
// C = (1-S) e^{S gamma1 gamma2} e^{-(gamma1^2+gamma2^2)/2}.
// With stroboscopic=true the phases e^{+-iwt} are replaced by 1.
KernelCoeffs coeffs_approx(double t, double omega, double lambda, double gamma1, double gamma2,
                           bool stroboscopic = false);

// Position-representation element <X|rho(t)|X'> of the approx-regime
// kernel.  Exponents accumulate in log space; requires coeffs.s < 1.
double x_matrix_element(double x, double xp, const KernelCoeffs& coeffs);

// Same closed form for the momentum-collapse twin problem, with
// (p, p', gamma') in place of (X, X', gamma).
double p_matrix_element(double p, double pp, const KernelCoeffs& coeffs_prime);

// Small-S limit: sqrt(2/pi) e^{-(lambda t/w)(X-X')^2} e^{-(X-g1)^2} e^{-(X'-g2)^2}.
double short_time_element(double x, double xp, double t, double omega, double lambda,
                          double gamma1, double gamma2);

// Large-S limit: sqrt(2w/(pi lambda t)) e^{-(lambda t/2w)(X-X')^2}
//   e^{(X-X')(g1-g2)} e^{-(w/lambda t)(X^2+X'^2)} e^{-(g1-g2)^2/2}.
double long_time_element(double x, double xp, double t, double omega, double lambda,
                         double gamma1, double gamma2);

// Thermal reading of the undisplaced kernel: S = e^{-w/kBT}.
struct ThermalMap {
    double kbt = 0.0;    // temperature in energy units
    double mean_n = 0.0; // S/(1-S)
};
ThermalMap thermal_map(double s, double omega);  // throws unless 0 < s < 1

// Closed form of sum_n S^n psi_n(X) psi_n(X'), the undisplaced kernel
// shape; psi_n are the oscillator eigenfunctions of fock_oracle.
double mehler_kernel(double x, double xp, double s);  // throws unless 0 <= s < 1

// Moments of the evolved state:
//   <a> = g1 Tr rho(0) e^{-iwt},  <a'a> = (lambda t/2w + g1 g2) Tr rho(0),
//   <a^2> = (-(lambda/2w) e^{-iwt} sin(wt)/w + g1^2 e^{-2iwt}) Tr rho(0),
// and conjugate partners.
MomentSet closed_moments(double t, double omega, double lambda, double gamma1, double gamma2);

}  // namespace csl
