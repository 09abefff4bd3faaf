#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "csl/clump_states.hpp"
#include "csl/kernel_solution.hpp"
#include "csl/units_modes.hpp"

// Brute-force verification engine: dense truncated-number-basis
// integration of the single-mode collapse equation, oscillator
// eigenfunctions, coherent overlaps and two-mode field-eigenstate
// residuals.  Everything here is independent of the closed forms it is
// used to check.

namespace csl {

struct TruncatedDM {
    int n_max = 0;
    std::vector<cplx> rho;  // (n_max+1)^2, row-major rho[m*(n_max+1)+n] = <m|rho|n>

    int dim() const { return n_max + 1; }
    cplx at(int m, int n) const { return rho[static_cast<std::size_t>(m) * dim() + n]; }
    cplx trace() const;
    double hermiticity_error() const;  // max |rho - rho^dagger|
    double boundary_norm() const;      // Frobenius norm of last row + column
};

struct TruncationOverflow : std::runtime_error {
    int suggested_n_max;
    TruncationOverflow(const std::string& msg, int hint)
        : std::runtime_error(msg), suggested_n_max(hint) {}
};

// Truncation heuristic: coherent occupancy plus linear production growth
// with a safety factor, ceil((max(g1^2,g2^2) + lambda t/2w)*8 + 20).
int suggest_n_max(double gamma1, double gamma2, double lambda, double omega, double t_final);

// Step-size rule used by the drift and convergence tests.
double suggest_dt(double omega, double lambda);

// rho(0) = e^{-(g1^2+g2^2)/2} e^{g1 a'}|0><0| e^{g2 a}
TruncatedDM coherent_initial_dm(double gamma1, double gamma2, int n_max);

// Classical explicit 4th-order integration of
//   d rho/dt = -i w [a'a, rho] - (lambda/4w) [a'+a, [a'+a, rho]].
// Throws TruncationOverflow when the boundary row/column norm exceeds
// 1e-6 (state no longer fits the truncation).
TruncatedDM integrate_lindblad_x(double gamma1, double gamma2, double lambda, double omega,
                                 double t_final, int n_max, double dt);

// Same integration observed at several ascending times (single pass).
void integrate_lindblad_x_path(double gamma1, double gamma2, double lambda, double omega,
                               const std::vector<double>& times, int n_max, double dt,
                               const std::function<void(double, const TruncatedDM&)>& observe);

// Momentum-collapse twin problem: identical generator in its own ladder
// basis, so the same integrator runs with the primed displacements; the
// resulting matrix is read in the p representation downstream.
TruncatedDM integrate_lindblad_p(double gamma1p, double gamma2p, double lambda, double omega,
                                 double t_final, int n_max, double dt);

// Trace-weighted <a>, <a'>, <a'a>, <a^2>, <a'^2>.
MomentSet moments(const TruncatedDM& dm);

// Oscillator eigenfunctions for a = X + iP/2: psi_0 = (2/pi)^{1/4} e^{-X^2},
// stable three-term recurrence upward.
double position_wavefunction(int n, double x);

// <X|rho|X'> = sum_{nn'} rho_{nn'} psi_n(X) psi_{n'}(X')
cplx dm_position_element(const TruncatedDM& dm, double x, double xp);

// Overlap of two clump states as a product over grid modes of truncated
// coherent-state inner products with displacements sqrt(2 dk) chi~(k)
// (one oscillator pair per mode).
double coherent_overlap_oracle(const ClumpProfile& p1, const ClumpProfile& p2,
                               const ModeGrid& grid, int n_max);

// Truncated two-mode construction of a single-k field eigenstate:
//   |v> = e^{-a'b'} e^{kappa (f~ a' + f~* b')} |0,0>,  kappa = sqrt(2 w dk).
struct TwoModeState {
    int n_max = 0;
    std::vector<cplx> c;  // (n_max+1)^2, c[m*(n_max+1)+n] over |m>_a |n>_b

    int dim() const { return n_max + 1; }
};

TwoModeState field_eigenstate_truncated(cplx f_tilde, double omega, double dk, int n_max);

// rms residual of the eigenvalue relations (a + b')|v> = kappa f~ |v> and
// (a' + b)|v> = kappa f~* |v>, normalized by ||v||.  Throws
// std::overflow_error when the truncated norm overflows.
double eigenstate_residual(cplx f_tilde, double k, const ModelParams& params, double dk,
                           int n_max);

// <v|(a + b')|v> / ||v||^2, which should approach kappa f~.
cplx eigenstate_expectation(cplx f_tilde, double k, const ModelParams& params, double dk,
                            int n_max);

}  // namespace csl
