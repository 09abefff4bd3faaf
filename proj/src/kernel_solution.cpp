#include "csl/kernel_solution.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace csl {
namespace {

constexpr double pi = std::numbers::pi;

// Trace of e^{R a'^2} e^{b1 a'} (sum_n S^n |n><n|) e^{b2s a} e^{R* a^2}
// in a number basis truncated at n_max.  Writing U = e^{R a'^2} e^{b1 a'}
// and using that ladder matrix elements are real, the trace becomes
// sum_n S^n sum_m U_{mn} W_{mn} with W = e^{R* a'^2} e^{b2s a'}.
cplx ansatz_trace_truncated(double s, cplx r, cplx b1, cplx b2s, int n_max) {
    const int n = n_max + 1;
    auto raising_product = [n](cplx rr, cplx bb) {
        // columnwise E2 E1 with E1 = e^{bb a'}, E2 = e^{rr a'^2}
        std::vector<cplx> e1(static_cast<std::size_t>(n) * n, cplx{0.0, 0.0});
        for (int col = 0; col < n; ++col) {
            e1[static_cast<std::size_t>(col) * n + col] = 1.0;
            for (int row = col + 1; row < n; ++row) {
                e1[static_cast<std::size_t>(col) * n + row] =
                    e1[static_cast<std::size_t>(col) * n + row - 1] * bb * std::sqrt(double(row)) /
                    double(row - col);
            }
        }
        std::vector<cplx> out(static_cast<std::size_t>(n) * n, cplx{0.0, 0.0});
        // E2_{m,p} nonzero for m-p = 2j: apply by j-recurrence per column
        for (int col = 0; col < n; ++col) {
            for (int p = col; p < n; ++p) {
                cplx coeff{1.0, 0.0};  // j = 0
                out[static_cast<std::size_t>(col) * n + p] +=
                    coeff * e1[static_cast<std::size_t>(col) * n + p];
                for (int j = 1; p + 2 * j < n; ++j) {
                    const int m = p + 2 * j;
                    coeff *= rr * std::sqrt(double(m) * double(m - 1)) / double(j);
                    out[static_cast<std::size_t>(col) * n + m] +=
                        coeff * e1[static_cast<std::size_t>(col) * n + p];
                }
            }
        }
        return out;
    };
    const auto u = raising_product(r, b1);
    const auto w = raising_product(std::conj(r), b2s);
    cplx trace{0.0, 0.0};
    double sn = 1.0;
    for (int col = 0; col < n; ++col) {
        cplx dot{0.0, 0.0};
        for (int row = col; row < n; ++row)
            dot += u[static_cast<std::size_t>(col) * n + row] *
                   w[static_cast<std::size_t>(col) * n + row];
        trace += sn * dot;
        sn *= s;
        if (sn == 0.0 && col > 0) break;
    }
    return trace;
}

cplx trace_enforced_c(double s, cplx r, cplx b1, cplx b2s, double gamma1, double gamma2) {
    const double target = std::exp(-0.5 * (gamma1 - gamma2) * (gamma1 - gamma2));
    cplx prev{0.0, 0.0};
    for (int n_max = 48; n_max <= 1536; n_max *= 2) {
        const cplx tr = ansatz_trace_truncated(s, r, b1, b2s, n_max);
        if (n_max > 48 && std::abs(tr - prev) <= 1e-13 * std::abs(tr)) {
            return target / tr;
        }
        prev = tr;
    }
    return target / prev;
}

}  // namespace

KernelCoeffs coeffs_exact(double t, double omega, double lambda, double gamma1, double gamma2) {
    if (!(t >= 0.0)) throw std::invalid_argument("coeffs_exact: t must be >= 0");
    if (!(omega > 0.0)) throw std::invalid_argument("coeffs_exact: omega must be > 0");
    const double u = lambda * t / (2.0 * omega) + 1.0;
    const double v = lambda / (2.0 * omega * omega) * std::sin(omega * t);
    const double denom = u * u - v * v;
    if (!(denom > 0.0))
        throw std::domain_error("coeffs_exact: coefficient denominator not positive (lambda/omega^2 too large at small t)");
    KernelCoeffs c;
    c.t = t;
    c.omega = omega;
    c.lambda = lambda;
    c.gamma1 = gamma1;
    c.gamma2 = gamma2;
    c.regime = KernelRegime::exact;
    c.s = 1.0 - u / denom;
    const cplx phase = std::polar(1.0, -omega * t);
    c.r = -(lambda / (4.0 * omega * omega)) * std::sin(omega * t) * phase / denom;
    c.beta1 = (u * gamma1 * phase + v * gamma2) / denom;
    c.beta2_star = (u * gamma2 * std::conj(phase) + v * gamma1) / denom;
    c.c = trace_enforced_c(c.s, c.r, c.beta1, c.beta2_star, gamma1, gamma2);
    return c;
}

KernelCoeffs coeffs_approx(double t, double omega, double lambda, double gamma1, double gamma2,
                           bool stroboscopic) {
    if (!(t >= 0.0)) throw std::invalid_argument("coeffs_approx: t must be >= 0");
    if (!(omega > 0.0)) throw std::invalid_argument("coeffs_approx: omega must be > 0");
    const double alpha = lambda * t / (2.0 * omega);
    const double one_minus_s = 1.0 / (alpha + 1.0);  // no cancellation near S -> 1
    KernelCoeffs c;
    c.t = t;
    c.omega = omega;
    c.lambda = lambda;
    c.gamma1 = gamma1;
    c.gamma2 = gamma2;
    c.regime = KernelRegime::approx;
    c.stroboscopic = stroboscopic;
    c.s = alpha / (alpha + 1.0);
    c.r = 0.0;
    const cplx phase = stroboscopic ? cplx{1.0, 0.0} : std::polar(1.0, -omega * t);
    c.beta1 = one_minus_s * gamma1 * phase;
    c.beta2_star = one_minus_s * gamma2 * std::conj(phase);
    c.c = one_minus_s * std::exp(c.s * gamma1 * gamma2 - 0.5 * (gamma1 * gamma1 + gamma2 * gamma2));
    return c;
}

double x_matrix_element(double x, double xp, const KernelCoeffs& coeffs) {
    const double s = coeffs.s;
    if (!(s < 1.0)) throw std::domain_error("x_matrix_element: requires S < 1");
    const double g1 = coeffs.gamma1;
    const double g2 = coeffs.gamma2;
    const double one_minus_s = 1.0 - s;
    const double dx = x - xp;
    const double ca = x - (g1 - s * g2) / one_minus_s;
    const double cb = xp - (g2 - s * g1) / one_minus_s;
    const double dg = g1 - g2;
    double log_val = 0.5 * std::log(2.0 * one_minus_s / (pi * (1.0 + s)));
    log_val += -2.0 * s * dx * dx / (1.0 - s * s);
    log_val += -(one_minus_s / (1.0 + s)) * (ca * ca + cb * cb);
    log_val += s * dg * dg / one_minus_s;
    return std::exp(log_val);
}

double p_matrix_element(double p, double pp, const KernelCoeffs& coeffs_prime) {
    return x_matrix_element(p, pp, coeffs_prime);
}

double short_time_element(double x, double xp, double t, double omega, double lambda,
                          double gamma1, double gamma2) {
    const double dx = x - xp;
    const double log_val = 0.5 * std::log(2.0 / pi) - (lambda * t / omega) * dx * dx -
                           (x - gamma1) * (x - gamma1) - (xp - gamma2) * (xp - gamma2);
    return std::exp(log_val);
}

double long_time_element(double x, double xp, double t, double omega, double lambda,
                         double gamma1, double gamma2) {
    if (!(lambda * t > 0.0)) throw std::domain_error("long_time_element: requires lambda*t > 0");
    const double dx = x - xp;
    const double dg = gamma1 - gamma2;
    const double log_val = 0.5 * std::log(2.0 * omega / (pi * lambda * t)) -
                           (lambda * t / (2.0 * omega)) * dx * dx + dx * dg -
                           (omega / (lambda * t)) * (x * x + xp * xp) - 0.5 * dg * dg;
    return std::exp(log_val);
}

ThermalMap thermal_map(double s, double omega) {
    if (!(s > 0.0 && s < 1.0)) throw std::domain_error("thermal_map: requires 0 < S < 1");
    ThermalMap tm;
    tm.kbt = omega / std::log(1.0 / s);
    tm.mean_n = s / (1.0 - s);
    return tm;
}

double mehler_kernel(double x, double xp, double s) {
    if (!(s >= 0.0 && s < 1.0)) throw std::domain_error("mehler_kernel: requires 0 <= S < 1");
    const double sum = x + xp;
    const double diff = x - xp;
    const double log_val = 0.5 * std::log(2.0 / (pi * (1.0 - s * s))) -
                           (1.0 - s) / (2.0 * (1.0 + s)) * sum * sum -
                           (1.0 + s) / (2.0 * (1.0 - s)) * diff * diff;
    return std::exp(log_val);
}

MomentSet closed_moments(double t, double omega, double lambda, double gamma1, double gamma2) {
    const double trace0 = std::exp(-0.5 * (gamma1 - gamma2) * (gamma1 - gamma2));
    const cplx em = std::polar(1.0, -omega * t);   // e^{-iwt}
    const cplx ep = std::conj(em);
    const double sinc = std::sin(omega * t) / omega;
    MomentSet ms;
    ms.a_mean = gamma1 * trace0 * em;
    ms.adag_mean = gamma2 * trace0 * ep;
    ms.n_mean = (lambda * t / (2.0 * omega) + gamma1 * gamma2) * trace0;
    ms.a2_mean = (-(lambda / (2.0 * omega)) * em * sinc + gamma1 * gamma1 * em * em) * trace0;
    ms.adag2_mean = (-(lambda / (2.0 * omega)) * ep * sinc + gamma2 * gamma2 * ep * ep) * trace0;
    return ms;
}

}  // namespace csl
