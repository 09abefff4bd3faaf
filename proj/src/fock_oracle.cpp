#include "csl/fock_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "csl/kernels/dispatch.hpp"

namespace csl {

namespace {

constexpr double kBoundaryTol = 1e-6;

// Right multiplication by a'+a shifts columns; the shifted weights are
// pair-expanded over (re,im) and pre-negated so the commutator is two
// fused accumulations per row.
struct ShiftTables {
    std::vector<double> sq;         // sq[i] = sqrt(i)
    std::vector<double> shift_neg;  // shift_neg[2i+c] = -sqrt(i+1), both column shifts
    std::vector<double> omega_n;    // omega * j, per complex

    ShiftTables(int n_max, double omega) {
        const int d = n_max + 1;
        sq.resize(d + 1);
        for (int i = 0; i <= d; ++i) sq[i] = std::sqrt(static_cast<double>(i));
        shift_neg.resize(2 * n_max);
        for (int j = 1; j <= n_max; ++j)
            shift_neg[2 * (j - 1)] = shift_neg[2 * (j - 1) + 1] = -sq[j];
        omega_n.resize(d);
        for (int j = 0; j < d; ++j) omega_n[j] = omega * j;
    }
};

double* row_ptr(std::vector<cplx>& m, int dim, int i) {
    return reinterpret_cast<double*>(m.data() + static_cast<std::size_t>(i) * dim);
}

const double* row_ptr(const std::vector<cplx>& m, int dim, int i) {
    return reinterpret_cast<const double*>(m.data() + static_cast<std::size_t>(i) * dim);
}

// out = (a'+a) rho - rho (a'+a), all rows overwritten
void commutator_q(const std::vector<cplx>& rho, std::vector<cplx>& out, int n_max,
                  const ShiftTables& tb) {
    const int d = n_max + 1;
    const std::size_t w = 2 * static_cast<std::size_t>(d);
    for (int i = 0; i < d; ++i) {
        double* dst = row_ptr(out, d, i);
        const double* up = row_ptr(rho, d, std::min(i + 1, n_max));
        const double* dn = row_ptr(rho, d, std::max(i - 1, 0));
        const double a = (i < n_max) ? tb.sq[i + 1] : 0.0;
        const double b = (i > 0) ? tb.sq[i] : 0.0;
        kern::scale_sum2(dst, up, a, dn, b, w);
        const double* self = row_ptr(rho, d, i);
        kern::elem_fma(dst + 2, self, tb.shift_neg.data(), 2 * static_cast<std::size_t>(n_max));
        kern::elem_fma(dst, self + 2, tb.shift_neg.data(), 2 * static_cast<std::size_t>(n_max));
    }
}

// out = -i w [a'a, rho] - (lambda/4w) [a'+a, [a'+a, rho]]
void lindblad_rhs(const std::vector<cplx>& rho, std::vector<cplx>& out, std::vector<cplx>& c1,
                  std::vector<cplx>& c2, int n_max, double omega, double lambda,
                  const ShiftTables& tb) {
    const int d = n_max + 1;
    commutator_q(rho, c1, n_max, tb);
    commutator_q(c1, c2, n_max, tb);
    std::fill(out.begin(), out.end(), cplx{0.0, 0.0});
    for (int i = 0; i < d; ++i) {
        kern::imag_scale_fma(out.data() + static_cast<std::size_t>(i) * d,
                             rho.data() + static_cast<std::size_t>(i) * d, omega * i,
                             tb.omega_n.data(), static_cast<std::size_t>(d));
    }
    kern::axpy(reinterpret_cast<double*>(out.data()), reinterpret_cast<const double*>(c2.data()),
               -lambda / (4.0 * omega), 2 * out.size());
}

struct Rk4Workspace {
    std::vector<cplx> k1, k2, k3, k4, ytmp, c1, c2;
    explicit Rk4Workspace(std::size_t sz)
        : k1(sz), k2(sz), k3(sz), k4(sz), ytmp(sz), c1(sz), c2(sz) {}
};

void rk4_step(std::vector<cplx>& y, double h, int n_max, double omega, double lambda,
              const ShiftTables& tb, Rk4Workspace& ws) {
    const std::size_t n2 = 2 * y.size();
    double* yd = reinterpret_cast<double*>(y.data());
    double* td = reinterpret_cast<double*>(ws.ytmp.data());
    lindblad_rhs(y, ws.k1, ws.c1, ws.c2, n_max, omega, lambda, tb);
    kern::scale_sum2(td, reinterpret_cast<const double*>(ws.k1.data()), 0.5 * h, yd, 1.0, n2);
    lindblad_rhs(ws.ytmp, ws.k2, ws.c1, ws.c2, n_max, omega, lambda, tb);
    kern::scale_sum2(td, reinterpret_cast<const double*>(ws.k2.data()), 0.5 * h, yd, 1.0, n2);
    lindblad_rhs(ws.ytmp, ws.k3, ws.c1, ws.c2, n_max, omega, lambda, tb);
    kern::scale_sum2(td, reinterpret_cast<const double*>(ws.k3.data()), h, yd, 1.0, n2);
    lindblad_rhs(ws.ytmp, ws.k4, ws.c1, ws.c2, n_max, omega, lambda, tb);
    kern::scale_sum2_acc(yd, reinterpret_cast<const double*>(ws.k1.data()), h / 6.0,
                         reinterpret_cast<const double*>(ws.k2.data()), h / 3.0, n2);
    kern::scale_sum2_acc(yd, reinterpret_cast<const double*>(ws.k3.data()), h / 3.0,
                         reinterpret_cast<const double*>(ws.k4.data()), h / 6.0, n2);
}

void check_boundary(const std::vector<cplx>& rho, int n_max) {
    const int d = n_max + 1;
    double s = 0.0;
    for (int j = 0; j < d; ++j) {
        s += std::norm(rho[static_cast<std::size_t>(n_max) * d + j]);
        if (j < n_max) s += std::norm(rho[static_cast<std::size_t>(j) * d + n_max]);
    }
    const double tail = std::sqrt(s);
    if (!(tail <= kBoundaryTol)) {
        const int hint = n_max + n_max / 2 + 16;
        throw TruncationOverflow("truncated basis too small: boundary norm " +
                                     std::to_string(tail) + " exceeds " +
                                     std::to_string(kBoundaryTol) + ", retry with n_max >= " +
                                     std::to_string(hint),
                                 hint);
    }
}

void validate_integration_args(double omega, double t_final, int n_max, double dt) {
    if (!(omega > 0.0)) throw std::invalid_argument("integration requires omega > 0");
    if (!(t_final >= 0.0)) throw std::invalid_argument("integration requires t_final >= 0");
    if (n_max < 2) throw std::invalid_argument("integration requires n_max >= 2");
    if (!(dt > 0.0)) throw std::invalid_argument("integration requires dt > 0");
}

void advance(std::vector<cplx>& y, double span, int n_max, double omega, double lambda,
             const ShiftTables& tb, Rk4Workspace& ws, double dt) {
    if (span <= 0.0) return;
    const long steps = std::max<long>(1, static_cast<long>(std::ceil(span / dt)));
    const double h = span / static_cast<double>(steps);
    for (long s = 0; s < steps; ++s) {
        rk4_step(y, h, n_max, omega, lambda, tb, ws);
        if (s % 32 == 31) check_boundary(y, n_max);
    }
}

}  // namespace

cplx TruncatedDM::trace() const {
    cplx t{0.0, 0.0};
    for (int n = 0; n <= n_max; ++n) t += at(n, n);
    return t;
}

double TruncatedDM::hermiticity_error() const {
    double worst = 0.0;
    for (int m = 0; m <= n_max; ++m)
        for (int n = m; n <= n_max; ++n)
            worst = std::max(worst, std::abs(at(m, n) - std::conj(at(n, m))));
    return worst;
}

double TruncatedDM::boundary_norm() const {
    double s = 0.0;
    for (int j = 0; j <= n_max; ++j) {
        s += std::norm(at(n_max, j));
        if (j < n_max) s += std::norm(at(j, n_max));
    }
    return std::sqrt(s);
}

int suggest_n_max(double gamma1, double gamma2, double lambda, double omega, double t_final) {
    const double occ = std::max(gamma1 * gamma1, gamma2 * gamma2) +
                       lambda * t_final / (2.0 * omega);
    return static_cast<int>(std::ceil(occ * 8.0 + 20.0));
}

double suggest_dt(double omega, double lambda) {
    return 1e-3 / std::max({omega, lambda / omega, lambda});
}

TruncatedDM coherent_initial_dm(double gamma1, double gamma2, int n_max) {
    if (n_max < 0) throw std::invalid_argument("coherent_initial_dm requires n_max >= 0");
    TruncatedDM dm;
    dm.n_max = n_max;
    const int d = n_max + 1;
    dm.rho.assign(static_cast<std::size_t>(d) * d, cplx{0.0, 0.0});
    const double norm = std::exp(-0.5 * (gamma1 * gamma1 + gamma2 * gamma2));
    std::vector<double> col1(d), col2(d);
    col1[0] = col2[0] = 1.0;
    for (int n = 1; n < d; ++n) {
        col1[n] = col1[n - 1] * gamma1 / std::sqrt(static_cast<double>(n));
        col2[n] = col2[n - 1] * gamma2 / std::sqrt(static_cast<double>(n));
    }
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n)
            dm.rho[static_cast<std::size_t>(m) * d + n] = norm * col1[m] * col2[n];
    return dm;
}

TruncatedDM integrate_lindblad_x(double gamma1, double gamma2, double lambda, double omega,
                                 double t_final, int n_max, double dt) {
    validate_integration_args(omega, t_final, n_max, dt);
    TruncatedDM dm = coherent_initial_dm(gamma1, gamma2, n_max);
    const ShiftTables tb(n_max, omega);
    Rk4Workspace ws(dm.rho.size());
    advance(dm.rho, t_final, n_max, omega, lambda, tb, ws, dt);
    check_boundary(dm.rho, n_max);
    return dm;
}

void integrate_lindblad_x_path(double gamma1, double gamma2, double lambda, double omega,
                               const std::vector<double>& times, int n_max, double dt,
                               const std::function<void(double, const TruncatedDM&)>& observe) {
    validate_integration_args(omega, times.empty() ? 0.0 : times.back(), n_max, dt);
    TruncatedDM dm = coherent_initial_dm(gamma1, gamma2, n_max);
    const ShiftTables tb(n_max, omega);
    Rk4Workspace ws(dm.rho.size());
    double t = 0.0;
    for (double target : times) {
        if (target < t) throw std::invalid_argument("observation times must ascend");
        advance(dm.rho, target - t, n_max, omega, lambda, tb, ws, dt);
        t = target;
        check_boundary(dm.rho, n_max);
        observe(t, dm);
    }
}

TruncatedDM integrate_lindblad_p(double gamma1p, double gamma2p, double lambda, double omega,
                                 double t_final, int n_max, double dt) {
    return integrate_lindblad_x(gamma1p, gamma2p, lambda, omega, t_final, n_max, dt);
}

MomentSet moments(const TruncatedDM& dm) {
    MomentSet ms;
    const int n_max = dm.n_max;
    for (int n = 0; n <= n_max; ++n) {
        const double r1 = std::sqrt(n + 1.0);
        ms.n_mean += static_cast<double>(n) * dm.at(n, n);
        if (n < n_max) {
            ms.a_mean += r1 * dm.at(n + 1, n);
            ms.adag_mean += r1 * dm.at(n, n + 1);
        }
        if (n + 2 <= n_max) {
            const double r2 = std::sqrt((n + 1.0) * (n + 2.0));
            ms.a2_mean += r2 * dm.at(n + 2, n);
            ms.adag2_mean += r2 * dm.at(n, n + 2);
        }
    }
    return ms;
}

double position_wavefunction(int n, double x) {
    if (n < 0) throw std::invalid_argument("position_wavefunction requires n >= 0");
    const double y = std::sqrt(2.0) * x;
    double prev = 0.0;
    double cur = std::pow(2.0 / M_PI, 0.25) * std::exp(-x * x);
    for (int j = 0; j < n; ++j) {
        const double next =
            y * std::sqrt(2.0 / (j + 1.0)) * cur - std::sqrt(j / (j + 1.0)) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

cplx dm_position_element(const TruncatedDM& dm, double x, double xp) {
    const int d = dm.dim();
    std::vector<double> px(d), pxp(d);
    for (int pass = 0; pass < 2; ++pass) {
        const double xx = pass ? xp : x;
        std::vector<double>& out = pass ? pxp : px;
        const double y = std::sqrt(2.0) * xx;
        out[0] = std::pow(2.0 / M_PI, 0.25) * std::exp(-xx * xx);
        if (d > 1) out[1] = y * std::sqrt(2.0) * out[0];
        for (int j = 1; j + 1 < d; ++j)
            out[j + 1] = y * std::sqrt(2.0 / (j + 1.0)) * out[j] -
                         std::sqrt(j / (j + 1.0)) * out[j - 1];
    }
    cplx acc{0.0, 0.0};
    for (int m = 0; m < d; ++m) {
        cplx rowsum{0.0, 0.0};
        for (int n = 0; n < d; ++n) rowsum += dm.at(m, n) * pxp[n];
        acc += px[m] * rowsum;
    }
    return acc;
}

double coherent_overlap_oracle(const ClumpProfile& p1, const ClumpProfile& p2,
                               const ModeGrid& grid, int n_max) {
    if (n_max < 1) throw std::invalid_argument("coherent_overlap_oracle requires n_max >= 1");
    const double scale = std::sqrt(2.0 * grid.dk);
    double log_total = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const cplx c1 = chi_momentum(grid.k[j], p1);
        const cplx c2 = chi_momentum(grid.k[j], p2);
        // one oscillator per quadrature; purely imaginary displacements
        // reduce to the same real partial sum
        const double pairs[2][2] = {{scale * c1.real(), scale * c2.real()},
                                    {scale * c1.imag(), scale * c2.imag()}};
        for (const auto& ab : pairs) {
            const double prod = ab[0] * ab[1];
            double term = 1.0, sum = 1.0;
            for (int n = 1; n <= n_max; ++n) {
                term *= prod / n;
                sum += term;
            }
            if (!(sum > 0.0))
                throw std::domain_error("coherent_overlap_oracle: truncated sum not positive");
            log_total += -0.5 * (ab[0] * ab[0] + ab[1] * ab[1]) + std::log(sum);
        }
    }
    return std::exp(log_total);
}

TwoModeState field_eigenstate_truncated(cplx f_tilde, double omega, double dk, int n_max) {
    if (n_max < 1) throw std::invalid_argument("field_eigenstate_truncated requires n_max >= 1");
    if (!(omega > 0.0) || !(dk > 0.0))
        throw std::invalid_argument("field_eigenstate_truncated requires omega, dk > 0");
    const int d = n_max + 1;
    const double kappa = std::sqrt(2.0 * omega * dk);
    const cplx za = kappa * f_tilde;
    const cplx zb = kappa * std::conj(f_tilde);
    std::vector<cplx> ga(d), gb(d);
    ga[0] = gb[0] = 1.0;
    for (int n = 1; n < d; ++n) {
        const double r = std::sqrt(static_cast<double>(n));
        ga[n] = ga[n - 1] * za / r;
        gb[n] = gb[n - 1] * zb / r;
    }
    TwoModeState st;
    st.n_max = n_max;
    st.c.assign(static_cast<std::size_t>(d) * d, cplx{0.0, 0.0});
    for (int m = 0; m < d; ++m) {
        for (int n = 0; n < d; ++n) {
            cplx acc{0.0, 0.0};
            double term = 1.0;  // pair-creation expansion weight, alternating
            const int jmax = std::min(m, n);
            for (int j = 0; j <= jmax; ++j) {
                if (j > 0) term *= -std::sqrt((m - j + 1.0) * (n - j + 1.0)) / j;
                acc += term * ga[m - j] * gb[n - j];
            }
            st.c[static_cast<std::size_t>(m) * d + n] = acc;
        }
    }
    return st;
}

namespace {

double state_norm_sq(const TwoModeState& st) {
    double s = 0.0;
    for (const cplx& v : st.c) s += std::norm(v);
    return s;
}

cplx coeff(const TwoModeState& st, int m, int n) {
    if (m < 0 || n < 0 || m > st.n_max || n > st.n_max) return {0.0, 0.0};
    return st.c[static_cast<std::size_t>(m) * st.dim() + n];
}

}  // namespace

double eigenstate_residual(cplx f_tilde, double k, const ModelParams& params, double dk,
                           int n_max) {
    const double omega = dispersion(k, params.m);
    const TwoModeState st = field_eigenstate_truncated(f_tilde, omega, dk, n_max);
    const double nsq = state_norm_sq(st);
    if (!std::isfinite(nsq) || nsq > 1e150)
        throw std::overflow_error("eigenstate_residual: truncated norm overflow, reduce n_max");
    const double kappa = std::sqrt(2.0 * omega * dk);
    const cplx ev_c = kappa * f_tilde;
    const cplx ev_d = kappa * std::conj(f_tilde);
    double r1 = 0.0, r2 = 0.0;
    for (int m = 0; m <= n_max; ++m) {
        for (int n = 0; n <= n_max; ++n) {
            const cplx v = coeff(st, m, n);
            const cplx cv = std::sqrt(m + 1.0) * coeff(st, m + 1, n) +
                            std::sqrt(static_cast<double>(n)) * coeff(st, m, n - 1);
            const cplx dv = std::sqrt(static_cast<double>(m)) * coeff(st, m - 1, n) +
                            std::sqrt(n + 1.0) * coeff(st, m, n + 1);
            r1 += std::norm(cv - ev_c * v);
            r2 += std::norm(dv - ev_d * v);
        }
    }
    return std::sqrt((r1 + r2) / 2.0) / std::sqrt(nsq);
}

cplx eigenstate_expectation(cplx f_tilde, double k, const ModelParams& params, double dk,
                            int n_max) {
    const double omega = dispersion(k, params.m);
    const TwoModeState st = field_eigenstate_truncated(f_tilde, omega, dk, n_max);
    const double nsq = state_norm_sq(st);
    if (!std::isfinite(nsq) || nsq > 1e150)
        throw std::overflow_error("eigenstate_expectation: truncated norm overflow");
    cplx acc{0.0, 0.0};
    for (int m = 0; m <= n_max; ++m) {
        for (int n = 0; n <= n_max; ++n) {
            const cplx cv = std::sqrt(m + 1.0) * coeff(st, m + 1, n) +
                            std::sqrt(static_cast<double>(n)) * coeff(st, m, n - 1);
            acc += std::conj(coeff(st, m, n)) * cv;
        }
    }
    return acc / nsq;
}

}  // namespace csl
