#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "csl/fock_oracle.hpp"
#include "csl/kernel_solution.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;
using csl::cplx;

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

Eigen::MatrixXcd to_eigen(const csl::TruncatedDM& dm) {
    Eigen::MatrixXcd m(dm.dim(), dm.dim());
    for (int r = 0; r < dm.dim(); ++r)
        for (int c = 0; c < dm.dim(); ++c) m(r, c) = dm.at(r, c);
    return m;
}

}  // namespace

TEST_SUITE("fock_oracle") {

TEST_CASE("step and truncation heuristics") {
    CHECK(csl::suggest_n_max(0.0, 0.0, 0.0, 1.0, 0.0) == 20);
    CHECK(csl::suggest_n_max(2.0, 1.0, 1.0, 1.0, 4.0) ==
          static_cast<int>(std::ceil((4.0 + 2.0) * 8.0 + 20.0)));
    CHECK(csl::suggest_dt(2.0, 0.5) == doctest::Approx(1e-3 / 2.0));
    CHECK(csl::suggest_dt(1.0, 3.0) == doctest::Approx(1e-3 / 3.0));
    CHECK(csl::suggest_dt(0.5, 1.0) == doctest::Approx(1e-3 / 2.0));  // lambda/omega wins
}

TEST_CASE("coherent initial state") {
    const double g1 = 0.6, g2 = 0.3;
    const auto dm = csl::coherent_initial_dm(g1, g2, 16);
    const double norm = std::exp(-0.5 * (g1 * g1 + g2 * g2));
    for (int m : {0, 1, 3})
        for (int n : {0, 2, 4}) {
            const double want = norm * std::pow(g1, m) * std::pow(g2, n) /
                                std::sqrt(factorial(m) * factorial(n));
            CHECK(dm.at(m, n).real() == doctest::Approx(want).epsilon(1e-12));
            CHECK(dm.at(m, n).imag() == doctest::Approx(0.0));
        }
    CHECK(dm.trace().real() ==
          doctest::Approx(std::exp(-0.5 * (g1 - g2) * (g1 - g2))).epsilon(1e-12));
    CHECK(dm.boundary_norm() < 1e-9);
}

TEST_CASE("free evolution only rotates number-basis phases") {
    const double omega = 1.0, t = 1.3;
    const auto rho0 = csl::coherent_initial_dm(0.6, 0.3, 20);
    const auto rho = csl::integrate_lindblad_x(0.6, 0.3, 0.0, omega, t, 20, 5e-4);
    for (int m = 0; m <= 16; ++m)
        for (int n = 0; n <= 16; ++n) {
            const cplx want = rho0.at(m, n) * std::polar(1.0, -omega * (m - n) * t);
            CHECK(std::abs(rho.at(m, n) - want) < 1e-10);
        }
}

TEST_CASE("integrated moments match the closed forms") {
    const double omega = 1.0, lambda = 1.0, t = 3.0, g1 = 0.7, g2 = 0.2;
    const int n_max = csl::suggest_n_max(g1, g2, lambda, omega, t) + 10;
    const auto rho = csl::integrate_lindblad_x(g1, g2, lambda, omega, t, n_max,
                                               0.5 * csl::suggest_dt(omega, lambda));
    const auto got = csl::moments(rho);
    const auto want = csl::closed_moments(t, omega, lambda, g1, g2);
    CHECK(std::abs(got.a_mean - want.a_mean) < 1e-6);
    CHECK(std::abs(got.adag_mean - want.adag_mean) < 1e-6);
    CHECK(std::abs(got.n_mean - want.n_mean) < 1e-6);
    CHECK(std::abs(got.a2_mean - want.a2_mean) < 1e-6);
    CHECK(std::abs(got.adag2_mean - want.adag2_mean) < 1e-6);
}

TEST_CASE("undisplaced heating: mean occupation is t/2 at unit rate and frequency") {
    const double t = 2.0;
    const auto rho = csl::integrate_lindblad_x(0.0, 0.0, 1.0, 1.0, t, 40, 1e-3);
    const auto ms = csl::moments(rho);
    CHECK(ms.n_mean.real() == doctest::Approx(t / 2.0).epsilon(1e-7));
    CHECK(std::abs(ms.a_mean) < 1e-9);
}

TEST_CASE("conservation and structure of the integrated state") {
    const double omega = 1.0, lambda = 1.0, t = 5.0, g = 0.5;
    const int n_max = csl::suggest_n_max(g, g, lambda, omega, t) + 12;
    const double dt = csl::suggest_dt(omega, lambda);
    const auto rho = csl::integrate_lindblad_x(g, g, lambda, omega, t, n_max, dt);
    // trace drift per unit time, hermiticity, positivity
    CHECK(std::abs(rho.trace().real() - 1.0) / t < 1e-9);
    CHECK(std::abs(rho.trace().imag()) < 1e-12);
    CHECK(rho.hermiticity_error() < 1e-12);
    Eigen::MatrixXcd m = to_eigen(rho);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()));
    CHECK(es.eigenvalues().minCoeff() > -1e-8);
}

TEST_CASE("integrator converges at fourth order") {
    // step sizes kept inside the RK4 stability region for this basis size
    const double omega = 1.0, lambda = 1.0, t = 1.0, g1 = 0.4, g2 = 0.1;
    const int n_max = 30;
    auto frob_diff = [&](const csl::TruncatedDM& a, const csl::TruncatedDM& b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.rho.size(); ++i) acc += std::norm(a.rho[i] - b.rho[i]);
        return std::sqrt(acc);
    };
    const auto ref = csl::integrate_lindblad_x(g1, g2, lambda, omega, t, n_max, 2.5e-4);
    const double e1 = frob_diff(csl::integrate_lindblad_x(g1, g2, lambda, omega, t, n_max, 0.01),
                                ref);
    const double e2 = frob_diff(csl::integrate_lindblad_x(g1, g2, lambda, omega, t, n_max, 0.005),
                                ref);
    const double order = std::log2(e1 / e2);
    CHECK(order > 3.8);
    CHECK(order < 4.5);
}

TEST_CASE("truncation overflow carries a usable hint") {
    // hints grow geometrically; retrying with each hint must terminate
    int n = 5, prev = 0;
    for (int attempt = 0; attempt < 5; ++attempt) {
        try {
            const auto rho = csl::integrate_lindblad_x(2.5, 2.5, 1.0, 1.0, 4.0, n, 1e-3);
            CHECK(attempt > 0);  // n = 5 is far too small and must throw
            CHECK(rho.trace().real() == doctest::Approx(1.0).epsilon(1e-6));
            return;
        } catch (const csl::TruncationOverflow& e) {
            CHECK(e.suggested_n_max > n);
            CHECK(e.suggested_n_max > prev);
            prev = n;
            n = e.suggested_n_max;
        }
    }
    FAIL("hints never reached a workable basis size");
}

TEST_CASE("pathwise observation matches single shots") {
    const double omega = 1.0, lambda = 1.0, g1 = 0.5, g2 = 0.1;
    const std::vector<double> times{0.7, 1.9};
    std::vector<csl::TruncatedDM> seen;
    csl::integrate_lindblad_x_path(g1, g2, lambda, omega, times, 30, 1e-3,
                                   [&](double, const csl::TruncatedDM& dm) { seen.push_back(dm); });
    REQUIRE(seen.size() == times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto single =
            csl::integrate_lindblad_x(g1, g2, lambda, omega, times[i], 30, 1e-3);
        double worst = 0.0;
        for (std::size_t j = 0; j < single.rho.size(); ++j)
            worst = std::max(worst, std::abs(single.rho[j] - seen[i].rho[j]));
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("momentum twin runs the same generator") {
    const auto x = csl::integrate_lindblad_x(0.3, -0.2, 0.8, 1.2, 1.5, 24, 1e-3);
    const auto p = csl::integrate_lindblad_p(0.3, -0.2, 0.8, 1.2, 1.5, 24, 1e-3);
    for (std::size_t i = 0; i < x.rho.size(); ++i) CHECK(std::abs(x.rho[i] - p.rho[i]) < 1e-14);
}

TEST_CASE("oscillator eigenfunctions") {
    CHECK(csl::position_wavefunction(0, 0.0) == doctest::Approx(std::pow(2.0 / kPi, 0.25)));
    CHECK(csl::position_wavefunction(1, 0.0) == doctest::Approx(0.0));
    // orthonormality up to n = 20 on a fine trapezoid grid
    const double h = 0.002, lo = -9.0;
    const int samples = 9001;
    std::vector<std::vector<double>> psi(21, std::vector<double>(samples));
    for (int i = 0; i < samples; ++i) {
        const double x = lo + h * i;
        for (int n = 0; n <= 20; ++n) psi[n][i] = csl::position_wavefunction(n, x);
    }
    for (int m = 0; m <= 20; ++m)
        for (int n = m; n <= 20; ++n) {
            double acc = 0.0;
            for (int i = 0; i < samples; ++i) acc += psi[m][i] * psi[n][i];
            acc *= h;
            CHECK(std::abs(acc - (m == n ? 1.0 : 0.0)) < 1e-8);
        }
}

TEST_CASE("weighted eigenfunction sums reach the closed kernel shape") {
    const double s = 0.5, x = 0.3, xp = -0.2;
    auto partial = [&](int n_terms) {
        double acc = 0.0;
        double sn = 1.0;
        for (int n = 0; n <= n_terms; ++n) {
            acc += sn * csl::position_wavefunction(n, x) * csl::position_wavefunction(n, xp);
            sn *= s;
        }
        return acc;
    };
    const double closed = csl::mehler_kernel(x, xp, s);
    const double e20 = std::abs(partial(20) - closed);
    const double e40 = std::abs(partial(40) - closed);
    const double e80 = std::abs(partial(80) - closed);
    CHECK(e40 < e20);
    CHECK(e80 < e40);
    CHECK(e80 < 1e-8);
}

TEST_CASE("position elements of simple states") {
    const auto vac = csl::coherent_initial_dm(0.0, 0.0, 10);
    const double psi0_03 = csl::position_wavefunction(0, 0.3);
    const double psi0_m1 = csl::position_wavefunction(0, -1.0);
    const cplx got = csl::dm_position_element(vac, 0.3, -1.0);
    CHECK(got.real() == doctest::Approx(psi0_03 * psi0_m1).epsilon(1e-12));
    CHECK(std::abs(got.imag()) < 1e-14);

    // diagonal integrates back to the trace
    const auto rho = csl::integrate_lindblad_x(0.5, 0.5, 1.0, 1.0, 2.0, 40, 1e-3);
    double acc = 0.0;
    const double h = 0.005;
    for (int i = 0; i <= 3600; ++i) {
        const double x = -9.0 + h * i;
        acc += csl::dm_position_element(rho, x, x).real();
    }
    acc *= h;
    CHECK(acc == doctest::Approx(rho.trace().real()).epsilon(1e-8));
}

TEST_CASE("closed position kernel against the integrated state") {
    // one stroboscopic period: the oscillatory terms vanish and the
    // sin-free closed form must match the brute-force state pointwise
    const double omega = 1.0, lambda = 1.0, g1 = 0.5, g2 = 0.1;
    const double t = 2.0 * kPi;
    const int n_max = 70;
    const auto rho = csl::integrate_lindblad_x(g1, g2, lambda, omega, t, n_max, 1e-3);
    const auto coeffs = csl::coeffs_approx(t, omega, lambda, g1, g2, true);
    double sup = 0.0;
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) {
            const double x = -2.0 + 0.5 * i;
            const double xp = -2.0 + 0.5 * j;
            const cplx oracle = csl::dm_position_element(rho, x, xp);
            CHECK(std::abs(oracle.imag()) < 1e-9);
            sup = std::max(sup, std::abs(oracle.real() - csl::x_matrix_element(x, xp, coeffs)));
        }
    CHECK(sup < 1e-5);
}

TEST_CASE("undisplaced stroboscopic state freezes at the expected diagonal") {
    // lambda = 1/pi over one period gives S = 1/2 exactly
    const auto rho = csl::integrate_lindblad_x(0.0, 0.0, 1.0 / kPi, 1.0, 2.0 * kPi, 40, 1e-3);
    CHECK(csl::dm_position_element(rho, 0.0, 0.0).real() ==
          doctest::Approx(0.4606588).epsilon(1e-6));
}

TEST_CASE("clump overlap oracle converges to the discrete form") {
    csl::ModelParams params{1.0, 0.0, 2.0 * kPi, 6.2};
    const auto grid = csl::build_mode_grid(params);
    REQUIRE(grid.size() == 6);
    const csl::ClumpProfile a{0.5, 1.0, 0.0};
    const csl::ClumpProfile b{0.5, 1.0, 1.2};
    const double want = std::exp(csl::log_clump_overlap_discrete(a, b, grid));
    const double e8 = std::abs(csl::coherent_overlap_oracle(a, b, grid, 8) - want);
    const double e12 = std::abs(csl::coherent_overlap_oracle(a, b, grid, 12) - want);
    const double e16 = std::abs(csl::coherent_overlap_oracle(a, b, grid, 16) - want);
    CHECK(e12 <= e8);
    CHECK(e16 <= e12);
    CHECK(e16 < 1e-10);
}

TEST_CASE("field eigenstate residuals across truncations") {
    csl::ModelParams params{1.0, 0.0, 50.0, 20.0};
    const double k = std::sqrt(3.0);  // omega = 2
    const double dk = 0.25;           // sqrt(2 w dk) = 1

    // vanishing amplitude: the two relations hold exactly
    CHECK(csl::eigenstate_residual(cplx(0.0, 0.0), k, params, dk, 12) < 1e-14);

    // small amplitudes: residual is |f~| sqrt(n_max + 1) at unit scale
    const cplx tiny(1e-6, 0.0);
    for (int n : {10, 20}) {
        const double r = csl::eigenstate_residual(tiny, k, params, dk, n);
        CHECK(r == doctest::Approx(1e-6 * std::sqrt(n + 1.0)).epsilon(1e-3));
    }

    // order-one amplitude at unit scale: the tested window decreases
    const cplx ft(0.3, 0.1);
    const double r10 = csl::eigenstate_residual(ft, k, params, dk, 10);
    const double r20 = csl::eigenstate_residual(ft, k, params, dk, 20);
    const double r30 = csl::eigenstate_residual(ft, k, params, dk, 30);
    const double r40 = csl::eigenstate_residual(ft, k, params, dk, 40);
    CHECK(r10 > r20);
    CHECK(r20 > r30);
    CHECK(r30 > r40);
    CHECK(r30 < r10);
    CHECK(r10 == doctest::Approx(0.70989).epsilon(1e-3));
    CHECK(r40 == doctest::Approx(0.65462).epsilon(1e-3));

    // unnormalizable input overflows loudly
    CHECK_THROWS_AS(csl::eigenstate_residual(cplx(100.0, 0.0), k, params, dk, 30),
                    std::overflow_error);
}

TEST_CASE("eigenstate expectation sits within the residual bound") {
    csl::ModelParams params{1.0, 0.0, 50.0, 20.0};
    const double k = std::sqrt(3.0), dk = 0.25;  // unit displacement scale
    for (const cplx ft : {cplx(1e-4, 5e-5), cplx(0.05, -0.02), cplx(0.3, 0.1)}) {
        for (int n : {16, 32}) {
            const double r = csl::eigenstate_residual(ft, k, params, dk, n);
            const cplx got = csl::eigenstate_expectation(ft, k, params, dk, n);
            CHECK(std::abs(got - ft) <= std::sqrt(2.0) * r + 1e-12);
        }
    }
}

}  // TEST_SUITE
