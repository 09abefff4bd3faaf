#include <cmath>
#include <stdexcept>
#include <vector>

#include "csl/observables.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_SUITE("observables") {

TEST_CASE("mode occupation grows linearly and conserves the difference") {
    csl::ModelParams params{2.0, 0.1, 50.0, 20.0};
    const auto [na, nb] = csl::mode_occupation(10.0, 0.0, 0.0, 0.0, params);  // w = m = 2
    CHECK(na == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(nb == doctest::Approx(0.25).epsilon(1e-14));

    for (double t : {0.0, 1.0, 7.0, 40.0}) {
        const auto [a, b] = csl::mode_occupation(t, 1.3, 0.7, 0.1, params);
        CHECK(a - b == doctest::Approx(0.6).epsilon(1e-14));
    }
    CHECK_THROWS_AS(csl::mode_occupation(-1.0, 0.0, 0.0, 0.0, params), std::invalid_argument);
}

TEST_CASE("mode energy heats at the collapse rate on every mode") {
    csl::ModelParams params{1.0, 0.8, 50.0, 20.0};
    std::vector<double> ts, es;
    for (double t : {1.0, 2.0, 4.0, 8.0}) {
        ts.push_back(t);
        es.push_back(csl::mode_energy(t, 0.3, 0.25, params));
        CHECK(csl::mode_energy(t, 0.3, 0.25, params) ==
              doctest::Approx(csl::mode_energy(t, 12.0, 0.25, params)).epsilon(1e-14));
    }
    CHECK(testutil::ols_slope(ts, es) == doctest::Approx(params.lambda).epsilon(1e-12));
    CHECK(csl::mode_energy(0.0, 1.0, 0.25, params) == doctest::Approx(0.25));
}

TEST_CASE("energy density per mode and aligned-cutoff total") {
    csl::ModelParams params{1.0, 0.8, 2.0 * kPi, 6.0};  // dk = 1, cutoff on a grid edge
    const auto grid = csl::build_mode_grid(params);
    REQUIRE(grid.size() == 6);
    const double t = 3.0;
    const auto series = csl::energy_density(t, grid, 0.0, params);
    REQUIRE(series.values.size() == grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        CHECK(series.times[j] == doctest::Approx(grid.k[j]));
        CHECK(series.values[j] ==
              doctest::Approx(grid.dk / (2.0 * kPi) * params.lambda * t).epsilon(1e-14));
    }
    double total = 0.0;
    for (double v : series.values) total += v;
    CHECK(total == doctest::Approx(params.k_max / (2.0 * kPi) * params.lambda * t).epsilon(1e-12));

    // doubling an aligned cutoff doubles the total exactly
    auto wider = params;
    wider.k_max = 12.0;
    const auto grid2 = csl::build_mode_grid(wider);
    const auto series2 = csl::energy_density(t, grid2, 0.0, wider);
    double total2 = 0.0;
    for (double v : series2.values) total2 += v;
    CHECK(total2 == doctest::Approx(2.0 * total).epsilon(1e-12));
}

TEST_CASE("decoherence curve") {
    csl::ModelParams params{1.0, 0.5, 5000.0, 1.1};
    const auto grid = csl::build_mode_grid(params);
    const double sigma = 100.0;
    const csl::ClumpProfile a{5.0, sigma, 0.0};
    const csl::ClumpProfile b{5.0, sigma, 40.0 * sigma};  // residual overlap negligible
    const auto pair = csl::make_clump_pair(a, b);

    std::vector<double> times{0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 100.0, 1e4};
    const auto curve = csl::decoherence_curve(times, pair, grid, params);
    REQUIRE(curve.values.size() == times.size());
    CHECK(curve.values.front() == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t i = 1; i < curve.values.size(); ++i)
        CHECK(curve.values[i] < curve.values[i - 1]);

    // each point is the clump-matrix ratio
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto [diag, off] = csl::clump_dm_parts(times[i], pair, params);
        CHECK(curve.values[i] == doctest::Approx(off / diag).epsilon(1e-14));
    }

    // lambda t/m = 1 (sbar = 1/2) with N = 5: the distinct-branch weight
    // e^{-2 N sbar} = e^{-5} leads, the shared branches push it up ~1.57x
    const double r1 = curve.values[3];  // t = 2 -> lambda t/m = 1
    CHECK(r1 == doctest::Approx(1.0599e-2).epsilon(1e-3));
    CHECK(r1 > std::exp(-5.0));
    CHECK(r1 < 2.0 * std::exp(-5.0));

    // late times: bounded by the shared-branch floor and the pure weight
    const double late = curve.values.back();
    CHECK(late > std::exp(-2.0 * 5.0));
    CHECK(late < 3.0 * std::exp(-1.5 * 5.0));

    std::vector<double> unsorted{1.0, 0.5};
    CHECK_THROWS_AS(csl::decoherence_curve(unsorted, pair, grid, params), std::invalid_argument);
}

TEST_CASE("no-created-particle probability tracks the weight factor") {
    csl::ModelParams params{1.0, 0.6, 30.0, 4.0};
    const auto grid = csl::build_mode_grid(params);
    std::vector<double> times{0.0, 1.0, 3.0, 9.0};
    const auto series = csl::no_particle_probability(times, grid, params);
    CHECK(series.values.front() == doctest::Approx(1.0));
    for (std::size_t i = 1; i < series.values.size(); ++i) {
        CHECK(series.values[i] < series.values[i - 1]);
        CHECK(series.values[i] == doctest::Approx(csl::k_factor(times[i], grid, params)));
    }
}

}  // TEST_SUITE
