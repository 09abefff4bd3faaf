#include "csl/observables.hpp"

#include <cmath>
#include <stdexcept>

namespace csl {

namespace {

void require_ascending(const std::vector<double>& times, const char* who) {
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument(std::string(who) + ": times must strictly increase");
}

}  // namespace

std::pair<double, double> mode_occupation(double t, double k, double n0_a, double n0_b,
                                          const ModelParams& params) {
    if (!(t >= 0.0)) throw std::invalid_argument("mode_occupation requires t >= 0");
    const double growth = params.lambda * t / (2.0 * dispersion(k, params.m));
    return {growth + n0_a, growth + n0_b};
}

double mode_energy(double t, double k, double e0, const ModelParams& params) {
    if (!(t >= 0.0)) throw std::invalid_argument("mode_energy requires t >= 0");
    (void)k;  // every mode heats at the same rate
    return params.lambda * t + e0;
}

TimeSeries energy_density(double t, const ModeGrid& grid, double e0_per_length,
                          const ModelParams& params) {
    if (!(t >= 0.0)) throw std::invalid_argument("energy_density requires t >= 0");
    TimeSeries out;
    out.label = "energy_per_length_per_mode";
    out.units = "energy/length vs k";
    out.times = grid.k;
    out.values.resize(grid.size());
    const double increment = grid.dk / (2.0 * M_PI) * params.lambda * t;
    for (std::size_t j = 0; j < grid.size(); ++j) out.values[j] = increment + e0_per_length;
    return out;
}

TimeSeries decoherence_curve(const std::vector<double>& times, const ClumpPair& pair,
                             const ModeGrid& grid, const ModelParams& params) {
    require_ascending(times, "decoherence_curve");
    (void)grid;  // the K factor cancels in the ratio
    TimeSeries out;
    out.label = "clump_offdiag_over_diag";
    out.units = "dimensionless";
    out.times = times;
    out.values.reserve(times.size());
    for (double t : times) {
        const auto [diag, off] = clump_dm_parts(t, pair, params);
        out.values.push_back(off / diag);
    }
    return out;
}

TimeSeries no_particle_probability(const std::vector<double>& times, const ModeGrid& grid,
                                   const ModelParams& params) {
    require_ascending(times, "no_particle_probability");
    TimeSeries out;
    out.label = "no_particle_probability";
    out.units = "dimensionless";
    out.times = times;
    out.values.reserve(times.size());
    for (double t : times) out.values.push_back(k_factor(t, grid, params));
    return out;
}

}  // namespace csl
