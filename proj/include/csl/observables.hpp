#pragma once

#include <string>
#include <utility>
#include <vector>

#include "csl/clump_states.hpp"
#include "csl/field_density.hpp"
#include "csl/units_modes.hpp"

// Physical summaries over time: particle production, energy densities,
// decoherence curves and the no-created-particle probability.

namespace csl {

struct TimeSeries {
    std::vector<double> times;
    std::vector<double> values;
    std::string label;
    std::string units;
};

// Occupation of the two oscillators of one mode, n = lambda t/2w + n0
// for each; the difference n_a - n_b is conserved.
std::pair<double, double> mode_occupation(double t, double k, double n0_a, double n0_b,
                                          const ModelParams& params);

// Mode energy lambda t + e0, independent of k: every mode heats at the
// same rate.
double mode_energy(double t, double k, double e0, const ModelParams& params);

// Energy per unit length carried by each mode at time t: value_j =
// (dk/2pi) lambda t + e0_per_length, reported over the grid (abscissa is
// k, ascending).  The total over the grid grows like (k_max/2pi)
// lambda t, unbounded in the cutoff.
TimeSeries energy_density(double t, const ModeGrid& grid, double e0_per_length,
                          const ModelParams& params);

// Off-diagonal/diagonal ratio of the clump-basis density matrix at each
// time; 1 at t = 0, asymptote e^{-2N(1-g)}.  The K factor cancels, so
// the ratio stays finite even when K underflows.
TimeSeries decoherence_curve(const std::vector<double>& times, const ClumpPair& pair,
                             const ModeGrid& grid, const ModelParams& params);

// K(t) per mode product; 1 at t = 0, strictly decreasing in t.
TimeSeries no_particle_probability(const std::vector<double>& times, const ModeGrid& grid,
                                   const ModelParams& params);

}  // namespace csl
