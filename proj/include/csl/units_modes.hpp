#pragma once

#include <cstdint>
#include <vector>

// Natural units throughout: hbar = c = 1, energies and momenta in units of
// the field mass scale, times in inverse energies.

namespace csl {

struct ModelParams {
    double m = 1.0;           // field mass
    double lambda = 0.0;      // collapse rate
    double box_length = 0.0;  // periodic box length L
    double k_max = 0.0;       // momentum cutoff

    // Throws std::invalid_argument unless m > 0, lambda >= 0,
    // box_length > 0 and k_max > m.
    void validate() const;
};

// Midpoint momentum grid: k_j = (j + 1/2) dk with dk = 2 pi / L,
// keeping every k_j <= k_max.
struct ModeGrid {
    double dk = 0.0;
    std::vector<double> k;
    std::vector<double> omega;

    std::size_t size() const { return k.size(); }
};

double dispersion(double k, double m);  // sqrt(m^2 + k^2)

// Throws std::invalid_argument when params are invalid or fewer than
// two modes fit below k_max.
ModeGrid build_mode_grid(const ModelParams& params);

double oscillation_period(double m);  // 2 pi / m

// True when t is an integer multiple of 2 pi / m within tol (relative
// to one period).
bool is_stroboscopic(double t, double m, double tol = 1e-9);

struct StroboscopicTimes {
    std::vector<double> times;           // n * period, ascending
    std::vector<std::int64_t> multiples; // the integers n
    bool below_one_period = false;       // t_final < period: empty result
};

// Positive multiples of the oscillation period up to t_final, thinned
// approximately uniformly to at most max_samples entries; the largest
// multiple is always kept.  Thinning rule: n_i = floor(i*M/max_samples).
StroboscopicTimes stroboscopic_times(double t_final, double m, std::size_t max_samples);

}  // namespace csl
