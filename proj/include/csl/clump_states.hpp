#pragma once

#include <complex>

#include "csl/units_modes.hpp"

// Coherent "clump" states: Gaussian N-particle wavepackets of width sigma
// centered at l.  Position profile chi(x) carries total norm N; the
// momentum profile chi~(k) is its Fourier transform, chi~(-k) = chi~*(k).

namespace csl {

using cplx = std::complex<double>;

struct ClumpProfile {
    double n_particles = 1.0;  // N, need not be integer
    double sigma = 1.0;        // width
    double center = 0.0;       // l

    void validate() const;  // throws unless n_particles > 0 and sigma > 0
};

// Two clump centers sharing N and sigma (a superposition candidate pair).
struct ClumpPair {
    ClumpProfile left;
    ClumpProfile right;

    double separation() const { return right.center - left.center; }
};

// Throws std::invalid_argument unless the profiles share N and sigma.
ClumpPair make_clump_pair(const ClumpProfile& a, const ClumpProfile& b);

// chi(x) = sqrt(N) (2 pi sigma^2)^{-1/4} exp(-(x-l)^2 / (4 sigma^2))
double chi_position(double x, const ClumpProfile& p);

// chi~(k) = sqrt(N) (2 sigma^2/pi)^{1/4} exp(-k^2 sigma^2) exp(-i k l)
cplx chi_momentum(double k, const ClumpProfile& p);

// Continuum coherent-state overlap <a|b> = exp(-N (1 - e^{-(la-lb)^2/(8 sigma^2)})).
// Requires shared N and sigma.
double clump_overlap(const ClumpProfile& a, const ClumpProfile& b);
double log_clump_overlap(const ClumpProfile& a, const ClumpProfile& b);

// Same overlap evaluated as a sum over the discrete mode grid:
// sum_k dk (2 Re[chi~_a* chi~_b] - |chi~_a|^2 - |chi~_b|^2).
// Converges to the continuum value as the grid refines; profiles need
// not share N or sigma here.
double log_clump_overlap_discrete(const ClumpProfile& a, const ClumpProfile& b,
                                  const ModeGrid& grid);

// True when sigma*m < 1, i.e. the clump is narrower than the Compton
// scale the model assumes (sigma >> 1/m).
bool narrow_width_warning(const ClumpProfile& p, double m);

}  // namespace csl
