#include "csl/clump_states.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace csl {

void ClumpProfile::validate() const {
    if (!(n_particles > 0.0)) throw std::invalid_argument("ClumpProfile: n_particles must be > 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("ClumpProfile: sigma must be > 0");
}

ClumpPair make_clump_pair(const ClumpProfile& a, const ClumpProfile& b) {
    a.validate();
    b.validate();
    if (a.n_particles != b.n_particles || a.sigma != b.sigma)
        throw std::invalid_argument("make_clump_pair: profiles must share n_particles and sigma");
    return ClumpPair{a, b};
}

double chi_position(double x, const ClumpProfile& p) {
    const double s2 = p.sigma * p.sigma;
    const double norm = std::sqrt(p.n_particles) * std::pow(2.0 * std::numbers::pi * s2, -0.25);
    const double d = x - p.center;
    return norm * std::exp(-d * d / (4.0 * s2));
}

cplx chi_momentum(double k, const ClumpProfile& p) {
    const double s2 = p.sigma * p.sigma;
    const double norm = std::sqrt(p.n_particles) * std::pow(2.0 * s2 / std::numbers::pi, 0.25);
    const double mag = norm * std::exp(-k * k * s2);
    return std::polar(mag, -k * p.center);
}

double log_clump_overlap(const ClumpProfile& a, const ClumpProfile& b) {
    a.validate();
    b.validate();
    if (a.n_particles != b.n_particles || a.sigma != b.sigma)
        throw std::invalid_argument("clump_overlap: profiles must share n_particles and sigma");
    const double d = a.center - b.center;
    const double r = d * d / (8.0 * a.sigma * a.sigma);
    // -N (1 - e^{-r}) with expm1 for small separations
    return a.n_particles * std::expm1(-r);
}

double clump_overlap(const ClumpProfile& a, const ClumpProfile& b) {
    return std::exp(log_clump_overlap(a, b));
}

double log_clump_overlap_discrete(const ClumpProfile& a, const ClumpProfile& b,
                                  const ModeGrid& grid) {
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const cplx ca = chi_momentum(grid.k[i], a);
        const cplx cb = chi_momentum(grid.k[i], b);
        acc += 2.0 * (ca.real() * cb.real() + ca.imag() * cb.imag()) - std::norm(ca) - std::norm(cb);
    }
    return grid.dk * acc;
}

bool narrow_width_warning(const ClumpProfile& p, double m) { return p.sigma * m < 1.0; }

}  // namespace csl
