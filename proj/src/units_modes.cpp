#include "csl/units_modes.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace csl {

void ModelParams::validate() const {
    if (!(m > 0.0)) throw std::invalid_argument("ModelParams: m must be > 0");
    if (!(lambda >= 0.0)) throw std::invalid_argument("ModelParams: lambda must be >= 0");
    if (!(box_length > 0.0)) throw std::invalid_argument("ModelParams: box_length must be > 0");
    if (!(k_max > m)) throw std::invalid_argument("ModelParams: k_max must exceed m");
}

double dispersion(double k, double m) { return std::sqrt(m * m + k * k); }

ModeGrid build_mode_grid(const ModelParams& params) {
    params.validate();
    const double dk = 2.0 * std::numbers::pi / params.box_length;
    // count midpoints (j+1/2)dk <= k_max; nudge by a few ulps so a mode
    // sitting exactly on k_max stays in
    const auto n_modes = static_cast<std::size_t>(
        std::floor(params.k_max / dk * (1.0 + 4.0 * std::numeric_limits<double>::epsilon()) + 0.5));
    if (n_modes < 2)
        throw std::invalid_argument("build_mode_grid: fewer than 2 modes below k_max; enlarge box_length or k_max");
    ModeGrid grid;
    grid.dk = dk;
    grid.k.reserve(n_modes);
    grid.omega.reserve(n_modes);
    for (std::size_t j = 0; j < n_modes; ++j) {
        const double kj = (static_cast<double>(j) + 0.5) * dk;
        grid.k.push_back(kj);
        grid.omega.push_back(dispersion(kj, params.m));
    }
    return grid;
}

double oscillation_period(double m) {
    if (!(m > 0.0)) throw std::invalid_argument("oscillation_period: m must be > 0");
    return 2.0 * std::numbers::pi / m;
}

bool is_stroboscopic(double t, double m, double tol) {
    const double period = oscillation_period(m);
    const double r = t / period;
    return std::abs(r - std::round(r)) <= tol;
}

StroboscopicTimes stroboscopic_times(double t_final, double m, std::size_t max_samples) {
    const double period = oscillation_period(m);
    StroboscopicTimes out;
    if (max_samples == 0) return out;
    const double ratio = t_final / period * (1.0 + 4.0 * std::numeric_limits<double>::epsilon());
    if (ratio < 1.0) {
        out.below_one_period = true;
        return out;
    }
    const auto total = static_cast<std::int64_t>(std::floor(ratio));
    if (static_cast<std::size_t>(total) <= max_samples) {
        for (std::int64_t n = 1; n <= total; ++n) out.multiples.push_back(n);
    } else {
        for (std::size_t i = 1; i <= max_samples; ++i) {
            const auto n = static_cast<std::int64_t>(
                (static_cast<__int128>(total) * static_cast<__int128>(i)) /
                static_cast<__int128>(max_samples));
            out.multiples.push_back(n);
        }
    }
    out.times.reserve(out.multiples.size());
    for (auto n : out.multiples) out.times.push_back(static_cast<double>(n) * period);
    return out;
}

}  // namespace csl
