#pragma once

// SI conversions for reporting.  Internal units are natural (hbar = c = 1);
// only the CLI layer ever touches seconds.

namespace csl {

// 2 pi / m converted to seconds for a mass given as m c^2 in MeV:
// tau = h / (m c^2).  Planck constant and MeV are exact SI definitions.
inline double si_period_seconds(double mass_mev) {
    constexpr double h_joule_s = 6.62607015e-34;
    constexpr double mev_joule = 1.602176634e-13;
    return h_joule_s / (mass_mev * mev_joule);
}

}  // namespace csl
