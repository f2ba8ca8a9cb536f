// discrete_bath.hpp — Uniform midpoint discretization of a continuous bath into harmonic modes

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "qslab/errors.hpp"
#include "qslab/spectral.hpp"

namespace qslab {

inline constexpr double spectral_tail_fraction = 1e-6;

struct DiscreteBath {
    std::vector<double> omegas;    // ω_k, midpoints of [0, Ω]
    std::vector<double> couplings; // g_k = sqrt(J(ω_k) Δω)
    double omega_max{0.0};
    double delta_omega{0.0};

    std::size_t n_modes() const noexcept { return omegas.size(); }
    double recurrence_time() const noexcept { return 2.0 * std::numbers::pi / delta_omega; }

    double total_weight() const noexcept {
        double sum = 0.0;
        for (double g : couplings) sum += g * g;
        return sum;
    }

    // α_d(t) = Σ g_k² e^{−iω_k t}
    cplx correlation(double t) const {
        cplx sum{};
        for (std::size_t k = 0; k < omegas.size(); ++k) sum += couplings[k] * couplings[k] * std::polar(1.0, -omegas[k] * t);
        return sum;
    }
};

inline DiscreteBath discretize(const SpectralDensity& sd, std::size_t n_modes) {
    sd.validate();
    if (n_modes < 100) throw ConfigError("discrete bath: n_modes must be >= 100 (got " + std::to_string(n_modes) + ")");
    DiscreteBath bath;
    bath.omega_max = tail_cutoff(sd, spectral_tail_fraction);
    bath.delta_omega = bath.omega_max / static_cast<double>(n_modes);
    bath.omegas.resize(n_modes);
    bath.couplings.resize(n_modes);
    for (std::size_t k = 0; k < n_modes; ++k) {
        const double w = (static_cast<double>(k) + 0.5) * bath.delta_omega;
        bath.omegas[k] = w;
        bath.couplings[k] = std::sqrt(sd(w) * bath.delta_omega);
    }
    return bath;
}

// Discretization for a run of horizon t_max: the first revival 2π/Δω must lie beyond
// recurrence_factor·t_max.
inline DiscreteBath build_bath(const SpectralDensity& sd, std::size_t n_modes, double t_max,
                               double recurrence_factor = 1.0) {
    DiscreteBath bath = discretize(sd, n_modes);
    const double required = recurrence_factor * t_max;
    if (!(bath.recurrence_time() > required)) {
        const auto minimum =
            static_cast<std::size_t>(std::floor(required * bath.omega_max / (2.0 * std::numbers::pi))) + 1;
        throw ConfigError("discrete bath: recurrence time " + std::to_string(bath.recurrence_time()) +
                          " does not exceed " + std::to_string(required) + "; need n_modes >= " +
                          std::to_string(minimum));
    }
    return bath;
}

} // namespace qslab
