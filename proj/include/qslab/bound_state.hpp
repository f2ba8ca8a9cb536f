// bound_state.hpp — Isolated bound state of the single-excitation spectrum
//
// Poles of the Laplace-transformed amplitude solve y(ϖ) = ϖ with
//   y(ϖ) = ω0 − ∫_0^∞ J(ω)/(ω − ϖ) dω.
// y is strictly decreasing for ϖ < 0, so a root below the continuum exists iff y(0) < 0.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qslab/discrete_bath.hpp"
#include "qslab/errors.hpp"
#include "qslab/parallel.hpp"
#include "qslab/quadrature.hpp"
#include "qslab/spectral.hpp"

namespace qslab {

// Anything that returns J(ω) ≥ 0 for ω ≥ 0 and exposes a frequency scale for quadrature maps.
template <class D>
concept BathDensity = requires(const D& d, double w) {
    { d(w) } -> std::convertible_to<double>;
    { d.scale() } -> std::convertible_to<double>;
};

struct BoundStateInfo {
    bool exists{false};
    double E_b{0.0};
    double Z{0.0};
    double y0{0.0};
};

inline quad::Options bound_state_quadrature() { return {1e-13, 1e-14, 20000}; }

inline double bath_integral_over_omega(const SpectralDensity& sd) { return j_over_omega_integral(sd); }

template <BathDensity D>
double bath_integral_over_omega(const D& d) {
    return quad::integrate_half_line([&](double w) { return d(w) / w; }, d.scale(), bound_state_quadrature()).value;
}

template <BathDensity D>
double y_value(const D& d, double omega0, double varpi) {
    if (varpi > 0.0) throw DomainError("y_value: undefined for varpi > 0 (continuum poles)");
    if (varpi == 0.0) return omega0 - bath_integral_over_omega(d);
    return omega0 -
           quad::integrate_half_line([&](double w) { return d(w) / (w - varpi); }, d.scale(), bound_state_quadrature())
               .value;
}

// Z = [1 + ∫ J(ω)/(E − ω)² dω]^{−1}
template <BathDensity D>
double residue_weight(const D& d, double energy) {
    const double integral =
        quad::integrate_half_line([&](double w) { return d(w) / ((energy - w) * (energy - w)); }, d.scale(),
                                  bound_state_quadrature())
            .value;
    return 1.0 / (1.0 + integral);
}

template <BathDensity D>
BoundStateInfo find_bound_state(const D& d, double omega0) {
    BoundStateInfo info;
    const double bath_shift = bath_integral_over_omega(d);
    info.y0 = omega0 - bath_shift;
    if (info.y0 >= 0.0) return info;

    auto h = [&](double varpi) { return y_value(d, omega0, varpi) - varpi; };
    // h(lo) ≥ y(0) − lo > 0 for this starting bracket; doubling only guards quadrature faults.
    double lo = -(omega0 + std::abs(bath_shift) + 1.0);
    double hi = 0.0;
    const double cap = 1e3 * std::max(1.0, std::abs(omega0)) + std::abs(lo);
    while (h(lo) <= 0.0) {
        lo *= 2.0;
        if (-lo > cap) throw NumericalError("find_bound_state: bracket growth exceeded limit");
    }
    double mid = 0.5 * (lo + hi);
    double hmid = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        mid = 0.5 * (lo + hi);
        if (mid == 0.0) mid = 0.5 * lo; // stay strictly below the continuum edge
        hmid = h(mid);
        if (std::abs(hmid) < 1e-10) break;
        if (hmid > 0.0) lo = mid;
        else hi = mid;
        if (hi - lo < 1e-15 * std::max(1.0, std::abs(lo))) break;
    }
    info.exists = true;
    info.E_b = mid;
    info.Z = residue_weight(d, info.E_b);
    return info;
}

// Long-time amplitude carried by the bound state: Z e^{−iE_b t}.
inline cplx asymptotic_u(const BoundStateInfo& info, double t) {
    if (!info.exists) throw StateError("asymptotic_u: no bound state");
    return info.Z * std::polar(1.0, -info.E_b * t);
}

struct SpectrumSlice {
    double eta{0.0};
    double delta_omega{0.0};
    std::vector<double> band;           // continuum eigenvalues
    std::optional<double> bound_branch; // isolated eigenvalue below the band
};

// Eigenvalues of the (n+1)-dimensional single-excitation matrix (system level + discretized modes).
inline Eigen::VectorXd single_excitation_eigenvalues(const DiscreteBath& bath, double omega0) {
    const auto n = static_cast<Eigen::Index>(bath.n_modes());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n + 1, n + 1);
    h(0, 0) = omega0;
    for (Eigen::Index k = 0; k < n; ++k) {
        h(k + 1, k + 1) = bath.omegas[static_cast<std::size_t>(k)];
        h(0, k + 1) = bath.couplings[static_cast<std::size_t>(k)];
        h(k + 1, 0) = bath.couplings[static_cast<std::size_t>(k)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("single-excitation eigensolver did not converge");
    return solver.eigenvalues();
}

inline std::vector<SpectrumSlice> energy_spectrum(const SpectralDensity& base, double omega0,
                                                  const std::vector<double>& eta_grid, std::size_t n_modes,
                                                  std::size_t jobs = 1) {
    if (n_modes < 100) throw DomainError("energy_spectrum: n_modes must be >= 100");
    return parallel_map(eta_grid.size(), jobs, [&](std::size_t i) {
        SpectralDensity sd = base;
        sd.eta = eta_grid[i];
        const DiscreteBath bath = discretize(sd, n_modes);
        const Eigen::VectorXd ev = single_excitation_eigenvalues(bath, omega0);
        SpectrumSlice slice;
        slice.eta = sd.eta;
        slice.delta_omega = bath.delta_omega;
        const BoundStateInfo info = find_bound_state(sd, omega0);
        Eigen::Index first = 0;
        if (info.exists) {
            const double lowest = ev(0);
            if (!(std::abs(lowest - info.E_b) < 5.0 * bath.delta_omega)) {
                throw NumericalError("energy_spectrum: lowest eigenvalue " + std::to_string(lowest) +
                                     " disagrees with bound-state root " + std::to_string(info.E_b));
            }
            slice.bound_branch = lowest;
            first = 1;
        }
        slice.band.assign(ev.data() + first, ev.data() + ev.size());
        return slice;
    });
}

} // namespace qslab
