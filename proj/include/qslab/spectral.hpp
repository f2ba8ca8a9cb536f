// spectral.hpp — Exponential-cutoff spectral densities J(ω)=ηω^s ωc^{1−s} e^{−ω/ωc} and their bath integrals
//
// Units: frequencies in units of the bare system frequency, times in its inverse.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "qslab/errors.hpp"
#include "qslab/quadrature.hpp"

namespace qslab {

using cplx = std::complex<double>;

struct SpectralDensity {
    double eta{0.05};     // dimensionless coupling
    double s{1.0};        // spectral exponent (1 = Ohmic, < 1 sub-Ohmic)
    double omega_c{10.0}; // cutoff

    static SpectralDensity ohmic(double eta, double omega_c) { return {eta, 1.0, omega_c}; }

    void validate() const {
        if (!(eta >= 0.0)) throw DomainError("spectral density: eta must be >= 0");
        if (!(s > 0.0)) throw DomainError("spectral density: s must be > 0");
        if (!(omega_c > 0.0)) throw DomainError("spectral density: omega_c must be > 0");
    }

    // J(ω) for ω >= 0 without the domain check; the quadrature paths call this.
    double operator()(double omega) const noexcept {
        if (!(omega > 0.0) || eta == 0.0) return 0.0;
        return eta * std::pow(omega, s) * std::pow(omega_c, 1.0 - s) * std::exp(-omega / omega_c);
    }

    // Natural length scale used by the semi-infinite mappings.
    double scale() const noexcept { return omega_c; }
};

inline double j_omega(const SpectralDensity& sd, double omega) {
    if (omega < 0.0) throw DomainError("j_omega: negative frequency");
    return sd(omega);
}

// α(t) = ∫_0^∞ J(ω) e^{−iωt} dω = ηΓ(s+1)ωc² (1 + iωc t)^{−(s+1)}.
inline cplx alpha_closed(const SpectralDensity& sd, double t) {
    const double prefactor = sd.eta * std::tgamma(sd.s + 1.0) * sd.omega_c * sd.omega_c;
    return prefactor * std::pow(cplx(1.0, sd.omega_c * t), -(sd.s + 1.0));
}

// Same integral by adaptive quadrature after ω = ωc x/(1−x); independent of the closed form.
inline cplx alpha_quad(const SpectralDensity& sd, double t, const quad::Options& opt = {}) {
    auto integrand = [&](double omega) { return sd(omega) * std::exp(cplx(0.0, -omega * t)); };
    return quad::integrate_half_line(integrand, sd.omega_c, opt).value;
}

// α(0) = ∫ J dω, the total bath weight.
inline double alpha_zero(const SpectralDensity& sd) {
    return sd.eta * std::tgamma(sd.s + 1.0) * sd.omega_c * sd.omega_c;
}

// ∫_0^∞ J(ω)/ω dω = ηΓ(s)ωc.
inline double j_over_omega_integral(const SpectralDensity& sd) {
    if (!(sd.s > 0.0)) throw DomainError("j_over_omega_integral: s must be > 0");
    return sd.eta * std::tgamma(sd.s) * sd.omega_c;
}

// Ω with ∫_Ω^∞ J dω = rel · ∫_0^∞ J dω (upper regularized incomplete gamma inverted).
inline double tail_cutoff(const SpectralDensity& sd, double rel = 1e-6) {
    return sd.omega_c * boost::math::gamma_q_inv(sd.s + 1.0, rel);
}

// Kernel sampled on a uniform grid t_n = n·dt, n = 0..n_steps.
struct CorrelationFunction {
    double dt{0.0};
    double alpha0{0.0};
    std::vector<cplx> samples;

    template <class Kernel>
    static CorrelationFunction sample(const Kernel& kernel, double dt, std::size_t n_steps) {
        CorrelationFunction c;
        c.dt = dt;
        c.samples.resize(n_steps + 1);
        for (std::size_t n = 0; n <= n_steps; ++n) c.samples[n] = kernel(static_cast<double>(n) * dt);
        c.alpha0 = c.samples.front().real();
        return c;
    }

    std::size_t size() const noexcept { return samples.size(); }
    const cplx& operator[](std::size_t n) const { return samples[n]; }
};

// Callable wrapper so solvers can take the closed-form kernel as any other kernel.
struct ClosedFormKernel {
    SpectralDensity sd;
    cplx operator()(double t) const { return alpha_closed(sd, t); }
    double at_zero() const { return alpha_zero(sd); }
};

} // namespace qslab
