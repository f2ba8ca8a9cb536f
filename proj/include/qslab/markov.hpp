// markov.hpp — Born-Markov closed forms: decay rate, Lamb shift, exponential amplitude, QSL asymptote

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qslab/errors.hpp"
#include "qslab/quadrature.hpp"
#include "qslab/spectral.hpp"

namespace qslab {

struct MarkovParams {
    double kappa{0.0};  // decay rate πJ(ω0)
    double delta{0.0};  // Lamb shift Δ
    double A{0.0};      // A² = [α(0) + κ² + (ω0+Δ)²]/2
    double omega0{1.0};
    double alpha0{0.0};
};

inline double decay_rate(const SpectralDensity& sd, double omega0) { return std::numbers::pi * j_omega(sd, omega0); }

// Principal value P∫ J(ω)/(ω0 − ω) dω by subtracting J(ω0) on [0, 2ω0], where the
// subtracted log term integrates to zero. The inner interval is split at the pole so no
// quadrature node lands on the removable 0/0.
inline double lamb_shift(const SpectralDensity& sd, double omega0, const quad::Options& opt = {1e-10, 1e-12, 5000}) {
    if (!(omega0 > 0.0)) throw DomainError("lamb_shift: omega0 must be > 0");
    if (sd.eta == 0.0) return 0.0;
    const double j0 = sd(omega0);
    auto subtracted = [&](double w) { return (sd(w) - j0) / (omega0 - w); };
    auto tail = [&](double w) { return sd(w) / (omega0 - w); };
    const auto lower = quad::integrate(subtracted, 0.0, omega0, opt);
    const auto upper = quad::integrate(subtracted, omega0, 2.0 * omega0, opt);
    const auto rest = quad::integrate_to_infinity(tail, 2.0 * omega0, sd.omega_c, opt);
    return lower.value + upper.value + rest.value;
}

inline MarkovParams markov_params(const SpectralDensity& sd, double omega0) {
    sd.validate();
    MarkovParams p;
    p.omega0 = omega0;
    p.alpha0 = alpha_zero(sd);
    p.kappa = decay_rate(sd, omega0);
    p.delta = lamb_shift(sd, omega0);
    const double w = omega0 + p.delta;
    p.A = std::sqrt(0.5 * (p.alpha0 + p.kappa * p.kappa + w * w));
    return p;
}

inline cplx u_markov(const MarkovParams& p, double omega0, double t) {
    if (t < 0.0) throw DomainError("u_markov: t must be >= 0");
    return std::exp(cplx(-p.kappa, -(omega0 + p.delta)) * t);
}

inline cplx udot_markov(const MarkovParams& p, double omega0, double t) {
    return cplx(-p.kappa, -(omega0 + p.delta)) * u_markov(p, omega0, t);
}

// ℓ_BMA(τ) = ∫_0^τ A e^{−κt} dt
inline double ell_markov(const MarkovParams& p, double tau) {
    if (p.kappa == 0.0) return p.A * tau;
    return -p.A * std::expm1(-p.kappa * tau) / p.kappa;
}

inline double vbar_markov(const MarkovParams& p, double tau) {
    if (!(tau >= 0.0)) throw DomainError("vbar_markov: tau must be > 0");
    const double x = p.kappa * tau;
    if (x < 1e-300) return p.A;
    return p.A * (-std::expm1(-x)) / x;
}

// arccos of √(1 + e^{−2κτ} + 2e^{−κτ}cos((ω0+Δ)τ)) / 2, i.e. |1 + u_BMA(τ)|/2.
inline double bures_angle_markov(const MarkovParams& p, double omega0, double tau) {
    const double e = std::exp(-p.kappa * tau);
    const double radicand = 1.0 + e * e + 2.0 * e * std::cos((omega0 + p.delta) * tau);
    const double c = std::sqrt(std::max(radicand, 0.0)) / 2.0;
    return std::acos(std::min(c, 1.0));
}

inline double gtt_markov_exact(const MarkovParams& p, double omega0, double t) {
    const double e2 = std::exp(-2.0 * p.kappa * t);
    const double b = omega0 + 2.0 * p.delta;
    return p.A * p.A * e2 - 0.25 * b * b * e2 * e2;
}

inline double gtt_markov_simplified(const MarkovParams& p, double t) {
    return p.A * p.A * std::exp(-2.0 * p.kappa * t);
}

inline double qsl_markov_asymptote(const MarkovParams& p) { return std::numbers::pi * p.kappa / (3.0 * p.A); }

// τ_QSL/τ of the closed-form pipeline: L_B,BMA over the simplified-metric path length.
inline double markov_ratio(const MarkovParams& p, double omega0, double tau) {
    const double ell = ell_markov(p, tau);
    const double lb = bures_angle_markov(p, omega0, tau);
    if (ell == 0.0) {
        if (lb == 0.0) return 1.0;
        throw InconsistencyError("markov_ratio: zero path length with nonzero Bures angle");
    }
    return lb / ell;
}

} // namespace qslab
