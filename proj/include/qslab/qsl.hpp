// qsl.hpp — Quantum speed limit pipeline for the (|g⟩+|e⟩)/√2 initial state
//
// Everything is a functional of the amplitude u(t): the total-state Bures angle and
// Fubini-Study metric, the reduced-state (qubit) counterparts, and the hybrid bound.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "qslab/bound_state.hpp"
#include "qslab/errors.hpp"
#include "qslab/kernel_solver.hpp"
#include "qslab/spectral.hpp"

namespace qslab {

inline double bures_angle(cplx u_tau) {
    const double m = std::abs(1.0 + u_tau);
    if (m > 2.0 + 1e-9) throw InvariantError("bures_angle: |1+u| = " + std::to_string(m) + " exceeds 2");
    return std::acos(std::min(m / 2.0, 1.0));
}

// g_tt = [|u̇|² + α(0)|u|²]/2 − [2 Im(ū u̇) + ω0|u|²]²/4
inline double fubini_metric(cplx u, cplx udot, double omega0, double alpha0) {
    const double uu = std::norm(u);
    const double b = 2.0 * std::imag(std::conj(u) * udot) + omega0 * uu;
    const double g = 0.5 * (std::norm(udot) + alpha0 * uu) - 0.25 * b * b;
    if (g >= 0.0) return g;
    if (g > -1e-12) return 0.0;
    throw NumericalError("fubini_metric: negative metric " + std::to_string(g));
}

// Reduced-state quantum Fisher information for the Bloch vector r = (Re u, −Im u, |u|² − 1).
inline double reduced_fisher(cplx u, cplx udot) {
    const double re_uud = std::real(std::conj(u) * udot);
    const double rdot_sq = std::norm(udot) + 4.0 * re_uud * re_uud;
    const double uu = std::norm(u);
    const double mixedness = uu * (1.0 - uu); // 1 − |r|²
    if (mixedness < 1e-9) return rdot_sq;
    const double r_rdot = re_uud * (2.0 * uu - 1.0);
    return rdot_sq + r_rdot * r_rdot / mixedness;
}

inline double reduced_bures_angle(cplx u_tau) {
    const double fidelity = (2.0 + 2.0 * u_tau.real()) / 4.0;
    return std::acos(std::sqrt(std::clamp(fidelity, 0.0, 1.0)));
}

struct QslTime {
    double tau_qsl{0.0};
    double ratio{1.0};
};

inline QslTime qsl_time(double L_B, double ell, double tau) {
    if (ell == 0.0) {
        if (L_B == 0.0) return {tau, 1.0};
        throw InconsistencyError("qsl_time: zero path length with nonzero Bures angle");
    }
    return {L_B * tau / ell, L_B / ell};
}

// τ_QSL^hybrid = L_B τ / ℓ_red: total-state geodesic over the reduced-state speed.
inline QslTime hybrid_qsl(double L_B, double ell_red, double tau) {
    if (ell_red == 0.0) {
        if (L_B == 0.0) return {tau, 1.0};
        throw InconsistencyError("hybrid_qsl: zero reduced path length with nonzero Bures angle");
    }
    return {L_B * tau / ell_red, L_B / ell_red};
}

// Cumulative path lengths on the solver grid, trapezoidal in time.
struct PathLengths {
    std::vector<double> ell;
    std::vector<double> ell_red;
};

inline std::vector<double> cumulative_trapezoid(const std::vector<double>& f, double dt) {
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t n = 1; n < f.size(); ++n) out[n] = out[n - 1] + 0.5 * dt * (f[n - 1] + f[n]);
    return out;
}

inline PathLengths path_lengths(const AmplitudeGrid& grid) {
    if (grid.u.empty()) throw DomainError("path_length: empty grid");
    std::vector<double> speed(grid.size()), speed_red(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) {
        speed[n] = std::sqrt(fubini_metric(grid.u[n], grid.udot[n], grid.omega0, grid.alpha0));
        speed_red[n] = 0.5 * std::sqrt(reduced_fisher(grid.u[n], grid.udot[n]));
    }
    return {cumulative_trapezoid(speed, grid.dt), cumulative_trapezoid(speed_red, grid.dt)};
}

inline double path_length(const AmplitudeGrid& grid) { return path_lengths(grid).ell.back(); }

struct QslReport {
    double tau{0.0};
    double L_B{0.0};
    double ell{0.0};
    double vbar{0.0};
    double tau_qsl{0.0};
    double ratio{1.0};
    double L_B_red{0.0};
    double ell_red{0.0};
    double ratio_red{1.0};
    double ratio_hybrid{1.0};
};

inline QslReport qsl_report(const AmplitudeGrid& grid, const PathLengths& paths, std::size_t n) {
    if (n >= grid.size()) throw DomainError("qsl_report: index outside grid");
    QslReport r;
    r.tau = grid.time(n);
    r.L_B = bures_angle(grid.u[n]);
    r.ell = paths.ell[n];
    r.vbar = n == 0 ? std::sqrt(fubini_metric(grid.u[0], grid.udot[0], grid.omega0, grid.alpha0)) : r.ell / r.tau;
    const QslTime t = qsl_time(r.L_B, r.ell, r.tau);
    r.tau_qsl = t.tau_qsl;
    r.ratio = t.ratio;
    r.L_B_red = reduced_bures_angle(grid.u[n]);
    r.ell_red = paths.ell_red[n];
    r.ratio_red = qsl_time(r.L_B_red, r.ell_red, r.tau).ratio;
    r.ratio_hybrid = hybrid_qsl(r.L_B, r.ell_red, r.tau).ratio;
    return r;
}

inline QslReport qsl_report(const AmplitudeGrid& grid, double tau) {
    return qsl_report(grid, path_lengths(grid), grid.index_of(tau));
}

inline std::vector<QslReport> qsl_series(const AmplitudeGrid& grid, const std::vector<double>& taus) {
    const PathLengths paths = path_lengths(grid);
    std::vector<QslReport> out;
    out.reserve(taus.size());
    for (double tau : taus) out.push_back(qsl_report(grid, paths, grid.index_of(tau)));
    return out;
}

// Long-time speed C from u(∞) = Z e^{−iE_b t}: C² = Z²[α(0) + E_b²]/2 − Z⁴(ω0/2 − E_b)².
inline double asymptotic_speed_squared(const BoundStateInfo& info, double alpha0, double omega0) {
    if (!info.exists) throw StateError("asymptotic speed requires a bound state");
    const double z2 = info.Z * info.Z;
    const double d = 0.5 * omega0 - info.E_b;
    return 0.5 * z2 * (alpha0 + info.E_b * info.E_b) - z2 * z2 * d * d;
}

inline double asymptotic_speed(const BoundStateInfo& info, double alpha0, double omega0) {
    const double c2 = asymptotic_speed_squared(info, alpha0, omega0);
    if (!(c2 > 0.0)) throw ParameterError("asymptotic speed: C^2 = " + std::to_string(c2) + " is not positive");
    return std::sqrt(c2);
}

inline double asymptotic_ratio(const BoundStateInfo& info, double alpha0, double omega0, double tau) {
    const double c = asymptotic_speed(info, alpha0, omega0);
    const double radicand = 1.0 + info.Z * info.Z + 2.0 * info.Z * std::cos(info.E_b * tau);
    const double overlap = std::sqrt(std::max(radicand, 0.0)) / 2.0;
    return std::acos(std::min(overlap, 1.0)) / (c * tau);
}

// Closed-system reference for the initial state cos(θ/2)|g⟩ + sin(θ/2)|e⟩.
struct IdealReference {
    double L_B{0.0};
    double vbar{0.0};
    double tau_qsl{0.0};
    double ratio{1.0};
};

inline IdealReference ideal_reference(double omega0, double tau, double theta = std::numbers::pi / 2.0) {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    const cplx overlap = c * c + s * s * std::polar(1.0, -omega0 * tau);
    IdealReference r;
    r.L_B = std::acos(std::min(std::abs(overlap), 1.0));
    r.vbar = 0.5 * omega0 * std::sin(theta);
    const double ell = r.vbar * tau;
    const QslTime t = qsl_time(r.L_B, ell, tau);
    r.tau_qsl = t.tau_qsl;
    r.ratio = t.ratio;
    return r;
}

} // namespace qslab
