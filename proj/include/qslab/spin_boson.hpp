// spin_boson.hpp — Unbiased spin-boson model through the variational polaron transformation
//
// The dressed model has gap ΘΔ and couplings g_k ΘΔ/(ω_k + ΘΔ), i.e. the filtered density
//   J̃(ω) = J(ω) (ΘΔ/(ω + ΘΔ))²,
// and then has the same single-excitation structure as the two-level decay problem.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "qslab/bound_state.hpp"
#include "qslab/errors.hpp"
#include "qslab/kernel_solver.hpp"
#include "qslab/qsl.hpp"
#include "qslab/quadrature.hpp"
#include "qslab/spectral.hpp"

namespace qslab {

struct PolaronParams {
    double theta{1.0};
    double delta{1.0};
    double effective_gap{1.0}; // ΘΔ
    double residual{0.0};      // |Θ − exp(−½∫J/(ω+ΘΔ)²)|
    std::size_t iterations{0};
};

inline quad::Options polaron_quadrature() { return {1e-15, 1e-14, 20000}; }

// exp(−½ ∫ J(ω)/(ω + ΘΔ)² dω)
inline double theta_map(const SpectralDensity& sd, double delta, double theta) {
    if (sd.eta == 0.0) return 1.0;
    const double gap = theta * delta;
    const double integral =
        quad::integrate_half_line([&](double w) { return sd(w) / ((w + gap) * (w + gap)); }, sd.omega_c,
                                  polaron_quadrature())
            .value;
    return std::exp(-0.5 * integral);
}

inline PolaronParams make_polaron(const SpectralDensity& sd, double delta, double theta, std::size_t iterations) {
    return {theta, delta, theta * delta, std::abs(theta - theta_map(sd, delta, theta)), iterations};
}

// Damped fixed point Θ ← (1−λ)Θ + λ·map(Θ) from Θ = 1. Past the strong-coupling collapse
// the only fixed point is Θ = 0; iterates sliding below theta_collapse_floor are reported as such
// rather than returned as a converged gap.
inline constexpr double theta_collapse_floor = 1e-8;

inline PolaronParams solve_theta(const SpectralDensity& sd, double delta, double damping = 0.5,
                                 std::size_t max_iter = 10'000) {
    sd.validate();
    if (!(delta > 0.0)) throw DomainError("solve_theta: delta must be > 0");
    double theta = 1.0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        const double next = (1.0 - damping) * theta + damping * theta_map(sd, delta, theta);
        if (!(next > 0.0)) throw IterationError("solve_theta: iterate left (0, 1]", theta, next);
        if (next < theta_collapse_floor)
            throw IterationError("solve_theta: collapsed toward 0 (variational ansatz breakdown)", theta, next);
        if (std::abs(next - theta) < 1e-13) return make_polaron(sd, delta, next, it);
        if (it == max_iter) throw IterationError("solve_theta: no convergence", theta, next);
        theta = next;
    }
    throw IterationError("solve_theta: no iterations", theta, theta);
}

// Independent root of G(Θ) = Θ − map(Θ): walk down from Θ = 1 until G changes sign, then bisect.
// For s ≤ 1 the map vanishes as Θ → 0, so the walk stops at the largest nontrivial root.
inline PolaronParams theta_by_bisection(const SpectralDensity& sd, double delta) {
    auto G = [&](double th) { return th - theta_map(sd, delta, th); };
    double hi = 1.0;
    if (G(hi) <= 0.0) return make_polaron(sd, delta, 1.0, 0);
    double lo = hi;
    while (G(lo) > 0.0) {
        hi = lo;
        lo *= 0.9;
        if (lo < 1e-12) throw IterationError("theta_by_bisection: no sign change", hi, lo);
    }
    std::size_t it = 0;
    while (hi - lo > 1e-15 && it < 200) {
        const double mid = 0.5 * (lo + hi);
        (G(mid) > 0.0 ? hi : lo) = mid;
        ++it;
    }
    return make_polaron(sd, delta, 0.5 * (lo + hi), it);
}

struct FilteredDensity {
    SpectralDensity sd;
    double gap{1.0}; // ΘΔ

    double operator()(double w) const noexcept {
        const double f = gap / (gap + w);
        return sd(w) * f * f;
    }
    double scale() const noexcept { return sd.omega_c; }
};

// α̃(t) = ∫ J̃(ω) e^{−iωt} dω. Writing (ΘΔ/(ω+ΘΔ))² = (ΘΔ)² ∫_0^∞ x e^{−(ω+ΘΔ)x} dx and doing the
// ω integral in closed form leaves a smooth, non-oscillatory x integral:
//   α̃(t) = (ΘΔ)² ∫_0^∞ x e^{−ΘΔ x} α(t − ix) dx.
struct RenormalizedKernel {
    SpectralDensity sd;
    double gap{1.0};
    quad::Options opt{1e-13, 1e-12, 4000};

    cplx operator()(double t) const {
        if (sd.eta == 0.0) return {};
        const double prefactor = sd.eta * std::tgamma(sd.s + 1.0) * sd.omega_c * sd.omega_c;
        const double p = -(sd.s + 1.0);
        auto f = [&](double x) {
            return x * std::exp(-gap * x) * std::pow(cplx(1.0 + sd.omega_c * x, sd.omega_c * t), p);
        };
        return gap * gap * prefactor * quad::integrate_half_line(f, 1.0 / gap, opt).value;
    }
    double at_zero() const { return (*this)(0.0).real(); }
};

// Direct spectral quadrature of the same kernel; slow and oscillatory, kept as a cross-check.
inline cplx renormalized_kernel_spectral(const SpectralDensity& sd, const PolaronParams& p, double t) {
    const FilteredDensity j{sd, p.effective_gap};
    auto integrand = [&](double w) { return j(w) * std::polar(1.0, -w * t); };
    return quad::integrate_half_line(integrand, sd.omega_c, {1e-12, 1e-12, 200000}).value;
}

inline cplx renormalized_kernel(const SpectralDensity& sd, const PolaronParams& p, double t) {
    return RenormalizedKernel{sd, p.effective_gap}(t);
}

inline BoundStateInfo sbm_bound_state(const SpectralDensity& sd, const PolaronParams& p) {
    return find_bound_state(FilteredDensity{sd, p.effective_gap}, p.effective_gap);
}

struct SbmResult {
    PolaronParams polaron;
    BoundStateInfo bound;
    double alpha0{0.0}; // α̃(0)
    std::vector<QslReport> reports;
};

// Renormalized amplitude equation with (ΘΔ, α̃) handed to the generic solver and QSL pipeline.
inline SbmResult sbm_qsl_pipeline(const SpectralDensity& sd, double delta, const std::vector<double>& tau_grid,
                                  double dt = default_dt, const SolverOptions& opt = {}) {
    if (tau_grid.empty()) throw DomainError("sbm_qsl_pipeline: empty tau grid");
    SbmResult res;
    res.polaron = solve_theta(sd, delta);
    res.bound = sbm_bound_state(sd, res.polaron);
    const RenormalizedKernel kernel{sd, res.polaron.effective_gap};
    res.alpha0 = kernel.at_zero();
    double t_max = 0.0;
    for (double t : tau_grid) t_max = std::max(t_max, t);
    const AmplitudeGrid grid = solve_u_kernel(kernel, res.alpha0, res.polaron.effective_gap, t_max, dt, opt);
    res.reports = qsl_series(grid, tau_grid);
    return res;
}

} // namespace qslab
