// kernel_solver.hpp — Volterra integro-differential solver for the decay amplitude
//
//   u̇(t) + iω0 u(t) + ∫_0^t α(t−s) u(s) ds = 0,   u(0) = 1.
//
// The free rotation is removed exactly, u = e^{−iω0 t} v, so the stepper only sees the
// memory term v̇ = −∫ β(t−s) v(s) ds with β(τ) = α(τ) e^{iω0 τ}. Steps are predictor–corrector
// (Euler predictor, one trapezoidal correction). The history convolution is O(N²).

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "qslab/errors.hpp"
#include "qslab/parallel.hpp"
#include "qslab/quadrature.hpp"
#include "qslab/spectral.hpp"

namespace qslab {

enum class MemoryRule {
    // v linear on each step, kernel integrated exactly against it (8-point Gauss-Legendre per step)
    product_trapezoid,
    // plain composite trapezoid on kernel samples
    trapezoid,
};

struct SolverOptions {
    MemoryRule rule{MemoryRule::product_trapezoid};
    std::size_t jobs{1};                  // threads for kernel tabulation
    std::size_t max_steps{10'000'000};    // grid cap
    double blowup_threshold{1e-3};        // |u| > 1 + threshold flags an unstable step size
};

inline constexpr double default_dt = 0.01;

struct AmplitudeGrid {
    double dt{0.0};
    double t_max{0.0};
    double omega0{1.0};
    double alpha0{0.0};
    std::vector<cplx> u;
    std::vector<cplx> udot;

    std::size_t size() const noexcept { return u.size(); }
    std::size_t steps() const noexcept { return u.empty() ? 0 : u.size() - 1; }
    double time(std::size_t n) const noexcept { return static_cast<double>(n) * dt; }
    // Nearest grid index to time t.
    std::size_t index_of(double t) const {
        const double k = std::round(t / dt);
        if (k < 0.0 || k > static_cast<double>(steps())) throw DomainError("time outside amplitude grid");
        return static_cast<std::size_t>(k);
    }
};

// Per-lag weights of the memory convolution. For a step of width dt ending m steps after
// the segment start, a[m] multiplies the segment's left node and b[m] its right node.
struct KernelMoments {
    double dt{0.0};
    std::vector<cplx> a; // index 1..N
    std::vector<cplx> b; // index 1..N
};

inline std::size_t step_count(double t_max, double dt, const SolverOptions& opt) {
    if (!(dt > 0.0)) throw DomainError("solver: dt must be > 0");
    if (!(t_max >= dt)) throw DomainError("solver: t_max must be >= dt");
    const double steps = std::ceil(t_max / dt - 1e-9);
    if (steps > static_cast<double>(opt.max_steps)) {
        throw SizeError("solver: " + std::to_string(static_cast<long long>(steps)) +
                        " steps exceeds the grid cap of " + std::to_string(opt.max_steps));
    }
    return static_cast<std::size_t>(steps);
}

template <class Kernel>
KernelMoments kernel_moments(const Kernel& kernel, double omega0, double dt, std::size_t n_steps,
                             const SolverOptions& opt = {}) {
    auto beta = [&](double tau) { return kernel(tau) * std::polar(1.0, omega0 * tau); };
    KernelMoments km;
    km.dt = dt;
    km.a.assign(n_steps + 1, cplx{});
    km.b.assign(n_steps + 1, cplx{});
    constexpr std::size_t chunk = 2048;
    const std::size_t n_chunks = (n_steps + chunk - 1) / chunk;
    parallel_map(n_chunks, opt.jobs, [&](std::size_t c) {
        const std::size_t lo = 1 + c * chunk;
        const std::size_t hi = std::min(n_steps, lo + chunk - 1);
        for (std::size_t m = lo; m <= hi; ++m) {
            const double end = static_cast<double>(m) * dt;
            if (opt.rule == MemoryRule::trapezoid) {
                km.a[m] = 0.5 * dt * beta(end);
                km.b[m] = 0.5 * dt * beta(end - dt);
                continue;
            }
            cplx left{}, right{};
            for (std::size_t q = 0; q < quad::GaussLegendre8::nodes.size(); ++q) {
                const double frac = 0.5 * (1.0 + quad::GaussLegendre8::nodes[q]); // x/dt
                const cplx value = beta(end - frac * dt) * (0.5 * dt * quad::GaussLegendre8::weights[q]);
                left += value * (1.0 - frac);
                right += value * frac;
            }
            km.a[m] = left;
            km.b[m] = right;
        }
        return 0;
    });
    return km;
}

// Core stepper on precomputed moments. kernel_at_zero is α(0), stored for the metric.
inline AmplitudeGrid solve_with_moments(const KernelMoments& km, double kernel_at_zero, double omega0,
                                        std::size_t n_steps, const SolverOptions& opt = {}) {
    const double dt = km.dt;
    const std::size_t N = n_steps;

    // Interior weights w_m = a_m + b_{m+1}, stored reversed so the history sum runs forward.
    std::vector<double> wr_re(N + 1, 0.0), wr_im(N + 1, 0.0);
    for (std::size_t m = 1; m + 1 <= N; ++m) {
        const cplx w = km.a[m] + km.b[m + 1];
        wr_re[N - m] = w.real();
        wr_im[N - m] = w.imag();
    }
    std::vector<double> vr(N + 1, 0.0), vi(N + 1, 0.0);
    std::vector<cplx> mem(N + 1, cplx{});
    vr[0] = 1.0;
    const cplx b1 = N >= 1 ? km.b[1] : cplx{};
    const double limit = 1.0 + opt.blowup_threshold;

    for (std::size_t n = 0; n < N; ++n) {
        // S = a_{n+1} v_0 + Σ_{j=1}^{n} w_{n+1−j} v_j
        double sr = 0.0, si = 0.0;
        const double* wre = wr_re.data() + (N - n - 1);
        const double* wim = wr_im.data() + (N - n - 1);
        const double* pvr = vr.data();
        const double* pvi = vi.data();
#pragma omp simd reduction(+ : sr, si)
        for (std::size_t j = 1; j <= n; ++j) {
            sr += wre[j] * pvr[j] - wim[j] * pvi[j];
            si += wre[j] * pvi[j] + wim[j] * pvr[j];
        }
        const cplx history = cplx(sr, si) + km.a[n + 1] * cplx(vr[0], vi[0]);
        const cplx vn(vr[n], vi[n]);
        const cplx fn = -mem[n];
        const cplx predicted = vn + dt * fn;
        const cplx mem_pred = history + b1 * predicted;
        const cplx next = vn + 0.5 * dt * (fn - mem_pred);
        if (!(std::abs(next) <= limit)) {
            throw StepSizeError("solver: |u| exceeded 1+" + std::to_string(opt.blowup_threshold) + " at t=" +
                                std::to_string(static_cast<double>(n + 1) * dt) + "; dt=" + std::to_string(dt) +
                                " is too large for this kernel");
        }
        vr[n + 1] = next.real();
        vi[n + 1] = next.imag();
        mem[n + 1] = history + b1 * next;
    }

    AmplitudeGrid g;
    g.dt = dt;
    g.t_max = static_cast<double>(N) * dt;
    g.omega0 = omega0;
    g.alpha0 = kernel_at_zero;
    g.u.resize(N + 1);
    g.udot.resize(N + 1);
    for (std::size_t n = 0; n <= N; ++n) {
        const cplx phase = std::polar(1.0, -omega0 * static_cast<double>(n) * dt);
        g.u[n] = cplx(vr[n], vi[n]) * phase;
        g.udot[n] = cplx(0.0, -omega0) * g.u[n] - mem[n] * phase;
    }
    return g;
}

// Generic entry point: any kernel callable double -> complex.
template <class Kernel>
AmplitudeGrid solve_u_kernel(const Kernel& kernel, double kernel_at_zero, double omega0, double t_max, double dt,
                             const SolverOptions& opt = {}) {
    const std::size_t N = step_count(t_max, dt, opt);
    const KernelMoments km = kernel_moments(kernel, omega0, dt, N, opt);
    return solve_with_moments(km, kernel_at_zero, omega0, N, opt);
}

inline AmplitudeGrid solve_u(const SpectralDensity& sd, double omega0, double t_max, double dt = default_dt,
                             const SolverOptions& opt = {}) {
    sd.validate();
    const ClosedFormKernel kernel{sd};
    return solve_u_kernel(kernel, kernel.at_zero(), omega0, t_max, dt, opt);
}

// Trapezoidal estimate of ∫_0^{t_n} α(t_n − s) u(s) ds from kernel samples on the same grid.
inline cplx memory_integral(const std::vector<cplx>& u, const CorrelationFunction& alpha, std::size_t n) {
    if (n >= u.size() || n >= alpha.size()) throw DomainError("memory_integral: index outside grid");
    if (n == 0) return cplx{};
    cplx sum = 0.5 * (alpha[n] * u[0] + alpha[0] * u[n]);
    for (std::size_t j = 1; j < n; ++j) sum += alpha[n - j] * u[j];
    return alpha.dt * sum;
}

inline cplx memory_integral(const AmplitudeGrid& grid, const CorrelationFunction& alpha, std::size_t n) {
    return memory_integral(grid.u, alpha, n);
}

struct ConvergenceReport {
    double order{0.0};        // log2(r − 1), r = err(dt)/err(dt/2)
    double naive_order{0.0};  // log2(r)
    double err_coarse{0.0};   // max|u_dt − u_{dt/4}|
    double err_fine{0.0};     // max|u_{dt/2} − u_{dt/4}|
    bool exact_regime{false}; // errors at the roundoff floor; order undefined
};

// Three-run self-convergence study. Both error measures use the dt/4 run as reference,
// which biases them by (1 − 4^{−p}) and (2^{−p} − 4^{−p}); their ratio is then exactly
// 2^p + 1, hence order = log2(r − 1).
inline ConvergenceReport convergence_order(const SpectralDensity& sd, double omega0, double t_max,
                                           double dt = default_dt, const SolverOptions& opt = {}) {
    if (!(t_max >= 10.0)) throw DomainError("convergence_order: t_max must be >= 10");
    const AmplitudeGrid g1 = solve_u(sd, omega0, t_max, dt, opt);
    const AmplitudeGrid g2 = solve_u(sd, omega0, t_max, dt / 2.0, opt);
    const AmplitudeGrid g4 = solve_u(sd, omega0, t_max, dt / 4.0, opt);
    ConvergenceReport rep;
    for (std::size_t n = 0; n < g1.size(); ++n) {
        rep.err_coarse = std::max(rep.err_coarse, std::abs(g1.u[n] - g4.u[4 * n]));
        rep.err_fine = std::max(rep.err_fine, std::abs(g2.u[2 * n] - g4.u[4 * n]));
    }
    const double floor = 1e-13;
    if (rep.err_coarse < floor && rep.err_fine < floor) {
        rep.exact_regime = true;
        rep.order = std::numeric_limits<double>::quiet_NaN();
        rep.naive_order = rep.order;
        return rep;
    }
    const double r = rep.err_coarse / rep.err_fine;
    if (!(rep.err_fine < rep.err_coarse) || !(r > 2.0)) {
        throw DiagnosticsError("convergence_order: non-monotone errors err(dt)=" + std::to_string(rep.err_coarse) +
                               " err(dt/2)=" + std::to_string(rep.err_fine));
    }
    rep.naive_order = std::log2(r);
    rep.order = std::log2(r - 1.0);
    return rep;
}

} // namespace qslab
