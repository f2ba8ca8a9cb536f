// trajectory.hpp — Brute-force cross-checks of the amplitude equation
//
// (a) Exact unitary evolution of the discretized system+bath in the single-excitation sector.
// (b) Linear quantum-state-diffusion trajectories driven by colored noise built from the same
//     discrete modes, averaged into a reduced density matrix.
// Both start from (|g⟩ + |e⟩)/√2 with the bath in vacuum.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qslab/bound_state.hpp"
#include "qslab/discrete_bath.hpp"
#include "qslab/errors.hpp"
#include "qslab/kernel_solver.hpp"
#include "qslab/parallel.hpp"
#include "qslab/spectral.hpp"

namespace qslab {

inline constexpr double inv_sqrt2 = 0.70710678118654752440;

// ---------------------------------------------------------------------------
// Deterministic oracle

struct TotalStateEvolution {
    double dt{0.0};
    std::vector<cplx> c_e; // excited amplitude; c_g stays 1/√2
    double norm_drift{0.0};

    // ⟨ψ(0)|ψ(t_n)⟩
    cplx overlap(std::size_t n) const { return 0.5 + inv_sqrt2 * c_e[n]; }
    double bures_angle(std::size_t n) const { return std::acos(std::min(std::abs(overlap(n)), 1.0)); }
};

// The single-excitation Hamiltonian is diagonalized once, so the propagator is exact and
// unitary at any dt. c_e(t) = Σ_j |V_0j|² e^{−iλ_j t} / √2.
inline TotalStateEvolution evolve_single_excitation(const DiscreteBath& bath, double omega0, double t_max, double dt) {
    if (!(dt > 0.0) || !(t_max >= 0.0)) throw DomainError("evolve_single_excitation: need dt > 0 and t_max >= 0");
    const auto n = static_cast<Eigen::Index>(bath.n_modes());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n + 1, n + 1);
    h(0, 0) = omega0;
    for (Eigen::Index k = 0; k < n; ++k) {
        h(k + 1, k + 1) = bath.omegas[static_cast<std::size_t>(k)];
        h(0, k + 1) = h(k + 1, 0) = bath.couplings[static_cast<std::size_t>(k)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success) throw NumericalError("evolve_single_excitation: eigensolver failed");
    const Eigen::VectorXd lambda = solver.eigenvalues();
    const Eigen::VectorXd weight = solver.eigenvectors().row(0).transpose().cwiseAbs2();

    TotalStateEvolution out;
    out.dt = dt;
    out.norm_drift = std::abs(weight.sum() - 1.0);
    if (out.norm_drift > 1e-6) {
        throw NumericalError("evolve_single_excitation: norm drift " + std::to_string(out.norm_drift));
    }
    const auto steps = static_cast<std::size_t>(std::llround(t_max / dt));
    out.c_e.resize(steps + 1);
    for (std::size_t m = 0; m <= steps; ++m) {
        const double t = static_cast<double>(m) * dt;
        cplx sum{};
        for (Eigen::Index j = 0; j <= n; ++j) sum += weight(j) * std::polar(1.0, -lambda(j) * t);
        out.c_e[m] = inv_sqrt2 * sum;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Noise
//
// Stream for (seed, trajectory i): key = mix(seed ^ mix(i + γ)), and the j-th 64-bit word is
// mix(key + (j+1)·γ), a SplitMix64 counter. Equal seeds give equal streams on every platform.

namespace rng {

inline constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class CounterStream {
public:
    CounterStream(std::uint64_t seed, std::uint64_t index) noexcept : key_(mix(seed ^ mix(index + golden))) {}

    std::uint64_t next() noexcept { return mix(key_ + (++counter_) * golden); }

    // Uniform on (0, 1]; never 0 so logarithms stay finite.
    double uniform() noexcept { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

    // Complex Gaussian with density e^{−|z|²}/π: |z|² is Exp(1), phase uniform.
    cplx complex_gaussian() noexcept {
        const double r = std::sqrt(-std::log(uniform()));
        return std::polar(r, 2.0 * std::numbers::pi * uniform());
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_{0};
};

} // namespace rng

// One draw of the mode variables z_k. The process is z_t = −i Σ g_k z_k e^{−iω_k t}, so that
// M{z_t z̄_s} = Σ g_k² e^{−iω_k(t−s)} and M{z_t z_s} = 0.
struct NoiseRealization {
    std::uint64_t seed{0};
    std::uint64_t index{0};
    std::vector<cplx> z;

    cplx z_t(const DiscreteBath& bath, double t) const {
        cplx sum{};
        for (std::size_t k = 0; k < z.size(); ++k) sum += bath.couplings[k] * z[k] * std::polar(1.0, -bath.omegas[k] * t);
        return cplx(0.0, -1.0) * sum;
    }
    cplx z_bar_t(const DiscreteBath& bath, double t) const { return std::conj(z_t(bath, t)); }
};

inline NoiseRealization draw_noise(std::size_t n_modes, std::uint64_t seed, std::uint64_t index) {
    NoiseRealization noise{seed, index, std::vector<cplx>(n_modes)};
    rng::CounterStream stream(seed, index);
    for (auto& z : noise.z) z = stream.complex_gaussian();
    return noise;
}

struct NoiseStatistics {
    std::vector<double> times;
    std::vector<cplx> mean;  // M{z_t}
    Eigen::MatrixXcd cov;    // M{z_t z̄_s}
    Eigen::MatrixXcd pseudo; // M{z_t z_s}
    std::size_t n_traj{0};
};

inline Eigen::MatrixXcd noise_phase_matrix(const DiscreteBath& bath, const std::vector<double>& times) {
    const auto n = static_cast<Eigen::Index>(bath.n_modes());
    Eigen::MatrixXcd e(n, static_cast<Eigen::Index>(times.size()));
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index r = 0; r < e.cols(); ++r)
            e(k, r) = cplx(0.0, -1.0) * bath.couplings[static_cast<std::size_t>(k)] *
                      std::polar(1.0, -bath.omegas[static_cast<std::size_t>(k)] * times[static_cast<std::size_t>(r)]);
    return e;
}

inline constexpr std::size_t trajectory_batch = 256;

inline Eigen::MatrixXcd draw_noise_batch(std::size_t n_modes, std::uint64_t seed, std::size_t first, std::size_t count) {
    Eigen::MatrixXcd z(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(n_modes));
    for (std::size_t i = 0; i < count; ++i) {
        rng::CounterStream stream(seed, first + i);
        for (std::size_t k = 0; k < n_modes; ++k)
            z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = stream.complex_gaussian();
    }
    return z;
}

inline NoiseStatistics noise_statistics(const DiscreteBath& bath, const std::vector<double>& times, std::size_t n_traj,
                                        std::uint64_t seed, std::size_t jobs = 1) {
    const Eigen::MatrixXcd phase = noise_phase_matrix(bath, times);
    const auto T = static_cast<Eigen::Index>(times.size());
    const std::size_t n_batches = (n_traj + trajectory_batch - 1) / trajectory_batch;
    struct Partial {
        Eigen::VectorXcd sum;
        Eigen::MatrixXcd cov, pseudo;
    };
    auto partials = parallel_map(n_batches, jobs, [&](std::size_t b) {
        const std::size_t first = b * trajectory_batch;
        const std::size_t count = std::min(trajectory_batch, n_traj - first);
        const Eigen::MatrixXcd zt = draw_noise_batch(bath.n_modes(), seed, first, count) * phase; // count × T
        return Partial{zt.colwise().sum().transpose(), zt.transpose() * zt.conjugate(), zt.transpose() * zt};
    });
    NoiseStatistics stats;
    stats.times = times;
    stats.n_traj = n_traj;
    Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(T);
    stats.cov = Eigen::MatrixXcd::Zero(T, T);
    stats.pseudo = Eigen::MatrixXcd::Zero(T, T);
    for (const auto& p : partials) { // fixed batch order keeps the fold reproducible
        sum += p.sum;
        stats.cov += p.cov;
        stats.pseudo += p.pseudo;
    }
    const double inv = 1.0 / static_cast<double>(n_traj);
    stats.mean.resize(times.size());
    for (Eigen::Index r = 0; r < T; ++r) stats.mean[static_cast<std::size_t>(r)] = sum(r) * inv;
    stats.cov *= inv;
    stats.pseudo *= inv;
    return stats;
}

// ---------------------------------------------------------------------------
// Stochastic trajectories
//
// With the O-operator F(t)σ₋, F = −iω0 − u̇/u, the linear QSD equation
//   ψ̇ = [−iω0 σ₊σ₋ − F σ₊σ₋ + z̄_t σ₋] ψ
// gives c_e = u/√2 for every noise draw and c_g(t) = [1 + ∫_0^t z̄_s u(s) ds]/√2.
// Expanding z̄_s in modes turns the noise integral into Σ_k i g_k z̄_k I_k(t) with
// I_k(t) = ∫_0^t e^{iω_k s} u(s) ds, which is integrated exactly for piecewise-linear u.

inline cplx o_operator_coefficient(const AmplitudeGrid& grid, std::size_t n) {
    if (std::abs(grid.u[n]) <= 1e-12) {
        throw NumericalError("O-operator undefined: |u| underflow at t=" + std::to_string(grid.time(n)));
    }
    return cplx(0.0, -grid.omega0) - grid.udot[n] / grid.u[n];
}

namespace detail {

// ∫_0^1 e^{θx}(1−x) dx and ∫_0^1 e^{θx} x dx
inline void linear_phase_weights(cplx theta, cplx& w0, cplx& w1) {
    if (std::abs(theta) < 1e-2) {
        cplx p = 1.0, s0{}, s1{};
        double fact = 1.0;
        for (int m = 0; m < 8; ++m) {
            // ∫ x^m(1−x) = 1/((m+1)(m+2)), ∫ x^{m+1} = 1/(m+2)
            s0 += p / (fact * (m + 1.0) * (m + 2.0));
            s1 += p / (fact * (m + 2.0));
            p *= theta;
            fact *= (m + 1.0);
        }
        w0 = s0;
        w1 = s1;
        return;
    }
    const cplx e = std::exp(theta);
    w0 = (e - 1.0 - theta) / (theta * theta);
    w1 = (theta * e - e + 1.0) / (theta * theta);
}

} // namespace detail

// I_k(t_r) for every mode k and recorded grid index r; returned as n_modes × n_records.
inline Eigen::MatrixXcd mode_integrals(const DiscreteBath& bath, const AmplitudeGrid& grid,
                                       const std::vector<std::size_t>& records, std::size_t jobs = 1) {
    const std::size_t n = bath.n_modes();
    const std::size_t last = records.empty() ? 0 : *std::max_element(records.begin(), records.end());
    if (last >= grid.size()) throw DomainError("mode_integrals: record index outside amplitude grid");
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(records.size()));
    auto rows = parallel_map(n, jobs, [&](std::size_t k) {
        const double w = bath.omegas[k];
        cplx w0, w1;
        detail::linear_phase_weights(cplx(0.0, w * grid.dt), w0, w1);
        std::vector<cplx> acc(last + 1);
        acc[0] = 0.0;
        for (std::size_t m = 0; m < last; ++m) {
            const cplx phase = std::polar(1.0, w * grid.time(m));
            acc[m + 1] = acc[m] + grid.dt * phase * (w0 * grid.u[m] + w1 * grid.u[m + 1]);
        }
        std::vector<cplx> row(records.size());
        for (std::size_t r = 0; r < records.size(); ++r) row[r] = acc[records[r]];
        return row;
    });
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t r = 0; r < records.size(); ++r)
            out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(r)) = rows[k][r];
    return out;
}

struct Trajectory {
    std::uint64_t seed{0};
    std::uint64_t index{0};
    std::vector<double> times;
    std::vector<cplx> c_e;
    std::vector<cplx> c_g;

    double norm(std::size_t r) const { return std::norm(c_e[r]) + std::norm(c_g[r]); }
};

inline std::vector<std::size_t> record_indices(const AmplitudeGrid& grid, const std::vector<double>& times) {
    std::vector<std::size_t> idx;
    idx.reserve(times.size());
    for (double t : times) idx.push_back(grid.index_of(t));
    return idx;
}

inline void require_nonvanishing(const AmplitudeGrid& grid, std::size_t last) {
    for (std::size_t n = 0; n <= last; ++n)
        if (std::abs(grid.u[n]) <= 1e-12)
            throw NumericalError("stochastic trajectory: |u| underflow at t=" + std::to_string(grid.time(n)));
}

inline Trajectory stochastic_trajectory(const DiscreteBath& bath, const AmplitudeGrid& grid,
                                        const std::vector<double>& record_times, std::uint64_t seed,
                                        std::uint64_t index = 0) {
    const auto records = record_indices(grid, record_times);
    if (!records.empty()) require_nonvanishing(grid, *std::max_element(records.begin(), records.end()));
    const NoiseRealization noise = draw_noise(bath.n_modes(), seed, index);
    const Eigen::MatrixXcd integrals = mode_integrals(bath, grid, records);
    Trajectory tr{seed, index, record_times, {}, {}};
    for (std::size_t r = 0; r < records.size(); ++r) {
        cplx sum{};
        for (std::size_t k = 0; k < bath.n_modes(); ++k)
            sum += bath.couplings[k] * std::conj(noise.z[k]) * integrals(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(r));
        tr.c_e.push_back(inv_sqrt2 * grid.u[records[r]]);
        tr.c_g.push_back(inv_sqrt2 * (1.0 + cplx(0.0, 1.0) * sum));
    }
    return tr;
}

struct DensityMatrix {
    double ee{0.0};
    double gg{0.0};
    cplx eg{};

    double trace() const { return ee + gg; }
    double purity() const { return ee * ee + gg * gg + 2.0 * std::norm(eg); }
    // Smallest eigenvalue of the Hermitian 2×2 matrix.
    double min_eigenvalue() const {
        const double mean = 0.5 * (ee + gg);
        const double half_gap = std::sqrt(0.25 * (ee - gg) * (ee - gg) + std::norm(eg));
        return mean - half_gap;
    }
};

struct EnsembleAverage {
    std::vector<double> times;
    std::vector<DensityMatrix> rho;
    std::size_t n_traj{0};
};

inline EnsembleAverage ensemble_average(const std::vector<Trajectory>& trajectories) {
    if (trajectories.size() < 100) throw DomainError("ensemble_average: need at least 100 trajectories");
    EnsembleAverage avg;
    avg.times = trajectories.front().times;
    avg.n_traj = trajectories.size();
    avg.rho.assign(avg.times.size(), {});
    const double inv = 1.0 / static_cast<double>(trajectories.size());
    for (const auto& tr : trajectories) {
        for (std::size_t r = 0; r < avg.times.size(); ++r) {
            avg.rho[r].ee += std::norm(tr.c_e[r]) * inv;
            avg.rho[r].gg += std::norm(tr.c_g[r]) * inv;
            avg.rho[r].eg += tr.c_e[r] * std::conj(tr.c_g[r]) * inv;
        }
    }
    return avg;
}

// Batched ensemble: draws trajectories [0, n_traj) in blocks and contracts the noise
// against the mode integrals with one complex GEMM per block. Partial sums are folded in
// block order, so the result does not depend on `jobs`.
inline EnsembleAverage ensemble_average(const DiscreteBath& bath, const AmplitudeGrid& grid,
                                        const std::vector<double>& record_times, std::size_t n_traj,
                                        std::uint64_t seed, std::size_t jobs = 1) {
    if (n_traj < 100) throw DomainError("ensemble_average: need at least 100 trajectories");
    const auto records = record_indices(grid, record_times);
    if (!records.empty()) require_nonvanishing(grid, *std::max_element(records.begin(), records.end()));
    const Eigen::MatrixXcd integrals = mode_integrals(bath, grid, records, jobs);
    Eigen::VectorXcd coupling(static_cast<Eigen::Index>(bath.n_modes()));
    for (std::size_t k = 0; k < bath.n_modes(); ++k) coupling(static_cast<Eigen::Index>(k)) = bath.couplings[k];
    const Eigen::MatrixXcd weighted = coupling.asDiagonal() * integrals; // n_modes × T
    const auto T = static_cast<Eigen::Index>(records.size());

    struct Partial {
        Eigen::VectorXd gg;
        Eigen::VectorXcd cg_conj;
    };
    const std::size_t n_batches = (n_traj + trajectory_batch - 1) / trajectory_batch;
    auto partials = parallel_map(n_batches, jobs, [&](std::size_t b) {
        const std::size_t first = b * trajectory_batch;
        const std::size_t count = std::min(trajectory_batch, n_traj - first);
        const Eigen::MatrixXcd zbar = draw_noise_batch(bath.n_modes(), seed, first, count).conjugate();
        const Eigen::MatrixXcd cg =
            (Eigen::MatrixXcd::Ones(static_cast<Eigen::Index>(count), T) + cplx(0.0, 1.0) * (zbar * weighted)) *
            inv_sqrt2;
        return Partial{cg.cwiseAbs2().colwise().sum().transpose(), cg.conjugate().colwise().sum().transpose()};
    });
    Eigen::VectorXd gg = Eigen::VectorXd::Zero(T);
    Eigen::VectorXcd cg_conj = Eigen::VectorXcd::Zero(T);
    for (const auto& p : partials) {
        gg += p.gg;
        cg_conj += p.cg_conj;
    }
    const double inv = 1.0 / static_cast<double>(n_traj);
    EnsembleAverage avg;
    avg.times = record_times;
    avg.n_traj = n_traj;
    avg.rho.resize(records.size());
    for (std::size_t r = 0; r < records.size(); ++r) {
        const cplx ce = inv_sqrt2 * grid.u[records[r]];
        avg.rho[r].ee = std::norm(ce);
        avg.rho[r].gg = gg(static_cast<Eigen::Index>(r)) * inv;
        avg.rho[r].eg = ce * cg_conj(static_cast<Eigen::Index>(r)) * inv;
    }
    return avg;
}

// Master-equation solution for the (|g⟩ + |e⟩)/√2 initial state.
inline DensityMatrix reduced_state_from_u(const AmplitudeGrid& grid, double t) {
    const cplx u = grid.u[grid.index_of(t)];
    return {0.5 * std::norm(u), 1.0 - 0.5 * std::norm(u), 0.5 * u};
}

} // namespace qslab
