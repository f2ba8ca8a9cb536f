#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qslab/discrete_bath.hpp"
#include "qslab/kernel_solver.hpp"
#include "qslab/qsl.hpp"
#include "qslab/trajectory.hpp"

using namespace qslab;

namespace {

const SpectralDensity fig_density{0.05, 1.0, 10.0};

} // namespace

// At ωc = 10 the band edge sits near Ω ≈ 170, so a horizon t needs about 27·t modes.
TEST(BuildBath, DecoupledBathHasZeroCouplings) {
    const DiscreteBath bath = build_bath({0.0, 1.0, 10.0}, 300, 10.0);
    for (double g : bath.couplings) EXPECT_EQ(g, 0.0);
}

// Midpoint sampling of J on the truncated band reproduces the total weight to about 1e-5
// relative here, so the weight check is pinned at 1e-4 absolute.
TEST(BuildBath, TotalWeightAndRecurrence) {
    const DiscreteBath bath = build_bath(fig_density, 2000, 50.0);
    EXPECT_NEAR(bath.total_weight(), 5.0, 1e-4);
    EXPECT_NEAR(bath.delta_omega, bath.omega_max / 2000.0, 1e-15);
    EXPECT_GT(bath.recurrence_time(), 50.0);
    EXPECT_NEAR(bath.omegas.front(), 0.5 * bath.delta_omega, 1e-15);
}

TEST(BuildBath, CorrelationApproachesContinuumKernel) {
    const DiscreteBath bath = build_bath(fig_density, 2000, 50.0);
    for (double t : {0.0, 0.3, 2.0, 20.0}) EXPECT_LT(std::abs(bath.correlation(t) - alpha_closed(fig_density, t)), 1e-3);
}

TEST(BuildBath, RejectsTooFewModes) {
    EXPECT_THROW(build_bath(fig_density, 50, 10.0), ConfigError);
    try {
        build_bath(fig_density, 200, 500.0);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("need n_modes >="), std::string::npos);
    }
}

TEST(EvolveSingleExcitation, DecoupledLevelRotates) {
    const DiscreteBath bath = build_bath({0.0, 1.0, 10.0}, 600, 20.0);
    const TotalStateEvolution ev = evolve_single_excitation(bath, 1.0, 20.0, 0.05);
    for (std::size_t n = 0; n < ev.c_e.size(); ++n)
        EXPECT_LT(std::abs(std::sqrt(2.0) * ev.c_e[n] - std::polar(1.0, -0.05 * static_cast<double>(n))), 1e-10);
}

TEST(EvolveSingleExcitation, AgreesWithVolterraSolver) {
    const DiscreteBath bath = build_bath(fig_density, 2000, 50.0);
    const TotalStateEvolution ev = evolve_single_excitation(bath, 1.0, 50.0, 0.01);
    const AmplitudeGrid g = solve_u(fig_density, 1.0, 50.0, 0.01);
    ASSERT_EQ(ev.c_e.size(), g.size());
    double worst_u = 0.0, worst_angle = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) {
        worst_u = std::max(worst_u, std::abs(std::sqrt(2.0) * ev.c_e[n] - g.u[n]));
        worst_angle = std::max(worst_angle, std::abs(ev.bures_angle(n) - bures_angle(g.u[n])));
    }
    EXPECT_LT(worst_u, 1e-3);
    EXPECT_LT(worst_angle, 1e-3);
    EXPECT_LT(ev.norm_drift, 1e-8);
}

TEST(CounterStream, SameSeedSameStream) {
    rng::CounterStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t x = a.next();
        EXPECT_EQ(x, b.next());
        EXPECT_NE(x, c.next());
        EXPECT_NE(x, d.next());
    }
}

TEST(CounterStream, ComplexGaussianMoments) {
    rng::CounterStream s(1, 0);
    const int n = 200000;
    cplx mean{}, pseudo{};
    double second = 0.0;
    for (int i = 0; i < n; ++i) {
        const cplx z = s.complex_gaussian();
        mean += z;
        pseudo += z * z;
        second += std::norm(z);
    }
    EXPECT_LT(std::abs(mean) / n, 5.0 / std::sqrt(n));
    EXPECT_LT(std::abs(pseudo) / n, 5.0 * std::sqrt(2.0 / n));
    EXPECT_NEAR(second / n, 1.0, 5.0 / std::sqrt(n));
}

TEST(NoiseStatistics, MatchesBathCorrelation) {
    const DiscreteBath bath = build_bath(fig_density, 600, 20.0);
    const std::vector<double> times{0.0, 1.0, 5.0, 10.0, 20.0};
    const std::size_t n = 10000;
    const NoiseStatistics st = noise_statistics(bath, times, n, 20240611, 4);
    const double a0 = alpha_zero(fig_density);
    const double tol = 5.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < times.size(); ++i) {
        EXPECT_LT(std::abs(st.mean[i]), tol * std::sqrt(a0));
        for (std::size_t j = 0; j < times.size(); ++j) {
            const auto r = static_cast<Eigen::Index>(i), c = static_cast<Eigen::Index>(j);
            EXPECT_LT(std::abs(st.cov(r, c) - bath.correlation(times[i] - times[j])), tol * a0);
            EXPECT_LT(std::abs(st.pseudo(r, c)), tol * a0);
        }
    }
}

TEST(NoiseStatistics, IndependentOfThreadCount) {
    const DiscreteBath bath = build_bath(fig_density, 300, 10.0);
    const NoiseStatistics a = noise_statistics(bath, {0.0, 3.0}, 1000, 5, 1);
    const NoiseStatistics b = noise_statistics(bath, {0.0, 3.0}, 1000, 5, 3);
    EXPECT_EQ(a.cov, b.cov);
    EXPECT_EQ(a.mean, b.mean);
}

TEST(NoiseRealization, BatchDrawMatchesSingleDraw) {
    const Eigen::MatrixXcd batch = draw_noise_batch(50, 9, 10, 3);
    for (std::size_t i = 0; i < 3; ++i) {
        const NoiseRealization single = draw_noise(50, 9, 10 + i);
        for (std::size_t k = 0; k < 50; ++k)
            EXPECT_EQ(batch(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)), single.z[k]);
    }
}

TEST(ModeIntegrals, AgreeWithFineTrapezoid) {
    const DiscreteBath bath = build_bath(fig_density, 300, 10.0);
    const AmplitudeGrid g = solve_u(fig_density, 1.0, 10.0, 0.01);
    const std::vector<std::size_t> records{0, 500, 1000};
    const Eigen::MatrixXcd I = mode_integrals(bath, g, records, 2);
    for (std::size_t k : {0u, 57u, 299u}) {
        EXPECT_EQ(I(static_cast<Eigen::Index>(k), 0), cplx{});
        // trapezoid on the product itself is second order in ω_k dt; compare with a loose bound
        cplx acc{};
        for (std::size_t m = 0; m < 1000; ++m) {
            const cplx f0 = std::polar(1.0, bath.omegas[k] * g.time(m)) * g.u[m];
            const cplx f1 = std::polar(1.0, bath.omegas[k] * g.time(m + 1)) * g.u[m + 1];
            acc += 0.5 * g.dt * (f0 + f1);
        }
        const double w = bath.omegas[k];
        EXPECT_LT(std::abs(I(static_cast<Eigen::Index>(k), 2) - acc), 1e-4 * (1.0 + w * w));
    }
}

TEST(ModeIntegrals, LinearPhaseSeriesMatchesClosedForm) {
    for (double x : {1e-3, 9e-3, 1.1e-2}) {
        cplx a0, a1;
        detail::linear_phase_weights(cplx(0.0, x), a0, a1);
        const cplx t(0.0, x), e = std::exp(t);
        EXPECT_LT(std::abs(a0 - (e - 1.0 - t) / (t * t)), 1e-9);
        EXPECT_LT(std::abs(a1 - (t * e - e + 1.0) / (t * t)), 1e-9);
    }
}

TEST(StochasticTrajectory, ExcitedAmplitudeIsNoiseFree) {
    const DiscreteBath bath = build_bath(fig_density, 600, 20.0);
    const AmplitudeGrid g = solve_u(fig_density, 1.0, 20.0, 0.01);
    const std::vector<double> times{0.0, 5.0, 10.0, 20.0};
    bool norm_changes = false;
    for (std::uint64_t i = 0; i < 5; ++i) {
        const Trajectory tr = stochastic_trajectory(bath, g, times, 77, i);
        EXPECT_EQ(tr.c_g[0], cplx(inv_sqrt2, 0.0));
        for (std::size_t r = 0; r < times.size(); ++r) {
            EXPECT_LT(std::abs(std::sqrt(2.0) * tr.c_e[r] - g.u[g.index_of(times[r])]), 1e-15);
            if (std::abs(tr.norm(r) - 1.0) > 1e-3) norm_changes = true;
        }
    }
    EXPECT_TRUE(norm_changes);
}

TEST(StochasticTrajectory, UnderflowIsReported) {
    AmplitudeGrid g = solve_u(fig_density, 1.0, 2.0, 0.01);
    g.u[100] = 0.0;
    const DiscreteBath bath = build_bath(fig_density, 200, 2.0);
    EXPECT_THROW(stochastic_trajectory(bath, g, {1.5}, 1), NumericalError);
    EXPECT_THROW(o_operator_coefficient(g, 100), NumericalError);
}

TEST(OOperator, NoiselessCoefficientVanishes) {
    const AmplitudeGrid g = solve_u({0.0, 1.0, 10.0}, 1.0, 5.0, 0.01);
    for (std::size_t n = 0; n < g.size(); n += 50) EXPECT_LT(std::abs(o_operator_coefficient(g, n)), 1e-9);
}

TEST(EnsembleAverage, ReproducesMasterEquation) {
    const DiscreteBath bath = build_bath(fig_density, 1000, 20.0);
    const AmplitudeGrid g = solve_u(fig_density, 1.0, 20.0, 0.01);
    const std::vector<double> times{0.0, 5.0, 10.0, 20.0};
    const std::size_t n = 10000;
    const EnsembleAverage avg = ensemble_average(bath, g, times, n, 20240611, 4);
    const double tol = 5.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t r = 0; r < times.size(); ++r) {
        const DensityMatrix exact = reduced_state_from_u(g, times[r]);
        const DensityMatrix& rho = avg.rho[r];
        EXPECT_NEAR(rho.ee, exact.ee, 1e-14);
        EXPECT_LT(std::abs(rho.eg - exact.eg), tol) << times[r];
        EXPECT_NEAR(rho.trace(), 1.0, tol);
        EXPECT_GE(rho.min_eigenvalue(), -tol);
        EXPECT_LE(rho.purity(), 1.0 + tol);
    }
}

TEST(EnsembleAverage, BatchedPathEqualsTrajectoryFold) {
    const DiscreteBath bath = build_bath(fig_density, 300, 10.0);
    const AmplitudeGrid g = solve_u(fig_density, 1.0, 10.0, 0.01);
    const std::vector<double> times{2.0, 10.0};
    std::vector<Trajectory> trs;
    for (std::uint64_t i = 0; i < 300; ++i) trs.push_back(stochastic_trajectory(bath, g, times, 3, i));
    const EnsembleAverage a = ensemble_average(trs);
    const EnsembleAverage b = ensemble_average(bath, g, times, 300, 3, 2);
    for (std::size_t r = 0; r < times.size(); ++r) {
        EXPECT_NEAR(a.rho[r].gg, b.rho[r].gg, 1e-12);
        EXPECT_LT(std::abs(a.rho[r].eg - b.rho[r].eg), 1e-12);
    }
}

TEST(EnsembleAverage, ReproducibleAcrossJobs) {
    const DiscreteBath bath = build_bath(fig_density, 300, 10.0);
    const AmplitudeGrid g = solve_u(fig_density, 1.0, 10.0, 0.01);
    const EnsembleAverage a = ensemble_average(bath, g, {5.0}, 1000, 11, 1);
    const EnsembleAverage b = ensemble_average(bath, g, {5.0}, 1000, 11, 4);
    EXPECT_EQ(a.rho[0].gg, b.rho[0].gg);
    EXPECT_EQ(a.rho[0].eg, b.rho[0].eg);
}

TEST(EnsembleAverage, NeedsEnoughTrajectories) {
    EXPECT_THROW(ensemble_average(std::vector<Trajectory>(10)), DomainError);
}

TEST(ReducedStateFromU, Examples) {
    const AmplitudeGrid g = solve_u({0.0, 1.0, 10.0}, 1.0, 10.0, 0.01);
    const DensityMatrix r0 = reduced_state_from_u(g, 0.0);
    EXPECT_EQ(r0.eg, cplx(0.5, 0.0));
    for (double t : {1.0, 4.0, 9.5}) EXPECT_NEAR(reduced_state_from_u(g, t).purity(), 1.0, 1e-10);
}
