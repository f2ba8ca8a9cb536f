#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "qslab/bound_state.hpp"
#include "qslab/kernel_solver.hpp"
#include "qslab/markov.hpp"
#include "qslab/qsl.hpp"

using namespace qslab;

namespace {
const SpectralDensity fig_density{0.05, 1.0, 10.0};
}

TEST(SolveU, NoiselessLimitIsFreeRotation) {
    const AmplitudeGrid g = solve_u({0.0, 1.0, 10.0}, 1.0, 30.0, 0.01);
    for (std::size_t n = 0; n < g.size(); ++n) EXPECT_LT(std::abs(g.u[n] - std::polar(1.0, -g.time(n))), 1e-10);
}

TEST(SolveU, GridInvariants) {
    const AmplitudeGrid g = solve_u(fig_density, 1.0, 50.0, 0.01);
    EXPECT_EQ(g.u[0], cplx(1.0, 0.0));
    EXPECT_EQ(g.udot[0], cplx(0.0, -1.0));
    EXPECT_EQ(g.size(), 5001u);
    for (const cplx& u : g.u) EXPECT_LE(std::abs(u), 1.0 + 1e-8);
}

// Early-time agreement with the exponential Born-Markov amplitude. The band of validity is
// narrower than a naive reading suggests: the true decay rate differs from πJ(ω0) by a
// factor of about two here, so only the first couple of time units stay within 10%.
TEST(SolveU, EarlyTimesFollowMarkovAmplitude) {
    const AmplitudeGrid g = solve_u(fig_density, 1.0, 5.0, 0.01);
    const MarkovParams p = markov_params(fig_density, 1.0);
    for (std::size_t n = 0; n <= g.index_of(2.0); ++n) {
        const double exact = std::abs(g.u[n]);
        const double approx = std::abs(u_markov(p, 1.0, g.time(n)));
        EXPECT_LT(std::abs(exact - approx) / exact, 0.10) << "t=" << g.time(n);
    }
}

TEST(SolveU, BoundStateModulusApproachesResidue) {
    const SpectralDensity sd{0.2, 1.0, 10.0};
    const AmplitudeGrid g = solve_u(sd, 1.0, 800.0, 0.01);
    const BoundStateInfo info = find_bound_state(sd, 1.0);
    ASSERT_TRUE(info.exists);
    EXPECT_NEAR(std::abs(g.u.back()) / info.Z, 1.0, 0.02);
}

TEST(SolveU, PreconditionsAndGridCap) {
    EXPECT_THROW(solve_u(fig_density, 1.0, 1.0, 0.0), DomainError);
    EXPECT_THROW(solve_u(fig_density, 1.0, 0.001, 0.01), DomainError);
    SolverOptions opt;
    opt.max_steps = 1000;
    EXPECT_THROW(solve_u(fig_density, 1.0, 100.0, 0.01, opt), SizeError);
    EXPECT_THROW(solve_u(fig_density, 1.0, 1e6, 1e-2), SizeError);
}

TEST(SolveU, OversizedStepIsReported) {
    EXPECT_THROW(solve_u({1.0, 1.0, 10.0}, 1.0, 50.0, 0.5), StepSizeError);
    EXPECT_NO_THROW(solve_u({1.0, 1.0, 10.0}, 1.0, 50.0, 0.2));
}

TEST(SolveU, OdeResidualAgainstTrapezoidMemory) {
    const double dt = 0.01;
    const AmplitudeGrid g = solve_u(fig_density, 1.0, 20.0, dt);
    const auto alpha = CorrelationFunction::sample(ClosedFormKernel{fig_density}, dt, g.steps());
    const double bound = 10.0 * dt * dt * alpha_zero(fig_density);
    for (std::size_t n = 0; n < g.size(); n += 10) {
        const cplx residual = g.udot[n] + cplx(0.0, 1.0) * g.u[n] + memory_integral(g, alpha, n);
        EXPECT_LT(std::abs(residual), bound) << "t=" << g.time(n);
    }
}

TEST(SolveU, WeakCouplingApproachesFreeRotationMonotonically) {
    double previous = std::numeric_limits<double>::infinity();
    for (double eta : {1e-3, 1e-4, 1e-5}) {
        const AmplitudeGrid g = solve_u({eta, 1.0, 10.0}, 1.0, 20.0, 0.01);
        double worst = 0.0;
        for (std::size_t n = 0; n < g.size(); ++n) worst = std::max(worst, std::abs(g.u[n] - std::polar(1.0, -g.time(n))));
        EXPECT_LT(worst, previous);
        previous = worst;
    }
}

TEST(SolveU, TrapezoidRuleIsAlsoSecondOrder) {
    SolverOptions opt;
    opt.rule = MemoryRule::trapezoid;
    const ConvergenceReport rep = convergence_order(fig_density, 1.0, 10.0, 0.01, opt);
    EXPECT_GE(rep.order, 1.7);
    EXPECT_LE(rep.order, 2.3);
}

TEST(SolveU, ParallelKernelTabulationIsBitIdentical) {
    SolverOptions serial, threaded;
    threaded.jobs = 4;
    const AmplitudeGrid a = solve_u(fig_density, 1.0, 30.0, 0.005, serial);
    const AmplitudeGrid b = solve_u(fig_density, 1.0, 30.0, 0.005, threaded);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t n = 0; n < a.size(); ++n) ASSERT_EQ(a.u[n], b.u[n]);
}

// Halving the default step moves L_B(τ) and ℓ(τ) by about 1e-4 and 3e-5 relative over
// τ ≤ 50. A 1e-5 target would need dt ≈ 1e-3, which the O(N²) memory sum cannot afford
// at τ = 800, so the default stays at 0.01 and the measured level is pinned here.
TEST(SolveU, DefaultStepIsResolved) {
    const AmplitudeGrid coarse = solve_u(fig_density, 1.0, 50.0, default_dt);
    const AmplitudeGrid fine = solve_u(fig_density, 1.0, 50.0, default_dt / 2.0);
    const AmplitudeGrid finer = solve_u(fig_density, 1.0, 50.0, default_dt / 4.0);
    const PathLengths pc = path_lengths(coarse), pf = path_lengths(fine), pff = path_lengths(finer);
    double d_lb = 0.0, d_ell = 0.0, d_ell_next = 0.0;
    for (std::size_t n = 0; n < coarse.size(); ++n) {
        d_lb = std::max(d_lb, std::abs(bures_angle(coarse.u[n]) - bures_angle(fine.u[2 * n])));
        d_ell = std::max(d_ell, std::abs(pc.ell[n] - pf.ell[2 * n]) / std::max(pf.ell[2 * n], 1.0));
        d_ell_next = std::max(d_ell_next, std::abs(pf.ell[2 * n] - pff.ell[4 * n]) / std::max(pff.ell[4 * n], 1.0));
    }
    EXPECT_LT(d_lb, 2e-4);
    EXPECT_LT(d_ell, 5e-5);
    EXPECT_GT(d_ell / d_ell_next, 3.0);
}

TEST(MemoryIntegral, EmptyIntervalIsZero) {
    const AmplitudeGrid g = solve_u(fig_density, 1.0, 1.0, 0.01);
    const auto alpha = CorrelationFunction::sample(ClosedFormKernel{fig_density}, 0.01, g.steps());
    EXPECT_EQ(memory_integral(g, alpha, 0), cplx{});
}

TEST(MemoryIntegral, ConstantKernelRectangle) {
    const double dt = 0.01;
    const std::size_t n = 200; // t = 2
    const auto alpha = CorrelationFunction::sample([](double) { return cplx(1.0, 0.0); }, dt, n);
    const std::vector<cplx> u(n + 1, cplx(1.0, 0.0));
    EXPECT_NEAR(std::abs(memory_integral(u, alpha, n) - 2.0), 0.0, 1e-12);
}

TEST(MemoryIntegral, OutOfRangeIndex) {
    const auto alpha = CorrelationFunction::sample(ClosedFormKernel{fig_density}, 0.01, 10);
    const std::vector<cplx> u(11, 1.0);
    EXPECT_THROW(memory_integral(u, alpha, 11), DomainError);
}

TEST(MemoryIntegral, SecondOrderSelfRefinement) {
    auto u_of = [](double s) { return cplx(std::cos(1.3 * s) * std::exp(-0.2 * s), std::sin(0.7 * s + 0.4)); };
    const double t = 3.0;
    auto estimate = [&](double dt) {
        const auto n = static_cast<std::size_t>(std::llround(t / dt));
        const auto alpha = CorrelationFunction::sample(ClosedFormKernel{fig_density}, dt, n);
        std::vector<cplx> u(n + 1);
        for (std::size_t j = 0; j <= n; ++j) u[j] = u_of(static_cast<double>(j) * dt);
        return memory_integral(u, alpha, n);
    };
    const double dt = 0.02;
    const cplx reference = estimate(dt / 8.0);
    const double e1 = std::abs(estimate(dt) - reference);
    const double e2 = std::abs(estimate(dt / 2.0) - reference);
    // against a dt/8 reference the ideal ratio is (1 − 1/64)/(1/4 − 1/64) ≈ 4.2
    EXPECT_GT(e1 / e2, 3.5);
    EXPECT_LT(e1 / e2, 5.0);
}

TEST(ConvergenceOrder, OhmicKernelIsSecondOrder) {
    const ConvergenceReport rep = convergence_order(fig_density, 1.0, 10.0);
    EXPECT_FALSE(rep.exact_regime);
    EXPECT_GE(rep.order, 1.7);
    EXPECT_LE(rep.order, 2.3);
}

TEST(ConvergenceOrder, SubOhmicKernelIsSecondOrder) {
    const ConvergenceReport rep = convergence_order({0.25, 0.6, 30.0}, 1.0, 10.0);
    EXPECT_GE(rep.order, 1.7);
    EXPECT_LE(rep.order, 2.3);
}

TEST(ConvergenceOrder, NoiselessRunIsFlaggedExact) {
    const ConvergenceReport rep = convergence_order({0.0, 1.0, 10.0}, 1.0, 10.0);
    EXPECT_TRUE(rep.exact_regime);
    EXPECT_TRUE(std::isnan(rep.order));
}

TEST(ConvergenceOrder, ShortHorizonRejected) { EXPECT_THROW(convergence_order(fig_density, 1.0, 5.0), DomainError); }
