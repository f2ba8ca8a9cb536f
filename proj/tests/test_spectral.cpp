#include <cmath>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <gtest/gtest.h>

#include "qslab/spectral.hpp"

using namespace qslab;

namespace {

const SpectralDensity fig_density{0.05, 1.0, 10.0};

// Independent half-line oracle (double-exponential rule from Boost).
template <class F>
double exp_sinh_integral(F f, double lower = 0.0) {
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate([&](double x) { return f(x); }, lower, std::numeric_limits<double>::infinity());
}

} // namespace

TEST(JOmega, VanishesAtZero) { EXPECT_EQ(j_omega(fig_density, 0.0), 0.0); }

TEST(JOmega, ClosedFormValue) { EXPECT_NEAR(j_omega(fig_density, 1.0), 0.0452419, 5e-8); }

TEST(JOmega, NegativeFrequencyIsDomainError) { EXPECT_THROW(j_omega(fig_density, -0.1), DomainError); }

TEST(JOmega, NonnegativeAndDecaying) {
    for (double w = 0.0; w < 2000.0; w += 0.37) EXPECT_GE(j_omega({0.3, 0.6, 30.0}, w), 0.0);
    EXPECT_LT(j_omega(fig_density, 1000.0), 1e-40);
}

TEST(AlphaClosed, ValueAtZeroIsTotalWeight) {
    const cplx a = alpha_closed(fig_density, 0.0);
    EXPECT_NEAR(a.real(), 5.0, 1e-14);
    EXPECT_EQ(a.imag(), 0.0);
}

TEST(AlphaClosed, HermitianSymmetry) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> t(-20.0, 20.0), s(0.2, 2.0), wc(0.5, 40.0);
    for (int i = 0; i < 50; ++i) {
        const SpectralDensity sd{0.1, s(gen), wc(gen)};
        const double tt = t(gen);
        const cplx lhs = alpha_closed(sd, -tt), rhs = std::conj(alpha_closed(sd, tt));
        EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-13 * std::abs(lhs) + 1e-300);
    }
}

TEST(AlphaClosed, MatchesQuadratureAtFigurePoint) {
    EXPECT_LT(std::abs(alpha_closed(fig_density, 0.3) - alpha_quad(fig_density, 0.3)), 1e-10);
}

TEST(AlphaQuad, ZeroTimeEqualsTotalWeight) {
    const cplx a = alpha_quad(fig_density, 0.0);
    EXPECT_NEAR(a.real(), 5.0, 1e-10);
    EXPECT_NEAR(a.imag(), 0.0, 1e-12);
}

TEST(AlphaQuad, LargeTimeModulusBound) {
    const double t = 10.0; // ωc t = 100
    const double bound = 5.0 * std::pow(1.0 + 100.0 * 100.0, -1.0);
    EXPECT_LE(std::abs(alpha_quad(fig_density, t)), bound * (1.0 + 1e-8));
}

TEST(AlphaQuad, RandomizedAgreementWithClosedForm) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> eta(0.0, 0.3), s(0.4, 2.0), wc(1.0, 30.0), t(-3.0, 3.0);
    for (int i = 0; i < 40; ++i) {
        const SpectralDensity sd{eta(gen), s(gen), wc(gen)};
        const double tt = t(gen);
        EXPECT_LT(std::abs(alpha_closed(sd, tt) - alpha_quad(sd, tt)), 1e-9)
            << "eta=" << sd.eta << " s=" << sd.s << " wc=" << sd.omega_c << " t=" << tt;
    }
}

TEST(AlphaZero, MatchesIndependentQuadrature) {
    for (const SpectralDensity& sd : {fig_density, SpectralDensity{0.25, 0.6, 30.0}, SpectralDensity{0.1, 1.7, 3.0}}) {
        const double oracle = exp_sinh_integral([&](double w) { return sd(w); });
        EXPECT_NEAR(alpha_zero(sd), oracle, 1e-9 * std::max(1.0, oracle));
    }
}

TEST(JOverOmega, Examples) {
    EXPECT_NEAR(j_over_omega_integral(fig_density), 0.5, 1e-15);
    EXPECT_NEAR(j_over_omega_integral({0.1, 1.0, 10.0}), 1.0, 1e-15);
    EXPECT_EQ(j_over_omega_integral({0.0, 0.7, 5.0}), 0.0);
}

TEST(JOverOmega, MatchesIndependentQuadrature) {
    const SpectralDensity sd{0.25, 0.6, 30.0};
    EXPECT_NEAR(j_over_omega_integral(sd), exp_sinh_integral([&](double w) { return sd(w) / w; }), 1e-9);
}

TEST(JOverOmega, MonotoneInCouplingAndCutoff) {
    double previous = -1.0;
    for (double eta = 0.0; eta <= 0.5; eta += 0.05) {
        const double v = j_over_omega_integral({eta, 0.8, 10.0});
        EXPECT_GT(v, previous);
        previous = v;
    }
    previous = -1.0;
    for (double wc = 1.0; wc <= 50.0; wc += 3.0) {
        const double v = j_over_omega_integral({0.05, 0.8, wc});
        EXPECT_GT(v, previous);
        previous = v;
    }
}

TEST(TailCutoff, TailWeightFraction) {
    for (const SpectralDensity& sd : {fig_density, SpectralDensity{0.25, 0.6, 30.0}}) {
        const double omega = tail_cutoff(sd, 1e-6);
        const double tail = exp_sinh_integral([&](double w) { return sd(w); }, omega);
        EXPECT_NEAR(tail / alpha_zero(sd), 1e-6, 1e-9);
    }
}

TEST(CorrelationFunction, SampledGridIsStationaryKernel) {
    const auto c = CorrelationFunction::sample(ClosedFormKernel{fig_density}, 0.01, 100);
    ASSERT_EQ(c.size(), 101u);
    EXPECT_DOUBLE_EQ(c.alpha0, 5.0);
    EXPECT_EQ(c[0].imag(), 0.0);
    EXPECT_EQ(c[37], alpha_closed(fig_density, 0.37));
}

TEST(SpectralDensity, ValidateRejectsUnphysicalParameters) {
    EXPECT_THROW((SpectralDensity{-0.1, 1.0, 10.0}.validate()), DomainError);
    EXPECT_THROW((SpectralDensity{0.1, 0.0, 10.0}.validate()), DomainError);
    EXPECT_THROW((SpectralDensity{0.1, 1.0, 0.0}.validate()), DomainError);
    EXPECT_NO_THROW(fig_density.validate());
}
