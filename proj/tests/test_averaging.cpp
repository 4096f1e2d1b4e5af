#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"

using namespace fastosc;
using namespace fastosc::testing;

TEST(OscillatoryIntegral, PolynomialCosineClosedForm) {
    // int_0^1 x^2 (1-x)^2 cos(2 pi x / eps) dx = -24 / k^4, k = 2 pi / eps, when 1/eps is an integer
    auto const u = TwoScaleFunction::cosine(SlowProfile::polynomial_bump(1.0, 2, {0.0, 1.0}));
    for (double eps : {0.1, 0.05, 0.02}) {
        double const k = 2 * pi / eps;
        complex const got = oscillatory_integral(u, eps);
        EXPECT_LT(std::abs(got - (-24.0 / std::pow(k, 4))), 1e-15) << eps;
    }
}

TEST(OscillatoryIntegral, MatchesDirectQuadratureForComplexMix) {
    auto const u = mixed_potential();
    for (double eps : {0.1, 0.037}) {
        complex const direct = gl_integrate([&](double x) { return u(x, x / eps); }, 0.0, 1.0, 4000);
        EXPECT_LT(std::abs(oscillatory_integral(u, eps) - direct), 1e-12);
    }
}

TEST(OscillatoryIntegral, Errors) {
    auto const u = canonical_potential();
    EXPECT_THROW(oscillatory_integral(u, 0.0), InputError);
    EXPECT_THROW(oscillatory_integral(u, -1.0), InputError);
    QuadratureSettings tight;
    tight.max_panels = 100;
    try {
        oscillatory_integral(u, 1e-3, tight);
        FAIL();
    } catch (NumericalError const& e) {
        EXPECT_STREQ(e.what(), "resolution budget exceeded");
    }
    EXPECT_EQ(oscillatory_integral(TwoScaleFunction{}, 0.1), complex{});
}

TEST(AveragedIntegral, BetaFormMatchesQuadrature) {
    for (int p : {0, 1, 2, 5}) {
        auto const prof = SlowProfile::polynomial_bump({1.5, -0.5}, p, {0.25, 1.75});
        TwoScaleFunction const u(TwoScaleFunction::ModeMap{{0, Coefficient(prof)}});
        complex const direct = gl_integrate([&](double x) { return prof.value(x); }, 0.25, 1.75, 64);
        EXPECT_LT(rel(averaged_integral(u), direct), 1e-13) << p;
    }
    auto const bump = SlowProfile::smooth_bump(2.0, {0.0, 2.0});
    TwoScaleFunction const s(TwoScaleFunction::ModeMap{{0, Coefficient(bump)}, {3, Coefficient(bump)}});
    EXPECT_LT(rel(averaged_integral(s), gl_integrate([&](double x) { return bump.value(x); }, 0.0, 2.0, 400)), 1e-12);
    EXPECT_EQ(averaged_integral(canonical_potential()), complex{});
}

TEST(DecayOrderFit, PolynomialBumpIsFourthOrder) {
    auto const u = TwoScaleFunction::cosine(SlowProfile::polynomial_bump(1.0, 2, {0.0, 1.0}));
    auto const fit = decay_order_fit(u, {0.1, 0.05, 0.025, 0.0125});
    EXPECT_NEAR(fit.fitted_order, 4.0, 0.05);
    EXPECT_FALSE(fit.floor_flag);
}

TEST(DecayOrderFit, SmoothBumpDecaysFasterAndHitsFloor) {
    auto const u = TwoScaleFunction::cosine(SlowProfile::smooth_bump(1.0, {0.0, 1.0}));
    std::vector<double> eps;
    for (int i = 0; i < 9; ++i) eps.push_back(0.1 * std::pow(1e-2, i / 8.0));
    auto const fit = decay_order_fit(u, eps);
    EXPECT_GE(fit.fitted_order, 3.5);
    EXPECT_TRUE(fit.floor_flag);
    EXPECT_EQ(fit.errors.size(), eps.size());
}

TEST(DecayOrderFit, Errors) {
    auto const u = canonical_potential();
    EXPECT_THROW(decay_order_fit(u, {0.1, 0.05}), InputError);
    EXPECT_THROW(decay_order_fit(u, {0.05, 0.1, 0.01}), InputError);
    TwoScaleFunction const w(TwoScaleFunction::ModeMap{{0, Coefficient(SlowProfile::smooth_bump(1.0, {0, 1}))}});
    EXPECT_THROW(decay_order_fit(w, {0.1, 0.05, 0.025}), InputError);
    // an integer-frequency smooth-bump mode is at the floor for every eps here
    auto const smooth = TwoScaleFunction::cosine(SlowProfile::smooth_bump(1.0, {0.0, 1.0}));
    try {
        decay_order_fit(smooth, {0.004, 0.002, 0.001});
        FAIL();
    } catch (NumericalError const& e) {
        EXPECT_STREQ(e.what(), "insufficient dynamic range");
    }
}

TEST(LogLogSlope, RecoversPowerLaw) {
    std::vector<double> x{1.0, 0.5, 0.25, 0.125}, y;
    for (double v : x) y.push_back(3.0 * std::pow(v, 2.5));
    EXPECT_NEAR(log_log_slope(x, y), 2.5, 1e-12);
}

TEST(AveragingProperties, RandomZeroMeanFunctionsAverageToZero) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        auto const u = random_real_potential(rng);
        // error at small eps is much below the error at large eps
        double const big = std::abs(oscillatory_integral(u, 0.2));
        double const small = std::abs(oscillatory_integral(u, 0.01));
        double const scale = gl_integrate([&](double x) {
            double s = 0;
            for (auto const& [n, c] : u.modes()) s += std::abs(c.value(x));
            return s;
        }, 0.0, 1.0, 200);
        EXPECT_LT(small, 1e-3 * scale) << trial;
        EXPECT_LE(small, big + 1e-12 * scale) << trial;
    }
}
