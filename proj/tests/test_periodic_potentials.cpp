#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"

using namespace fastosc;
using namespace fastosc::testing;

namespace {

// centered-difference error at step h, relative to 1 + |exact|
double fd_error(SlowProfile const& p, double x, int order, double h) {
    complex const approx = order == 1 ? (p.value(x + h) - p.value(x - h)) / (2 * h)
                                      : (p.value(x + h) - 2.0 * p.value(x) + p.value(x - h)) / (h * h);
    return std::abs(approx - p.derivative(x, order)) / (1.0 + std::abs(p.derivative(x, order)));
}

} // namespace

TEST(SlowProfile, VanishesOutsideSupport) {
    for (auto const& p : {SlowProfile::polynomial_bump(2.0, 3, {0.2, 0.8}), SlowProfile::smooth_bump(1.0, {0.2, 0.8})}) {
        for (double x : {-1.0, 0.1, 0.81, 3.0})
            for (int d = 0; d <= 2; ++d) EXPECT_EQ(p.derivative(x, d), complex{});
    }
}

TEST(SlowProfile, ExactDerivativesMatchCenteredDifferences) {
    for (auto const& p : {SlowProfile::polynomial_bump({2.0, -1.0}, 2, {0.0, 1.0}),
                          SlowProfile::polynomial_bump(1.0, 5, {-1.0, 2.0}), SlowProfile::smooth_bump(3.0, {0.0, 1.0})}) {
        auto const s = p.support();
        for (double t : {0.23, 0.5, 0.71}) {
            double const x = s.lo + t * s.length();
            EXPECT_LT(fd_error(p, x, 1, 1e-4), 1e-6);
            EXPECT_LT(fd_error(p, x, 2, 1e-4), 1e-5);
        }
    }
}

TEST(SlowProfile, PolynomialBumpSmoothnessAtEndpoints) {
    // power p: derivatives of order < p tend to zero at the support ends
    auto const p3 = SlowProfile::polynomial_bump(1.0, 3, {0.0, 1.0});
    for (int d = 0; d <= 2; ++d) {
        EXPECT_LT(std::abs(p3.derivative(1e-6, d)), 1e-5);
        EXPECT_LT(std::abs(p3.derivative(1.0 - 1e-6, d)), 1e-5);
    }
    auto const p2 = SlowProfile::polynomial_bump(1.0, 2, {0.0, 1.0});
    EXPECT_LT(std::abs(p2.derivative(1e-9, 1)), 1e-8);
    EXPECT_NEAR(p2.derivative(1e-9, 2).real(), 2.0, 1e-7); // c'' jumps: p - 1 = 1 continuous derivative
}

TEST(SlowProfile, SmoothBumpFlatAtEndpoints) {
    auto const p = SlowProfile::smooth_bump(1.0, {0.0, 1.0});
    for (int d = 0; d <= 2; ++d) EXPECT_LT(std::abs(p.derivative(1e-3, d)), 1e-90);
    EXPECT_NEAR(p.value(0.5).real(), 1.0, 1e-15);
}

TEST(EvalTwoScale, Examples) {
    // 1/2 PolyBump(1, 2, [0,1]) on n = +-1 is x^2 (1-x)^2 cos(2 pi xi)
    TwoScaleFunction::ModeMap m;
    auto half = SlowProfile::polynomial_bump(0.5, 2, {0.0, 1.0});
    m[1] = Coefficient(half);
    m[-1] = Coefficient(half);
    TwoScaleFunction const u(m);
    EXPECT_NEAR(eval_two_scale(u, 0.5, 0.0).real(), 0.0625, 1e-15);
    EXPECT_EQ(eval_two_scale(u, -5.0, 0.3), complex{});

    TwoScaleFunction const w(TwoScaleFunction::ModeMap{{0, Coefficient(SlowProfile::smooth_bump(1.0, {0.0, 1.0}))}});
    EXPECT_EQ(w(0.4, 0.1), w(0.4, 1.1));
    auto const c = canonical_potential();
    for (double xi : {0.0, 0.137, 0.5, 0.91}) EXPECT_NEAR(std::abs(c(0.3, xi) - c(0.3, xi + 1.0)), 0.0, 1e-13);
}

TEST(MeanOverPeriod, Examples) {
    EXPECT_TRUE(mean_over_period(canonical_potential()).is_zero());

    auto const c0 = SlowProfile::polynomial_bump(3.0, 2, {0.0, 1.0});
    TwoScaleFunction::ModeMap m{{0, Coefficient(c0)}, {2, Coefficient(SlowProfile::smooth_bump({1.0, 2.0}, {0.0, 1.0}))}};
    TwoScaleFunction const u(m);
    auto const mean = mean_over_period(u);
    ASSERT_EQ(mean.terms.size(), 1u);
    EXPECT_EQ(mean.value(0.4), c0.value(0.4));
    complex const trap = xi_mean([&](double xi) { return u(0.4, xi); });
    EXPECT_NEAR(std::abs(trap - c0.value(0.4)), 0.0, 1e-12);
}

TEST(PTransform, CosineModeBecomesSine) {
    auto const a = SlowProfile::polynomial_bump(2.0, 2, {0.0, 1.0});
    auto const p = p_transform(TwoScaleFunction::cosine(a));
    for (double x : {0.1, 0.45, 0.8})
        for (double xi : {0.0, 0.2, 0.77}) {
            double const expect = a.value(x).real() * std::sin(2 * pi * xi) / (2 * pi);
            EXPECT_NEAR(std::abs(p(x, xi) - expect), 0.0, 1e-15);
        }
}

TEST(PTransform, MatchesDefiningIntegral) {
    // P[u](x, xi) = int_0^xi u(x, tau) dtau + int_0^1 tau u(x, tau) dtau, by quadrature
    for (int n : {1, -2, 3}) {
        auto const amp = SlowProfile::smooth_bump({0.7, -0.4}, {0.0, 1.0});
        TwoScaleFunction const u(TwoScaleFunction::ModeMap{{n, Coefficient(amp)}});
        auto const p = p_transform(u);
        for (double x : {0.3, 0.6})
            for (double xi : {0.15, 0.5, 0.9}) {
                complex const first = gl_integrate([&](double t) { return u(x, t); }, 0.0, xi, 8);
                complex const second = gl_integrate([&](double t) { return t * u(x, t); }, 0.0, 1.0, 8);
                EXPECT_NEAR(std::abs(p(x, xi) - (first + second)), 0.0, 1e-14) << "n=" << n;
            }
    }
}

TEST(PTransform, ZeroInZeroOutAndRejectsNonZeroMean) {
    EXPECT_TRUE(p_transform(TwoScaleFunction{}).is_zero());
    TwoScaleFunction const u(TwoScaleFunction::ModeMap{{0, Coefficient(SlowProfile::polynomial_bump(1.0, 2, {0, 1}))}});
    try {
        p_transform(u);
        FAIL() << "expected InputError";
    } catch (InputError const& e) {
        EXPECT_STREQ(e.what(), "P requires zero-mean input");
    }
}

TEST(BuildCorrector, CosineModeExample) {
    auto const a = SlowProfile::polynomial_bump(100.0, 2, {0.0, 1.0});
    auto const corr = build_corrector(TwoScaleFunction::cosine(a));
    double const h = 1e-3;
    for (double x : {0.2, 0.5, 0.9})
        for (double xi : {0.05, 0.4, 0.66}) {
            double const expect = -a.value(x).real() * std::cos(2 * pi * xi) / (4 * pi * pi);
            EXPECT_NEAR(std::abs(corr.value(x, xi) - expect), 0.0, 1e-14);
            // d^2 v / dxi^2 = V by finite differences
            complex const fd = (corr.value(x, xi + h) - 2.0 * corr.value(x, xi) + corr.value(x, xi - h)) / (h * h);
            EXPECT_NEAR(std::abs(fd - corr.potential()(x, xi)), 0.0, 1e-4 * std::abs(a.value(x)));
        }
}

TEST(BuildCorrector, ZeroMeanAndConsistentWithPTransform) {
    std::mt19937_64 rng(7);
    auto const V = mixed_potential();
    auto const corr = build_corrector(V);
    auto const p = p_transform(V);
    for (int i = 0; i < 20; ++i) {
        double const x = uniform(rng, 0.0, 1.0);
        EXPECT_LT(std::abs(xi_mean([&](double xi) { return corr.value(x, xi); })), 1e-14);
        EXPECT_LT(std::abs(xi_mean([&](double xi) { return corr.d_xx(x, xi); })), 1e-12);
        EXPECT_LT(std::abs(xi_mean([&](double xi) { return corr.d_xxi(x, xi); })), 1e-12);
        for (double xi : {0.0, 0.3, 0.71}) {
            EXPECT_LT(std::abs(corr.d_xi(x, xi) - p(x, xi)), 1e-13);
            EXPECT_LT(std::abs(corr.d_xixi(x, xi) - V(x, xi)), 1e-12);
        }
    }
}

TEST(BuildCorrector, Errors) {
    TwoScaleFunction const with_mean(TwoScaleFunction::ModeMap{{0, Coefficient(SlowProfile::smooth_bump(1.0, {0, 1}))}});
    EXPECT_THROW(build_corrector(with_mean), InputError);
    EXPECT_THROW(build_corrector(TwoScaleFunction::cosine(SlowProfile::polynomial_bump(1.0, 1, {0, 1}))), InputError);
}

// ---- properties ----

TEST(PeriodicProperties, PTransformHasZeroMeanOnGrid) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        auto const u = trial % 2 ? random_real_potential(rng) : random_real_potential(rng).scaled({0.3, 1.7});
        auto const p = p_transform(u);
        for (int i = 0; i <= 20; ++i) {
            double const x = i / 20.0;
            EXPECT_LE(std::abs(xi_mean([&](double xi) { return p(x, xi); })), 1e-13);
        }
    }
}

TEST(PeriodicProperties, XiDifferencesOfPTransformReproduceU) {
    auto const u = mixed_potential();
    auto const p = p_transform(u);
    for (double x : {0.35, 0.62})
        for (double xi : {0.1, 0.55}) {
            auto err = [&](double h) { return std::abs((p(x, xi + h) - p(x, xi - h)) / (2 * h) - u(x, xi)); };
            EXPECT_GE(std::log2(err(1e-3) / err(5e-4)), 1.9);
        }
}

TEST(PeriodicProperties, ModeSpaceAgreesWithPointSamples) {
    // DFT of point samples in xi recovers c_n(x); the mode sum reproduces point values
    std::mt19937_64 rng(3);
    auto const u = mixed_potential();
    for (int i = 0; i < 100; ++i) {
        double const x = uniform(rng, 0.0, 1.0), xi = uniform(rng, -2.0, 2.0);
        complex direct{};
        for (auto const& [n, c] : u.modes()) direct += c.value(x) * std::exp(complex(0.0, 2 * pi * n * xi));
        EXPECT_LT(std::abs(u(x, xi) - direct), 1e-12);
        for (auto const& [n, c] : u.modes()) {
            complex const dft = xi_mean([&](double t) { return u(x, t) * std::exp(complex(0.0, -2 * pi * n * t)); });
            EXPECT_LT(std::abs(dft - c.value(x)), 1e-12);
        }
    }
}

TEST(PeriodicProperties, RealFlaggedFunctionsEvaluateReal) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        auto const u = random_real_potential(rng);
        ASSERT_TRUE(u.is_real());
        for (int i = 0; i < 20; ++i) {
            complex const z = u(uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 5.0));
            EXPECT_LE(std::abs(z.imag()), 1e-13 * (1.0 + std::abs(z)));
        }
    }
    EXPECT_FALSE(mixed_potential().is_real());
}

TEST(PeriodicProperties, CorrectorIsLinearUnderSignFlip) {
    auto const V = mixed_potential();
    auto const a = build_corrector(V), b = build_corrector(V.scaled(-1.0));
    std::mt19937_64 rng(9);
    for (int i = 0; i < 50; ++i) {
        double const x = uniform(rng, 0.0, 1.0), xi = uniform(rng, 0.0, 1.0);
        EXPECT_LT(std::abs(a.value(x, xi) + b.value(x, xi)), 1e-15);
        EXPECT_LT(std::abs(a.d_xxi(x, xi) + b.d_xxi(x, xi)), 1e-13);
    }
}
