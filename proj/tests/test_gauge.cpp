#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace fastosc;
using namespace fastosc::testing;

namespace {

// 4th-order centered differences
template <typename F>
complex d1(F&& f, double x, double h) {
    return (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) / (12 * h);
}
template <typename F>
complex d2(F&& f, double x, double h) {
    return (-f(x + 2 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

std::vector<TwoScaleFunction> potentials() {
    return {canonical_potential(), smooth_complex_potential(), mixed_potential()};
}

} // namespace

TEST(BuildGauge, QDerivativesMatchFiniteDifferences) {
    for (auto const& V : potentials()) {
        auto const g = build_gauge(V, 0.05);
        auto const m = g.segment();
        auto q = [&](double x) { return g.q(x); };
        for (double t : {0.21, 0.5, 0.77}) {
            double const x = m.lo + t * m.length();
            double const h = 1e-4;
            EXPECT_LT(std::abs(d1(q, x, h) - g.dq(x)), 1e-8 * (1.0 + std::abs(g.dq(x))));
            EXPECT_LT(std::abs(d2(q, x, h) - g.d2q(x)), 1e-5 * (1.0 + std::abs(g.d2q(x))));
        }
    }
}

TEST(BuildGauge, QIsOneOffTheSupport) {
    auto const g = build_gauge(canonical_potential(), 0.1);
    for (double x : {-1.0, -1e-9, 1.0 + 1e-9, 4.0}) {
        EXPECT_EQ(g.q(x), complex(1.0));
        EXPECT_EQ(g.dq(x), complex{});
        EXPECT_EQ(g.apply_L_at(x, 1.0, 1.0), complex{});
    }
}

TEST(BuildGauge, RejectsLargeEps) {
    // sup |v| = 100 / 16 / (4 pi^2) ~ 0.158; eps^2 sup|v| >= 1/2 near eps = 1.78
    EXPECT_NO_THROW(build_gauge(canonical_potential(), 1.0));
    EXPECT_THROW(build_gauge(canonical_potential(), 2.0), InputError);
    EXPECT_THROW(build_gauge(canonical_potential(), 0.0), InputError);
}

TEST(IdentityResidual, AtRoundOffForCatalog) {
    for (auto const& V : potentials()) {
        for (double eps : {0.1, 0.05, 0.025}) {
            auto const g = build_gauge(V, eps);
            auto const m = g.segment();
            SampleGrid const grid{m.lo, m.hi, static_cast<std::size_t>(std::ceil(m.length() / (eps / 40))) + 1};
            for (auto const& phi : default_test_catalog(m)) EXPECT_LE(identity_residual(g, phi, grid), 1e-9);
        }
    }
}

TEST(IdentityResidual, IndependentFiniteDifferenceCheck) {
    // H_eps (q phi) computed by differencing the product, compared with q (H_0 - eps L) phi
    auto const V = canonical_potential();
    double const eps = 0.1;
    auto const g = build_gauge(V, eps);
    auto const phi = TestFunction::gaussian(0.5, 0.2);
    auto prod = [&](double x) { return g.q(x) * phi.value(x); };
    for (double x : {0.13, 0.42, 0.66, 0.91}) {
        complex const lhs = -d2(prod, x, 1e-4) + V(x, x / eps) * prod(x);
        complex const rhs = g.q(x) * (-phi.derivative(x, 2) - eps * g.apply_L_at(x, phi.value(x), phi.derivative(x, 1)));
        EXPECT_LT(std::abs(lhs - rhs), 1e-5 * (1.0 + std::abs(lhs)));
    }
}

TEST(ApplyL, ConstantExample) {
    // L[1] = -f/q
    auto const g = build_gauge(canonical_potential(), 0.1);
    SampleGrid const grid{0.0, 1.0, 201};
    auto const out = apply_L(g, TestFunction::polynomial({1.0}), grid);
    for (std::size_t i = 0; i < grid.n; ++i) EXPECT_EQ(out[i], -g.f(grid[i]) / g.q(grid[i]));
}

TEST(ApplyL, RejectsCoarseGrid) {
    auto const g = build_gauge(canonical_potential(), 0.1);
    EXPECT_THROW(apply_L(g, TestFunction::polynomial({1.0}), SampleGrid{0.0, 1.0, 100}), InputError);
    EXPECT_THROW(identity_residual(g, TestFunction::polynomial({1.0}), SampleGrid{0.0, 1.0, 1}), InputError);
    // grids that do not touch the support are never under-resolved
    EXPECT_NO_THROW(apply_L(g, TestFunction::polynomial({1.0}), SampleGrid{2.0, 5.0, 3}));
}

TEST(LBoundSample, ScalesLikeInverseEpsForCanonical) {
    // L contains the 2 v_xxi / q term, O(1), and eps dv/dx ~ v_xi, O(1): the bound stays O(1)
    auto const V = canonical_potential();
    auto const m = Interval{0.0, 1.0};
    double const b1 = l_bound_sample(build_gauge(V, 0.1), default_test_catalog(m));
    double const b2 = l_bound_sample(build_gauge(V, 0.025), default_test_catalog(m));
    EXPECT_GT(b1, 0.0);
    EXPECT_LT(b2 / b1, 2.0);
    EXPECT_GT(b2 / b1, 0.5);
}

TEST(TestFunctionCatalog, DerivativesMatchFiniteDifferences) {
    for (auto const& phi : default_test_catalog({0.0, 1.0})) {
        auto f = [&](double x) { return complex(phi.value(x)); };
        for (double x : {0.1, 0.37, 0.8}) {
            EXPECT_LT(std::abs(d1(f, x, 1e-3) - phi.derivative(x, 1)), 1e-7 * (1 + std::abs(phi.derivative(x, 1))));
            EXPECT_LT(std::abs(d2(f, x, 1e-3) - phi.derivative(x, 2)), 1e-5 * (1 + std::abs(phi.derivative(x, 2))));
        }
    }
    EXPECT_EQ(default_test_catalog({0.0, 1.0}).size(), 10u);
}

TEST(GaugeProperties, TransformedCoefficientsAreBounded) {
    // drift 2q'/q is O(eps) and the transformed potential eps f / q is O(eps)
    auto const V = canonical_potential();
    for (double eps : {0.1, 0.05, 0.025}) {
        auto const g = build_gauge(V, eps);
        double drift = 0, pot = 0;
        for (int i = 0; i <= 4000; ++i) {
            double const x = i / 4000.0;
            drift = std::max(drift, std::abs(g.transformed_drift(x)));
            pot = std::max(pot, std::abs(g.transformed_potential(x)));
        }
        EXPECT_LT(drift / eps, 5.0);
        EXPECT_LT(pot / eps, 10.0);
    }
}
