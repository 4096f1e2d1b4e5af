#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "fastosc/averaging.hpp"
#include "fastosc/corrector.hpp"
#include "fastosc/quadrature.hpp"

namespace fastosc {

/// Multiplier q(x) = 1 + eps^2 v(x, x/eps) and the coefficients of the conjugated operator
///
///   q^{-1} H_eps q = H_0 - eps L_eps,
///   L_eps = eps (2/q) (dv/dx) d/dx - f/q,   f = eps V v - eps v_xx - 2 v_xxi,
///
/// where dv/dx is the total derivative along (x, x/eps): v_x + v_xi / eps.
class GaugeData {
public:
    GaugeData(CorrectorBundle corrector, double eps) : corr_(std::move(corrector)), eps_(eps) {}

    double eps() const { return eps_; }
    CorrectorBundle const& corrector() const { return corr_; }
    Interval segment() const { return corr_.potential().support_hull(); }

    complex potential(double x) const { return corr_.potential().eval(x, x / eps_); }
    complex v(double x) const { return corr_.value(x, x / eps_); }

    complex dv_total(double x) const {
        double const xi = x / eps_;
        return corr_.d_x(x, xi) + corr_.d_xi(x, xi) / eps_;
    }

    complex q(double x) const { return 1.0 + eps_ * eps_ * v(x); }

    complex dq(double x) const {
        double const xi = x / eps_;
        return eps_ * eps_ * corr_.d_x(x, xi) + eps_ * corr_.d_xi(x, xi);
    }

    complex d2q(double x) const {
        double const xi = x / eps_;
        return eps_ * eps_ * corr_.d_xx(x, xi) + 2.0 * eps_ * corr_.d_xxi(x, xi) + corr_.potential().eval(x, xi);
    }

    complex f(double x) const {
        double const xi = x / eps_;
        return eps_ * corr_.potential().eval(x, xi) * corr_.value(x, xi) - eps_ * corr_.d_xx(x, xi)
             - 2.0 * corr_.d_xxi(x, xi);
    }

    /// L_eps applied to a function with value `phi` and derivative `dphi` at x.
    complex apply_L_at(double x, complex phi, complex dphi) const {
        if (!segment().contains(x)) return {};
        complex const qx = q(x);
        return eps_ * (2.0 / qx) * dv_total(x) * dphi - (f(x) / qx) * phi;
    }

    /// Coefficients of psi'' = -a psi' + (b - lambda) psi, the eigenproblem for psi = phi / q.
    complex transformed_drift(double x) const { return 2.0 * dq(x) / q(x); }
    complex transformed_potential(double x) const { return eps_ * f(x) / q(x); }

private:
    CorrectorBundle corr_;
    double eps_;
};

inline GaugeData build_gauge(TwoScaleFunction const& potential, double eps) {
    if (!(eps > 0.0)) throw InputError("eps must be positive");
    auto corr = build_corrector(potential);
    if (eps * eps * corr.v().sup_bound() >= 0.5)
        throw InputError("eps too large: 1 + eps^2 v is not safely invertible");
    return GaugeData(std::move(corr), eps);
}

/// Closed-form scalar test function with exact first and second derivatives.
///   Polynomial:    s * sum_k a_k x^k
///   Gaussian:      s * (x - c)^k exp(-(x - c)^2 / (2 w^2))
///   Sinusoid:      s * sin(omega x + phase)
struct TestFunction {
    enum class Kind { Polynomial, Gaussian, Sinusoid };

    Kind kind = Kind::Polynomial;
    double scale = 1.0;
    std::vector<double> coeffs{1.0};
    double center = 0.0;
    double width = 1.0;
    int power = 0;
    double omega = 0.0;
    double phase = 0.0;

    static TestFunction polynomial(std::vector<double> a) {
        TestFunction t;
        t.coeffs = std::move(a);
        return t;
    }
    static TestFunction gaussian(double c, double w, int k = 0) {
        TestFunction t;
        t.kind = Kind::Gaussian;
        t.center = c;
        t.width = w;
        t.power = k;
        return t;
    }
    static TestFunction sinusoid(double om, double ph) {
        TestFunction t;
        t.kind = Kind::Sinusoid;
        t.omega = om;
        t.phase = ph;
        return t;
    }

    TestFunction scaled(double s) const {
        TestFunction t = *this;
        t.scale *= s;
        return t;
    }

    double derivative(double x, int order) const {
        switch (kind) {
            case Kind::Polynomial: {
                double acc = 0.0;
                for (std::size_t k = order; k < coeffs.size(); ++k) {
                    double fac = 1.0;
                    for (int j = 0; j < order; ++j) fac *= static_cast<double>(k - j);
                    acc += fac * coeffs[k] * std::pow(x, static_cast<double>(k - order));
                }
                return scale * acc;
            }
            case Kind::Gaussian: {
                double const y = x - center;
                double const w2 = width * width;
                double const g = std::exp(-0.5 * y * y / w2);
                int const k = power;
                auto yp = [&](int e) { return e < 0 ? 0.0 : std::pow(y, e); };
                switch (order) {
                    case 0: return scale * yp(k) * g;
                    case 1: return scale * (k * yp(k - 1) - yp(k + 1) / w2) * g;
                    default:
                        return scale * (k * (k - 1) * yp(k - 2) - (2 * k + 1) * yp(k) / w2 + yp(k + 2) / (w2 * w2)) * g;
                }
            }
            case Kind::Sinusoid: {
                double const a = omega * x + phase;
                switch (order) {
                    case 0: return scale * std::sin(a);
                    case 1: return scale * omega * std::cos(a);
                    default: return -scale * omega * omega * std::sin(a);
                }
            }
        }
        return 0.0;
    }
    double value(double x) const { return derivative(x, 0); }
};

/// Ten test functions spread over the segment: polynomials, Gaussian bumps, Gaussian
/// times polynomial, sinusoids.
inline std::vector<TestFunction> default_test_catalog(Interval m) {
    double const c = 0.5 * (m.lo + m.hi);
    double const len = m.length();
    return {
        TestFunction::polynomial({1.0}),
        TestFunction::polynomial({0.3, -1.0}),
        TestFunction::polynomial({1.0, 0.5, -2.0}),
        TestFunction::gaussian(c, 0.2 * len),
        TestFunction::gaussian(m.lo + 0.3 * len, 0.1 * len),
        TestFunction::gaussian(c, 0.15 * len, 1),
        TestFunction::gaussian(m.lo + 0.7 * len, 0.25 * len, 2),
        TestFunction::sinusoid(3.0 / len, 0.2),
        TestFunction::sinusoid(7.0 / len, 1.1),
        TestFunction::sinusoid(12.0 / len, -0.4),
    };
}

/// Uniform sample grid of n >= 2 points on [lo, hi].
struct SampleGrid {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t n = 2;

    double step() const { return (hi - lo) / static_cast<double>(n - 1); }
    double operator[](std::size_t i) const { return i + 1 == n ? hi : lo + step() * static_cast<double>(i); }
};

namespace detail {
inline void check_resolution(GaugeData const& g, SampleGrid const& grid) {
    if (grid.n < 2) throw InputError("sample grid needs at least 2 points");
    auto const m = g.segment();
    bool const overlaps = grid.hi >= m.lo && grid.lo <= m.hi;
    if (overlaps && grid.step() > g.eps() / 20.0)
        throw InputError("sample grid under-resolves the fast scale (step must be <= eps/20)");
}
} // namespace detail

inline std::vector<complex> apply_L(GaugeData const& g, TestFunction const& phi, SampleGrid const& grid) {
    detail::check_resolution(g, grid);
    std::vector<complex> out(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        double const x = grid[i];
        out[i] = g.apply_L_at(x, phi.value(x), phi.derivative(x, 1));
    }
    return out;
}

/// sup over the grid of |H_eps(q phi) - q (H_0 phi - eps L phi)| / (1 + |phi| + |phi''|).
inline double identity_residual(GaugeData const& g, TestFunction const& phi, SampleGrid const& grid) {
    detail::check_resolution(g, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) {
        double const x = grid[i];
        double const p0 = phi.value(x), p1 = phi.derivative(x, 1), p2 = phi.derivative(x, 2);
        complex const q = g.q(x), q1 = g.dq(x), q2 = g.d2q(x);
        complex const lhs = -(q2 * p0 + 2.0 * q1 * p1 + q * p2) + g.potential(x) * q * p0;
        complex const rhs = q * (-p2 - g.eps() * g.apply_L_at(x, p0, p1));
        worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(p0) + std::abs(p2)));
    }
    return worst;
}

/// max over the catalog of ||L phi||_{L2} / ||phi||_{W^2_2(M)}.
inline double l_bound_sample(GaugeData const& g, std::vector<TestFunction> const& catalog,
                             QuadratureSettings const& cfg = {}) {
    auto const m = g.segment();
    if (m.length() == 0.0) return 0.0;
    quad::GaussLegendre const rule(cfg.nodes_per_panel);
    auto const grid = fast_scale_grid(m, g.eps(), cfg, rule);
    double worst = 0.0;
    for (auto const& phi : catalog) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < grid.points.size(); ++i) {
            double const x = grid.points[i], w = grid.weights[i];
            double const p0 = phi.value(x), p1 = phi.derivative(x, 1), p2 = phi.derivative(x, 2);
            num += w * std::norm(g.apply_L_at(x, p0, p1));
            den += w * (p0 * p0 + p1 * p1 + p2 * p2);
        }
        if (den > 0.0) worst = std::max(worst, std::sqrt(num / den));
    }
    return worst;
}

} // namespace fastosc
