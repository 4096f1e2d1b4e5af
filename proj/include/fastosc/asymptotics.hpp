#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "fastosc/averaging.hpp"
#include "fastosc/gauge.hpp"
#include "fastosc/quadrature.hpp"
#include "fastosc/two_scale.hpp"

namespace fastosc {

enum class Existence { Exists, Absent, Inconclusive };

inline std::string to_string(Existence e) {
    switch (e) {
        case Existence::Exists: return "Exists";
        case Existence::Absent: return "Absent";
        case Existence::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct K2Report {
    complex value;
    complex by_quadrature;
    complex by_closed_form;
    double agreement = 0.0;
    bool flagged = false;
    /// Scale used for the degeneracy test: (1/2) int sum_n |P[V]_n|^2 dx >= |k2|.
    double scale = 0.0;
    Existence classification = Existence::Inconclusive;
};

/// Exists iff Re k2 > tol, Absent iff Re k2 < -tol.
inline Existence classify_existence(complex k2, double degeneracy_tol) {
    if (k2.real() > degeneracy_tol) return Existence::Exists;
    if (k2.real() < -degeneracy_tol) return Existence::Absent;
    return Existence::Inconclusive;
}

/// Leading term of the emerging eigenvalue, -eps^4 k2^2.
inline complex predict_lambda(complex k2, double eps) {
    double const e2 = eps * eps;
    return -(e2 * e2) * k2 * k2;
}

namespace detail {

template <typename F>
auto piecewise_integral(F&& f, std::vector<double> const& pts, double tol = 1e-15) -> decltype(f(0.0)) {
    decltype(f(0.0)) acc{};
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) acc += quad::adaptive(f, pts[i], pts[i + 1], tol);
    return acc;
}

/// Integral over the line of a(x) b(x) for two slow profiles.
inline complex product_integral(SlowProfile const& a, SlowProfile const& b) {
    if (a.kind() == ProfileKind::Zero || b.kind() == ProfileKind::Zero) return {};
    auto const sa = a.support(), sb = b.support();
    if (a.kind() == ProfileKind::PolynomialBump && b.kind() == ProfileKind::PolynomialBump && sa.lo == sb.lo
        && sa.hi == sb.hi) {
        return a.amplitude() * b.amplitude() * sa.length() * beta_symmetric(a.power() + b.power() + 1);
    }
    double const lo = std::max(sa.lo, sb.lo), hi = std::min(sa.hi, sb.hi);
    if (!(hi > lo)) return {};
    return quad::adaptive([&](double x) { return a.value(x) * b.value(x); }, lo, hi, 1e-15);
}

} // namespace detail

/// k2 = (1/2) int <(P[V](x, .))^2> dx, by two routes:
///   quadrature:   x-quadrature of sum_n P_n(x) P_{-n}(x) built from p_transform(V);
///   closed form:  (1/2) sum_{n>=1} int c_n c_{-n} dx / (2 pi^2 n^2), Beta integrals where possible.
inline K2Report compute_k2(TwoScaleFunction const& potential, double tol = 1e-10, double degeneracy_rel = 1e-12) {
    if (potential.has_zero_mode()) throw InputError("k2 requires a zero-mean potential");
    K2Report r;
    auto const p = p_transform(potential);
    auto const pts = breakpoints(potential);

    if (!p.is_zero()) {
        r.by_quadrature = 0.5 * detail::piecewise_integral([&](double x) {
            complex acc{};
            for (auto const& [n, c] : p.modes()) acc += c.value(x) * p.coefficient(-n).value(x);
            return acc;
        }, pts);
        r.scale = 0.5 * detail::piecewise_integral([&](double x) {
            double acc = 0.0;
            for (auto const& [n, c] : p.modes()) acc += std::norm(c.value(x));
            return acc;
        }, pts);
    }

    double const pi2 = std::numbers::pi * std::numbers::pi;
    for (auto const& [n, c] : potential.modes()) {
        if (n <= 0) continue;
        auto const partner = potential.coefficient(-n);
        complex pair{};
        for (auto const& a : c.terms)
            for (auto const& b : partner.terms) pair += detail::product_integral(a, b);
        r.by_closed_form += 0.5 * pair / (2.0 * pi2 * n * n);
    }

    r.value = r.by_closed_form;
    r.agreement = std::abs(r.by_quadrature - r.by_closed_form) / (std::abs(r.value) + std::numeric_limits<double>::min());
    if (r.value == complex{} && r.by_quadrature == complex{}) r.agreement = 0.0;
    r.flagged = r.agreement > tol;
    r.classification = classify_existence(r.value, degeneracy_rel * r.scale);
    return r;
}

struct KEpsReport {
    double eps = 0.0;
    complex m1;
    complex m2;
    complex k_eps;
};

/// m1 = int L[1] dx, m2 = int L[G] dx with G(x) = int |x - t| L[1](t) dt,
/// k_eps = (eps/2) m1 + (eps^2/2) m2.
inline KEpsReport compute_k_eps(TwoScaleFunction const& potential, double eps, QuadratureSettings const& cfg = {}) {
    auto const g = build_gauge(potential, eps);
    KEpsReport r;
    r.eps = eps;
    auto const m = g.segment();
    if (potential.is_zero() || m.length() == 0.0) return r;

    quad::GaussLegendre const rule(cfg.nodes_per_panel);
    auto const grid = fast_scale_grid(m, eps, cfg, rule);
    std::size_t const n = grid.points.size();

    std::vector<complex> l1(n), xl1(n), qv(n), fv(n), dv(n);
    for (std::size_t i = 0; i < n; ++i) {
        double const x = grid.points[i];
        qv[i] = g.q(x);
        fv[i] = g.f(x);
        dv[i] = g.dv_total(x);
        l1[i] = -fv[i] / qv[i];
        xl1[i] = x * l1[i];
    }
    r.m1 = grid.integrate(l1);

    auto const i0 = grid.cumulative(l1, rule);
    auto const i1 = grid.cumulative(xl1, rule);
    complex const j0 = r.m1;
    complex const j1 = grid.integrate(xl1);

    std::vector<complex> lg(n);
    for (std::size_t i = 0; i < n; ++i) {
        double const x = grid.points[i];
        complex const big_g = 2.0 * x * i0[i] - 2.0 * i1[i] + j1 - x * j0;
        complex const big_g1 = 2.0 * i0[i] - j0;
        lg[i] = eps * (2.0 / qv[i]) * dv[i] * big_g1 - (fv[i] / qv[i]) * big_g;
    }
    r.m2 = grid.integrate(lg);
    r.k_eps = 0.5 * eps * r.m1 + 0.5 * eps * eps * r.m2;
    return r;
}

struct ExpansionFit {
    complex c1;
    complex c2;
};

/// Least-squares fit of k_eps ~ eps c1 + eps^2 c2 over the reports.
inline ExpansionFit fit_expansion(std::vector<KEpsReport> const& reports) {
    if (reports.size() < 3) throw InputError("expansion fit needs at least 3 values of eps");
    double a11 = 0, a12 = 0, a22 = 0;
    complex b1{}, b2{};
    for (auto const& r : reports) {
        double const e = r.eps, e2 = e * e;
        a11 += e2;
        a12 += e2 * e;
        a22 += e2 * e2;
        b1 += e * r.k_eps;
        b2 += e2 * r.k_eps;
    }
    double const det = a11 * a22 - a12 * a12;
    if (!(std::abs(det) > 0.0)) throw InputError("expansion fit needs distinct values of eps");
    return {(a22 * b1 - a12 * b2) / det, (a11 * b2 - a12 * b1) / det};
}

} // namespace fastosc
