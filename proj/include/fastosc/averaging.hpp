#pragma once

#include <cmath>
#include <vector>

#include "fastosc/quadrature.hpp"
#include "fastosc/two_scale.hpp"

namespace fastosc {

struct QuadratureSettings {
    int panels_per_period = 8;
    int nodes_per_panel = 6;
    std::size_t max_panels = 4'000'000;
};

/// Composite Gauss-Legendre layout over the hull of `segment`, with panels no wider than
/// eps / panels_per_period.
inline quad::PanelGrid fast_scale_grid(Interval segment, double eps, QuadratureSettings const& cfg,
                                       quad::GaussLegendre const& rule) {
    if (!(eps > 0.0)) throw InputError("eps must be positive");
    if (cfg.panels_per_period < 1) throw InputError("panels_per_period must be positive");
    double const width = eps / cfg.panels_per_period;
    double const needed = std::ceil(segment.length() / width - 1e-9);
    if (needed > static_cast<double>(cfg.max_panels)) throw NumericalError("resolution budget exceeded");
    return quad::PanelGrid(segment.lo, segment.hi, quad::panels_for_width(segment.lo, segment.hi, width), rule);
}

/// Integral over the line of u(x, x/eps), panels split at profile endpoints.
inline complex oscillatory_integral(TwoScaleFunction const& u, double eps, QuadratureSettings const& cfg = {}) {
    if (!(eps > 0.0)) throw InputError("eps must be positive");
    if (u.is_zero() || u.support_hull().length() == 0.0) return {};
    if (std::ceil(u.support_hull().length() * cfg.panels_per_period / eps) > static_cast<double>(cfg.max_panels))
        throw NumericalError("resolution budget exceeded");
    quad::GaussLegendre const rule(cfg.nodes_per_panel);
    auto const pts = breakpoints(u);
    complex acc{};
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        auto const grid = fast_scale_grid({pts[k], pts[k + 1]}, eps, cfg, rule);
        for (std::size_t i = 0; i < grid.points.size(); ++i) {
            double const x = grid.points[i];
            acc += grid.weights[i] * u.eval(x, x / eps);
        }
    }
    return acc;
}

/// Integral of one slow profile over its support; Beta closed form for polynomial bumps.
inline complex profile_integral(SlowProfile const& p) {
    switch (p.kind()) {
        case ProfileKind::Zero: return {};
        case ProfileKind::PolynomialBump:
            return p.amplitude() * p.support().length() * beta_symmetric(p.power() + 1);
        case ProfileKind::SmoothBump: {
            auto const s = p.support();
            return quad::adaptive([&](double x) { return p.value(x); }, s.lo, s.hi);
        }
    }
    return {};
}

/// Integral over the line of the period mean <u(x, .)>.
inline complex averaged_integral(TwoScaleFunction const& u) {
    complex acc{};
    for (auto const& t : mean_over_period(u).terms) acc += profile_integral(t);
    return acc;
}

struct DecayFit {
    std::vector<double> epsilons;
    std::vector<double> errors;
    std::vector<bool> at_floor;
    double fitted_order = 0.0;
    bool floor_flag = false;
    double floor = 0.0;
};

/// Least-squares slope of log(y) against log(x).
inline double log_log_slope(std::vector<double> const& x, std::vector<double> const& y) {
    double const n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double const lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Fits the decay order of |oscillatory_integral - averaged_integral| in eps.
/// Points whose error is below floor_rel * int sum_n |c_n| dx are treated as round-off.
inline DecayFit decay_order_fit(TwoScaleFunction const& u, std::vector<double> const& epsilons,
                                QuadratureSettings const& cfg = {}, double floor_rel = 1e-12) {
    if (u.has_zero_mode()) throw InputError("decay fit requires a zero-mean function");
    if (epsilons.size() < 3) throw InputError("decay fit needs at least 3 values of eps");
    for (std::size_t i = 1; i < epsilons.size(); ++i)
        if (!(epsilons[i] < epsilons[i - 1])) throw InputError("epsilons must be strictly decreasing");

    DecayFit fit;
    fit.epsilons = epsilons;
    auto const hull = u.support_hull();
    double const scale = hull.length() > 0.0
        ? quad::adaptive([&](double x) {
              double s = 0.0;
              for (auto const& [n, c] : u.modes()) s += std::abs(c.value(x));
              return s;
          }, hull.lo, hull.hi, 1e-10)
        : 0.0;
    fit.floor = floor_rel * scale;

    complex const mean = averaged_integral(u);
    std::vector<double> xs, ys;
    for (double eps : epsilons) {
        double const err = std::abs(oscillatory_integral(u, eps, cfg) - mean);
        bool const floor_hit = !(err > fit.floor);
        fit.errors.push_back(err);
        fit.at_floor.push_back(floor_hit);
        fit.floor_flag = fit.floor_flag || floor_hit;
        if (!floor_hit) {
            xs.push_back(eps);
            ys.push_back(err);
        }
    }
    if (xs.size() < 3) throw NumericalError("insufficient dynamic range");
    fit.fitted_order = log_log_slope(xs, ys);
    return fit;
}

} // namespace fastosc
