#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "fastosc/error.hpp"

namespace fastosc::quad {

using complex = std::complex<double>;

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(int n) : nodes(n), weights(n) {
        if (n < 1) throw InputError("Gauss-Legendre rule needs at least one node");
        for (int i = 0; i < n; ++i) {
            // Chebyshev initial guess, then Newton on P_n
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double dp = 1.0;
            for (int it = 0; it < 100; ++it) {
                auto [p, d] = legendre_with_derivative(n, x);
                dp = d;
                double const dx = p / d;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            dp = legendre_with_derivative(n, x).second;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }

    int size() const { return static_cast<int>(nodes.size()); }

    static double legendre(int k, double x) {
        if (k == 0) return 1.0;
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= k; ++j) {
            double const p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        return p1;
    }

    static std::pair<double, double> legendre_with_derivative(int n, double x) {
        double const p = legendre(n, x);
        double const pm = legendre(n - 1, x);
        return {p, n * (x * p - pm) / (x * x - 1.0)};
    }

    /// S(i, j) = integral from -1 to nodes[i] of the j-th Lagrange basis polynomial.
    /// Exact for polynomials of degree < size(); used for running integrals inside a panel.
    std::vector<std::vector<double>> integration_matrix() const {
        int const n = size();
        std::vector<std::vector<double>> s(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i) {
            double const xi = nodes[i];
            for (int j = 0; j < n; ++j) {
                double acc = 0.5 * (xi + 1.0);
                for (int k = 1; k < n; ++k) {
                    acc += 0.5 * legendre(k, nodes[j]) * (legendre(k + 1, xi) - legendre(k - 1, xi));
                }
                s[i][j] = weights[j] * acc;
            }
        }
        return s;
    }
};

/// Composite Gauss-Legendre layout over [a, b] with equal panels.
/// Node k of panel p sits at points[p * order + k].
struct PanelGrid {
    double a = 0.0;
    double b = 0.0;
    std::size_t panels = 0;
    int order = 0;
    std::vector<double> points;
    std::vector<double> weights;

    PanelGrid(double lo, double hi, std::size_t n_panels, GaussLegendre const& rule)
        : a(lo), b(hi), panels(n_panels), order(rule.size()) {
        if (!(hi >= lo)) throw InputError("panel grid needs lo <= hi");
        if (n_panels == 0) throw InputError("panel grid needs at least one panel");
        double const width = (hi - lo) / static_cast<double>(n_panels);
        points.reserve(n_panels * order);
        weights.reserve(n_panels * order);
        for (std::size_t p = 0; p < n_panels; ++p) {
            double const left = lo + width * static_cast<double>(p);
            for (int k = 0; k < order; ++k) {
                points.push_back(left + 0.5 * width * (rule.nodes[k] + 1.0));
                weights.push_back(0.5 * width * rule.weights[k]);
            }
        }
    }

    double panel_width() const { return (b - a) / static_cast<double>(panels); }

    template <typename T>
    T integrate(std::vector<T> const& samples) const {
        T acc{};
        for (std::size_t i = 0; i < samples.size(); ++i) acc += weights[i] * samples[i];
        return acc;
    }

    /// Running integral from a to each node, spectrally accurate within a panel.
    std::vector<complex> cumulative(std::vector<complex> const& samples, GaussLegendre const& rule) const {
        auto const s = rule.integration_matrix();
        double const half = 0.5 * panel_width();
        std::vector<complex> out(samples.size());
        complex before{};
        for (std::size_t p = 0; p < panels; ++p) {
            std::size_t const base = p * order;
            for (int i = 0; i < order; ++i) {
                complex partial{};
                for (int j = 0; j < order; ++j) partial += s[i][j] * samples[base + j];
                out[base + i] = before + half * partial;
            }
            complex total{};
            for (int j = 0; j < order; ++j) total += weights[base + j] * samples[base + j];
            before += total;
        }
        return out;
    }
};

/// Number of equal panels over [a, b] so that each panel is at most `max_width` wide.
inline std::size_t panels_for_width(double a, double b, double max_width) {
    if (!(max_width > 0.0)) throw InputError("panel width must be positive");
    double const n = std::ceil((b - a) / max_width - 1e-9);
    return static_cast<std::size_t>(std::max(1.0, n));
}

/// Adaptive Gauss-Legendre: bisect until the 10-point rule and its two halves agree.
template <typename F>
auto adaptive(F&& f, double a, double b, double tol = 1e-14, int depth = 40)
    -> decltype(f(a)) {
    using T = decltype(f(a));
    static GaussLegendre const rule(10);
    auto panel = [&](double lo, double hi) {
        T acc{};
        double const half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        for (int k = 0; k < rule.size(); ++k) acc += rule.weights[k] * f(mid + half * rule.nodes[k]);
        return half * acc;
    };
    std::function<T(double, double, T, int)> recurse = [&](double lo, double hi, T whole, int d) -> T {
        double const mid = 0.5 * (lo + hi);
        T const left = panel(lo, mid);
        T const right = panel(mid, hi);
        T const both = left + right;
        if (d <= 0 || std::abs(both - whole) <= tol * (1.0 + std::abs(both))) return both;
        return recurse(lo, mid, left, d - 1) + recurse(mid, hi, right, d - 1);
    };
    if (b <= a) return T{};
    return recurse(a, b, panel(a, b), depth);
}

} // namespace fastosc::quad
