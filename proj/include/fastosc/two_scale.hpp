#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <vector>

#include "fastosc/error.hpp"
#include "fastosc/profile.hpp"

namespace fastosc {

/// Linear combination of slow profiles; the x-coefficient of one Fourier mode.
struct Coefficient {
    std::vector<SlowProfile> terms;

    Coefficient() = default;
    Coefficient(SlowProfile p) { // NOLINT(google-explicit-constructor)
        if (p.kind() != ProfileKind::Zero) terms.push_back(p);
    }

    bool is_zero() const {
        return std::all_of(terms.begin(), terms.end(), [](auto const& t) { return t.is_zero(); });
    }

    complex derivative(double x, int order) const {
        complex acc{};
        for (auto const& t : terms) acc += t.derivative(x, order);
        return acc;
    }
    complex value(double x) const { return derivative(x, 0); }

    Coefficient scaled(complex f) const {
        Coefficient c;
        for (auto const& t : terms) c.terms.push_back(t.scaled(f));
        return c;
    }
    Coefficient conjugated() const {
        Coefficient c;
        for (auto const& t : terms) c.terms.push_back(t.conjugated());
        return c;
    }

    double sup_bound() const {
        double s = 0.0;
        for (auto const& t : terms) s += t.sup_bound();
        return s;
    }

    std::optional<Interval> hull() const {
        std::optional<Interval> h;
        for (auto const& t : terms) {
            if (t.kind() == ProfileKind::Zero) continue;
            auto const s = t.support();
            h = h ? Interval{std::min(h->lo, s.lo), std::max(h->hi, s.hi)} : s;
        }
        return h;
    }

    friend Coefficient operator+(Coefficient a, Coefficient const& b) {
        a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
        return a;
    }
};

/// u(x, xi) = sum_n c_n(x) exp(2 pi i n xi): 1-periodic in xi, compactly supported in x.
class TwoScaleFunction {
public:
    using ModeMap = std::map<int, Coefficient>;

    TwoScaleFunction() = default;

    /// Hull is taken from the mode supports.
    explicit TwoScaleFunction(ModeMap modes) : modes_(std::move(modes)) {
        prune();
        support_ = natural_hull().value_or(Interval{0.0, 0.0});
    }

    /// Explicit segment M; must cover every mode support.
    TwoScaleFunction(ModeMap modes, Interval support) : modes_(std::move(modes)), support_(support) {
        prune();
        if (!(support.hi >= support.lo)) throw InputError("support segment must satisfy lo <= hi");
        if (auto h = natural_hull(); h && !support.covers(*h))
            throw InputError("support segment does not cover the mode supports");
    }

    /// a(x) cos(2 pi n xi), expanded to the conjugate pair of modes +-n.
    static TwoScaleFunction cosine(SlowProfile amplitude, int n = 1) {
        if (n == 0) throw InputError("cosine mode needs n != 0");
        auto half = Coefficient(amplitude.scaled(0.5));
        return TwoScaleFunction(ModeMap{{n, half}, {-n, half}});
    }

    /// a(x) sin(2 pi n xi).
    static TwoScaleFunction sine(SlowProfile amplitude, int n = 1) {
        if (n == 0) throw InputError("sine mode needs n != 0");
        complex const h = complex(0.0, -0.5);
        return TwoScaleFunction(ModeMap{{n, Coefficient(amplitude.scaled(h))},
                                        {-n, Coefficient(amplitude.scaled(-h))}});
    }

    ModeMap const& modes() const { return modes_; }
    Interval support_hull() const { return support_; }
    bool is_zero() const { return modes_.empty(); }

    bool has_zero_mode() const { return modes_.count(0) != 0; }

    /// d^dx/dx^dx d^dxi/dxi^dxi u at (x, xi); dx, dxi in {0, 1, 2}.
    complex eval(double x, double xi, int dx = 0, int dxi = 0) const {
        if (!support_.contains(x)) return {};
        complex acc{};
        double const two_pi = 2.0 * std::numbers::pi;
        for (auto const& [n, c] : modes_) {
            complex const cn = c.derivative(x, dx);
            if (cn == complex{}) continue;
            complex factor = 1.0;
            complex const k = complex(0.0, two_pi * n);
            for (int i = 0; i < dxi; ++i) factor *= k;
            double const phase = two_pi * std::remainder(n * xi, 1.0);
            acc += cn * factor * complex(std::cos(phase), std::sin(phase));
        }
        return acc;
    }

    complex operator()(double x, double xi) const { return eval(x, xi); }

    /// Mode coefficient c_n; zero when n is absent.
    Coefficient coefficient(int n) const {
        auto it = modes_.find(n);
        return it == modes_.end() ? Coefficient{} : it->second;
    }

    TwoScaleFunction scaled(complex f) const {
        ModeMap m;
        for (auto const& [n, c] : modes_) m[n] = c.scaled(f);
        return TwoScaleFunction(std::move(m), support_);
    }

    /// Sum over mode maps; the support segment is the hull of both segments.
    friend TwoScaleFunction operator+(TwoScaleFunction const& a, TwoScaleFunction const& b) {
        ModeMap m = a.modes_;
        for (auto const& [n, c] : b.modes_) m[n] = m[n] + c;
        Interval s = a.support_;
        if (a.is_zero()) s = b.support_;
        else if (!b.is_zero()) s = {std::min(a.support_.lo, b.support_.lo), std::max(a.support_.hi, b.support_.hi)};
        return TwoScaleFunction(std::move(m), s);
    }

    /// Checks c_{-n}(x) = conj(c_n(x)) on `samples` equispaced points of the hull.
    bool is_real(double tol = 1e-13, int samples = 64) const {
        for (auto const& [n, c] : modes_) {
            auto const partner = coefficient(-n);
            for (int i = 0; i <= samples; ++i) {
                double const x = support_.lo + support_.length() * i / samples;
                complex const a = c.value(x);
                complex const b = partner.value(x);
                if (std::abs(a - std::conj(b)) > tol * (1.0 + std::abs(a))) return false;
            }
        }
        return true;
    }

    /// Upper bound of sup |u| from the profile bounds.
    double sup_bound() const {
        double s = 0.0;
        for (auto const& [n, c] : modes_) s += c.sup_bound();
        return s;
    }

private:
    void prune() {
        for (auto it = modes_.begin(); it != modes_.end();) {
            if (it->second.is_zero()) it = modes_.erase(it);
            else ++it;
        }
    }

    std::optional<Interval> natural_hull() const {
        std::optional<Interval> h;
        for (auto const& [n, c] : modes_) {
            auto const s = c.hull();
            if (!s) continue;
            h = h ? Interval{std::min(h->lo, s->lo), std::max(h->hi, s->hi)} : *s;
        }
        return h;
    }

    ModeMap modes_;
    Interval support_{};
};

/// Hull endpoints plus every profile endpoint inside the hull, sorted: the points where
/// u(x, xi) may lose smoothness in x.
inline std::vector<double> breakpoints(TwoScaleFunction const& u) {
    std::set<double> pts;
    auto const h = u.support_hull();
    pts.insert(h.lo);
    pts.insert(h.hi);
    for (auto const& [n, c] : u.modes())
        for (auto const& t : c.terms) {
            if (t.kind() == ProfileKind::Zero) continue;
            for (double e : {t.support().lo, t.support().hi})
                if (h.contains(e)) pts.insert(e);
        }
    return {pts.begin(), pts.end()};
}

inline complex eval_two_scale(TwoScaleFunction const& u, double x, double xi) { return u.eval(x, xi); }

/// Period mean: the n = 0 coefficient.
inline Coefficient mean_over_period(TwoScaleFunction const& u) { return u.coefficient(0); }

/// Zero-mean antiderivative in xi: c_n -> c_n / (2 pi i n).
inline TwoScaleFunction p_transform(TwoScaleFunction const& u) {
    if (u.has_zero_mode()) throw InputError("P requires zero-mean input");
    TwoScaleFunction::ModeMap m;
    for (auto const& [n, c] : u.modes()) m[n] = c.scaled(1.0 / complex(0.0, 2.0 * std::numbers::pi * n));
    return TwoScaleFunction(std::move(m), u.support_hull());
}

} // namespace fastosc
