#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "fastosc/error.hpp"

namespace fastosc {

using complex = std::complex<double>;

/// Closed interval [lo, hi] in the slow variable.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
    bool covers(Interval const& other) const { return other.lo >= lo && other.hi <= hi; }
};

enum class ProfileKind { PolynomialBump, SmoothBump, Zero };

inline std::string to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::PolynomialBump: return "polynomial_bump";
        case ProfileKind::SmoothBump: return "smooth_bump";
        case ProfileKind::Zero: return "zero";
    }
    return "?";
}

/// Compactly supported amplitude c(x) with exact derivatives up to second order.
///
///   PolynomialBump:  A * (t (1 - t))^p,            t = (x - a) / (b - a)
///   SmoothBump:      A * exp(1 - 1 / (1 - s^2)),   s = 2 (x - a) / (b - a) - 1
///
/// Both vanish outside [a, b]. A power of 0 gives the box A * 1_[a,b].
class SlowProfile {
public:
    SlowProfile() = default;

    static SlowProfile zero() { return SlowProfile{}; }

    static SlowProfile polynomial_bump(complex amplitude, int power, Interval support) {
        if (power < 0) throw InputError("polynomial bump power must be non-negative");
        check_support(support);
        SlowProfile p;
        p.kind_ = ProfileKind::PolynomialBump;
        p.amplitude_ = amplitude;
        p.power_ = power;
        p.support_ = support;
        return p;
    }

    static SlowProfile smooth_bump(complex amplitude, Interval support) {
        check_support(support);
        SlowProfile p;
        p.kind_ = ProfileKind::SmoothBump;
        p.amplitude_ = amplitude;
        p.support_ = support;
        return p;
    }

    ProfileKind kind() const { return kind_; }
    complex amplitude() const { return amplitude_; }
    int power() const { return power_; }
    Interval support() const { return support_; }
    bool is_zero() const { return kind_ == ProfileKind::Zero || amplitude_ == complex{}; }

    SlowProfile scaled(complex factor) const {
        SlowProfile p = *this;
        p.amplitude_ *= factor;
        return p;
    }

    SlowProfile conjugated() const {
        SlowProfile p = *this;
        p.amplitude_ = std::conj(p.amplitude_);
        return p;
    }

    /// `order` in {0, 1, 2}.
    complex derivative(double x, int order) const {
        if (kind_ == ProfileKind::Zero || !support_.contains(x)) return {};
        double const len = support_.length();
        if (kind_ == ProfileKind::PolynomialBump) {
            double const t = (x - support_.lo) / len;
            double const g = t * (1.0 - t);
            double const dg = 1.0 - 2.0 * t;
            int const p = power_;
            switch (order) {
                case 0: return amplitude_ * ipow(g, p);
                case 1: return p == 0 ? complex{} : amplitude_ * (p * ipow(g, p - 1) * dg / len);
                case 2: {
                    if (p == 0) return {};
                    double acc = -2.0 * p * ipow(g, p - 1);
                    if (p >= 2) acc += p * (p - 1) * ipow(g, p - 2) * dg * dg;
                    return amplitude_ * (acc / (len * len));
                }
                default: throw InputError("profile derivative order must be 0, 1 or 2");
            }
        }
        double const s = 2.0 * (x - support_.lo) / len - 1.0;
        double const w = 1.0 - s * s;
        if (w <= 0.0) return {};
        double const e = std::exp(1.0 - 1.0 / w);
        if (e == 0.0) return {};
        double const ds = 2.0 / len;
        switch (order) {
            case 0: return amplitude_ * e;
            case 1: return amplitude_ * (e * (-2.0 * s / (w * w)) * ds);
            case 2: {
                double const w2 = w * w;
                double const d2 = 4.0 * s * s / (w2 * w2) - 2.0 / w2 - 8.0 * s * s / (w2 * w);
                return amplitude_ * (e * d2 * ds * ds);
            }
            default: throw InputError("profile derivative order must be 0, 1 or 2");
        }
    }

    complex value(double x) const { return derivative(x, 0); }

    /// Upper bound for sup |c(x)|.
    double sup_bound() const {
        if (kind_ == ProfileKind::Zero) return 0.0;
        if (kind_ == ProfileKind::PolynomialBump) return std::abs(amplitude_) * ipow(0.25, power_);
        return std::abs(amplitude_);
    }

    /// True when c is C^1 on the whole line and c'' exists off a finite set, which is
    /// what the corrector and gauge construction consume.
    bool has_exact_second_derivative() const {
        return kind_ != ProfileKind::PolynomialBump || power_ >= 2;
    }

private:
    static void check_support(Interval s) {
        if (!(s.hi > s.lo)) throw InputError("profile support must satisfy lo < hi");
    }

    static double ipow(double b, int e) {
        double r = 1.0;
        for (int i = 0; i < e; ++i) r *= b;
        return r;
    }

    ProfileKind kind_ = ProfileKind::Zero;
    complex amplitude_{};
    int power_ = 0;
    Interval support_{};
};

/// Euler Beta function B(m, m) for positive integer m, i.e. ((m-1)!)^2 / (2m-1)!.
inline double beta_symmetric(int m) {
    double r = 1.0;
    for (int j = 1; j < m; ++j) r *= static_cast<double>(j) / static_cast<double>(m - 1 + j);
    return r / static_cast<double>(2 * m - 1);
}

} // namespace fastosc
