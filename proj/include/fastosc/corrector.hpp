#pragma once

#include <numbers>

#include "fastosc/two_scale.hpp"

namespace fastosc {

/// Zero-mean second antiderivative v of V in the fast variable, with the partial
/// derivatives the gauge transform consumes.
///
/// Mode map: v_n = -c_n / (4 pi^2 n^2), so d^2v/dxi^2 = V, dv/dxi = P[V] and <v> = 0.
class CorrectorBundle {
public:
    CorrectorBundle() = default;
    CorrectorBundle(TwoScaleFunction potential, TwoScaleFunction corrector)
        : potential_(std::move(potential)), v_(std::move(corrector)) {}

    TwoScaleFunction const& potential() const { return potential_; }
    TwoScaleFunction const& v() const { return v_; }

    complex value(double x, double xi) const { return v_.eval(x, xi, 0, 0); }
    complex d_xi(double x, double xi) const { return v_.eval(x, xi, 0, 1); }
    complex d_x(double x, double xi) const { return v_.eval(x, xi, 1, 0); }
    complex d_xx(double x, double xi) const { return v_.eval(x, xi, 2, 0); }
    complex d_xxi(double x, double xi) const { return v_.eval(x, xi, 1, 1); }
    complex d_xixi(double x, double xi) const { return v_.eval(x, xi, 0, 2); }

private:
    TwoScaleFunction potential_;
    TwoScaleFunction v_;
};

inline CorrectorBundle build_corrector(TwoScaleFunction const& potential) {
    if (potential.has_zero_mode()) throw InputError("corrector requires a zero-mean potential");
    TwoScaleFunction::ModeMap m;
    double const four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
    for (auto const& [n, c] : potential.modes()) {
        for (auto const& t : c.terms) {
            if (!t.has_exact_second_derivative())
                throw InputError("corrector needs profiles with an exact second derivative (polynomial power >= 2)");
        }
        m[n] = c.scaled(-1.0 / (four_pi2 * n * n));
    }
    return {potential, TwoScaleFunction(std::move(m), potential.support_hull())};
}

} // namespace fastosc
