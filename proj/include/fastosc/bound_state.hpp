#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fastosc/error.hpp"
#include "fastosc/gauge.hpp"
#include "fastosc/two_scale.hpp"

namespace fastosc {

struct SolverConfig {
    int points_per_fast_period = 320;
    double root_tol = 1e-13;
    double kappa_floor = 1e-9;
    Interval scan_window{1e-6, 0.5};
    int scan_samples = 2000;
    int max_iterations = 200;

    void validate() const {
        if (points_per_fast_period < 20) throw InputError("points_per_fast_period must be >= 20");
        if (!(root_tol > 0.0)) throw InputError("root_tol must be positive");
        if (!(kappa_floor > 0.0)) throw InputError("kappa_floor must be positive");
        if (!(scan_window.hi > scan_window.lo)) throw InputError("scan window must satisfy lo < hi");
        if (scan_samples < 2) throw InputError("scan_samples must be >= 2");
    }
};

/// Propagator of (u, u') across M at fixed spectral parameter.
struct TransferMatrix {
    complex a, b, c, d; // [[a, b], [c, d]]

    complex det() const { return a * d - b * c; }
};

/// Fixed-step RK4 discretization of u'' = -p(x) u' + (V(x) - lambda) u on M.
/// Coefficients are sampled once at the step nodes and midpoints; only lambda varies.
class ShootingProblem {
public:
    /// u'' = (V(x, x/eps) - lambda) u with step <= h.
    static ShootingProblem from_potential(TwoScaleFunction const& potential, double eps, double h) {
        ShootingProblem s(potential.support_hull(), h);
        s.pot_.resize(2 * s.steps_ + 1);
        for (std::size_t j = 0; j < s.pot_.size(); ++j) {
            double const x = s.node(j);
            s.pot_[j] = potential.eval(x, x / eps);
        }
        s.eval_ = [potential, eps](double x) { return std::pair<complex, complex>{potential.eval(x, x / eps), {}}; };
        return s;
    }

    /// psi'' = -(2 q'/q) psi' + (eps f/q - lambda) psi, the problem for psi = phi / q.
    static ShootingProblem from_gauge(GaugeData const& g, double h) {
        ShootingProblem s(g.segment(), h);
        s.pot_.resize(2 * s.steps_ + 1);
        s.drift_.resize(2 * s.steps_ + 1);
        for (std::size_t j = 0; j < s.pot_.size(); ++j) {
            double const x = s.node(j);
            s.pot_[j] = g.transformed_potential(x);
            s.drift_[j] = g.transformed_drift(x);
        }
        s.eval_ = [g](double x) {
            return std::pair<complex, complex>{g.transformed_potential(x), g.transformed_drift(x)};
        };
        return s;
    }

    Interval segment() const { return m_; }
    double step() const { return h_; }
    std::size_t steps() const { return steps_; }

    TransferMatrix transfer(complex lambda) const {
        State c0{1.0, 0.0}, c1{0.0, 1.0};
        for (std::size_t k = 0; k < steps_; ++k) {
            c0 = rk4(c0, k, lambda);
            c1 = rk4(c1, k, lambda);
        }
        return {c0.u, c1.u, c0.w, c1.w};
    }

    /// F(kappa) = w2 + kappa w1 with w = T(-kappa^2) (1, kappa).
    complex mismatch(complex kappa) const {
        if (!(kappa.real() > 0.0)) throw InputError("kappa not in the physical half-plane (Re kappa must be > 0)");
        State s{1.0, kappa};
        complex const lambda = -kappa * kappa;
        for (std::size_t k = 0; k < steps_; ++k) s = rk4(s, k, lambda);
        return s.w + kappa * s.u;
    }

    struct Trajectory {
        std::vector<double> x;
        std::vector<complex> u;
        std::vector<complex> du;
        std::vector<double> norm2; // running int |u|^2 from x0
    };

    /// States at every step node from (u, u')(x0) = (1, kappa).
    Trajectory march(complex kappa) const {
        Trajectory t;
        complex const lambda = -kappa * kappa;
        AugState s{1.0, kappa, 0.0};
        t.x.push_back(m_.lo);
        t.u.push_back(s.u);
        t.du.push_back(s.w);
        t.norm2.push_back(0.0);
        for (std::size_t k = 0; k < steps_; ++k) {
            s = rk4_aug(s, pot_[2 * k], pot_[2 * k + 1], pot_[2 * k + 2], drift_at(2 * k), drift_at(2 * k + 1),
                        drift_at(2 * k + 2), h_, lambda);
            t.x.push_back(k + 1 == steps_ ? m_.hi : m_.lo + h_ * static_cast<double>(k + 1));
            t.u.push_back(s.u);
            t.du.push_back(s.w);
            t.norm2.push_back(s.n);
        }
        return t;
    }

    /// (u, u') at x inside M from a partial step off the trajectory node below x.
    std::pair<complex, complex> interpolate(Trajectory const& t, double x, complex kappa) const {
        std::size_t k = static_cast<std::size_t>(std::floor((x - m_.lo) / h_));
        k = std::min(k, steps_ - 1);
        double const dx = x - t.x[k];
        if (dx == 0.0) return {t.u[k], t.du[k]};
        auto const [v0, p0] = eval_(t.x[k]);
        auto const [vm, pm] = eval_(t.x[k] + 0.5 * dx);
        auto const [v1, p1] = eval_(x);
        AugState s{t.u[k], t.du[k], 0.0};
        s = rk4_aug(s, v0, vm, v1, p0, pm, p1, dx, -kappa * kappa);
        return {s.u, s.w};
    }

private:
    ShootingProblem(Interval m, double h) : m_(m) {
        if (!(h > 0.0)) throw InputError("step must be positive");
        steps_ = static_cast<std::size_t>(std::max(1.0, std::ceil(m.length() / h - 1e-9)));
        h_ = m.length() / static_cast<double>(steps_);
    }

    double node(std::size_t j) const {
        return j == 2 * steps_ ? m_.hi : m_.lo + 0.5 * h_ * static_cast<double>(j);
    }

    complex drift_at(std::size_t j) const { return drift_.empty() ? complex{} : drift_[j]; }

    struct State {
        complex u, w;
    };
    struct AugState {
        complex u, w;
        double n;
    };

    State rk4(State s, std::size_t k, complex lambda) const {
        auto const r = rk4_aug({s.u, s.w, 0.0}, pot_[2 * k], pot_[2 * k + 1], pot_[2 * k + 2], drift_at(2 * k),
                               drift_at(2 * k + 1), drift_at(2 * k + 2), h_, lambda);
        return {r.u, r.w};
    }

    static AugState rk4_aug(AugState s, complex v0, complex vm, complex v1, complex p0, complex pm, complex p1,
                            double h, complex lambda) {
        auto f = [&](complex u, complex w, complex v, complex p) {
            return AugState{w, (v - lambda) * u - p * w, std::norm(u)};
        };
        auto const k1 = f(s.u, s.w, v0, p0);
        auto const k2 = f(s.u + 0.5 * h * k1.u, s.w + 0.5 * h * k1.w, vm, pm);
        auto const k3 = f(s.u + 0.5 * h * k2.u, s.w + 0.5 * h * k2.w, vm, pm);
        auto const k4 = f(s.u + h * k3.u, s.w + h * k3.w, v1, p1);
        return {s.u + h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u),
                s.w + h / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w),
                s.n + h / 6.0 * (k1.n + 2.0 * k2.n + 2.0 * k3.n + k4.n)};
    }

    Interval m_;
    double h_ = 0.0;
    std::size_t steps_ = 0;
    std::vector<complex> pot_;
    std::vector<complex> drift_;
    std::function<std::pair<complex, complex>(double)> eval_;
};

inline TransferMatrix transfer_matrix(TwoScaleFunction const& potential, double eps, complex lambda, double h) {
    if (!(eps > 0.0)) throw InputError("eps must be positive");
    if (!(h > 0.0) || h > eps / 20.0 * (1.0 + 1e-12)) throw InputError("step too large (h must be <= eps/20)");
    return ShootingProblem::from_potential(potential, eps, h).transfer(lambda);
}

inline complex mismatch(TwoScaleFunction const& potential, double eps, complex kappa, SolverConfig const& cfg = {}) {
    if (!(kappa.real() > 0.0)) throw InputError("kappa not in the physical half-plane (Re kappa must be > 0)");
    cfg.validate();
    return ShootingProblem::from_potential(potential, eps, eps / cfg.points_per_fast_period).mismatch(kappa);
}

/// Mismatch of the conjugated problem for psi = phi / q; same zeros as `mismatch`.
inline complex gauged_mismatch(TwoScaleFunction const& potential, double eps, complex kappa,
                               SolverConfig const& cfg = {}) {
    cfg.validate();
    return ShootingProblem::from_gauge(build_gauge(potential, eps), eps / cfg.points_per_fast_period).mismatch(kappa);
}

struct BoundStateResult {
    complex kappa;
    complex lambda;
    double mismatch_residual = 0.0;
    int iterations = 0;
    double step = 0.0;
    bool converged = false;
};

struct BoundStateSearch {
    std::optional<BoundStateResult> result;
    std::string reason;
    int iterations = 0;
    complex last_kappa;
    double last_residual = std::numeric_limits<double>::quiet_NaN();
    double step = 0.0;
};

namespace detail {

/// Safeguarded secant on a sign-changing bracket of the real mismatch.
inline BoundStateSearch bracketed_root(ShootingProblem const& sp, double lo, double hi, SolverConfig const& cfg) {
    BoundStateSearch out;
    out.step = sp.step();
    auto fr = [&](double k) { return sp.mismatch(k).real(); };
    double flo = fr(lo), fhi = fr(hi);
    if (flo == 0.0) hi = lo, fhi = flo;
    if (fhi == 0.0) lo = hi, flo = fhi;
    if (flo * fhi > 0.0) {
        out.reason = "no sign change in bracket";
        return out;
    }
    double k = 0.5 * (lo + hi);
    double fk = 0.0;
    bool bisect_next = false;
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        out.iterations = it;
        double trial = bisect_next ? 0.5 * (lo + hi) : (lo * fhi - hi * flo) / (fhi - flo);
        if (!(trial > lo && trial < hi)) trial = 0.5 * (lo + hi);
        double const width_before = hi - lo;
        k = trial;
        fk = fr(k);
        if (std::abs(fk) <= cfg.root_tol || fk == 0.0) break;
        if ((fk < 0.0) == (flo < 0.0)) lo = k, flo = fk;
        else hi = k, fhi = fk;
        // force a bisection when the secant stalls on one side
        bisect_next = (hi - lo) > 0.5 * width_before;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(k)) break;
    }
    complex const f = sp.mismatch(k);
    out.last_kappa = k;
    out.last_residual = std::abs(f);
    if (out.last_residual <= cfg.root_tol && k > cfg.kappa_floor) {
        out.result = BoundStateResult{k, -complex(k) * complex(k), out.last_residual, out.iterations, sp.step(), true};
    } else {
        out.reason = "bracket collapsed without reaching root_tol";
    }
    return out;
}

/// Newton with a central-difference derivative, confined to Re kappa > kappa_floor.
inline BoundStateSearch newton_root(ShootingProblem const& sp, complex kappa, SolverConfig const& cfg) {
    BoundStateSearch out;
    out.step = sp.step();
    if (!(kappa.real() > cfg.kappa_floor)) {
        kappa = complex(std::max(std::abs(kappa.real()), 2.0 * cfg.kappa_floor), kappa.imag());
    }
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        out.iterations = it;
        complex const f = sp.mismatch(kappa);
        out.last_kappa = kappa;
        out.last_residual = std::abs(f);
        if (out.last_residual <= cfg.root_tol) {
            out.result = BoundStateResult{kappa, -kappa * kappa, out.last_residual, it, sp.step(), true};
            return out;
        }
        double const delta = 1e-6 * std::abs(kappa);
        if (kappa.real() - delta <= 0.0) {
            out.reason = "iterate too close to the half-plane boundary";
            return out;
        }
        complex const df = (sp.mismatch(kappa + delta) - sp.mismatch(kappa - delta)) / (2.0 * delta);
        if (df == complex{}) {
            out.reason = "vanishing derivative";
            return out;
        }
        complex const next = kappa - f / df;
        if (!(next.real() > cfg.kappa_floor) || !std::isfinite(next.real()) || !std::isfinite(next.imag())) {
            out.last_kappa = next;
            out.reason = "iterate left the physical half-plane";
            return out;
        }
        if (std::abs(next - kappa) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(kappa)) {
            kappa = next;
            complex const fn = sp.mismatch(kappa);
            out.last_kappa = kappa;
            out.last_residual = std::abs(fn);
            if (out.last_residual <= cfg.root_tol)
                out.result = BoundStateResult{kappa, -kappa * kappa, out.last_residual, it, sp.step(), true};
            else
                out.reason = "stagnated above root_tol";
            return out;
        }
        kappa = next;
    }
    out.reason = "max iterations reached";
    return out;
}

} // namespace detail

/// Bound state with step h. Real potentials with a positive guess are bracketed
/// around [kappa0/10, 10 kappa0]; other cases run Newton from kappa0.
inline BoundStateSearch solve_with_step(TwoScaleFunction const& potential, double eps, double h,
                                        std::optional<complex> k2_hint, SolverConfig const& cfg,
                                        std::optional<Interval> bracket = std::nullopt) {
    cfg.validate();
    if (potential.is_zero()) {
        BoundStateSearch out;
        out.reason = "free operator has no bound states";
        out.step = h;
        return out;
    }
    auto const sp = ShootingProblem::from_potential(potential, eps, h);
    bool const real = potential.is_real();

    if (bracket) {
        if (!real) throw InputError("explicit brackets need a real potential");
        if (!(bracket->lo > 0.0)) throw InputError("bracket must lie in kappa > 0");
        return detail::bracketed_root(sp, bracket->lo, bracket->hi, cfg);
    }
    if (!k2_hint) throw InputError("need a k2 hint or an explicit bracket");
    complex const kappa0 = eps * eps * *k2_hint;

    if (real && kappa0.real() > cfg.kappa_floor) {
        double lo = kappa0.real() / 10.0, hi = kappa0.real() * 10.0;
        auto fr = [&](double k) { return sp.mismatch(k).real(); };
        double flo = fr(lo), fhi = fr(hi);
        while (flo * fhi > 0.0) {
            bool moved = false;
            if (lo > cfg.kappa_floor) {
                lo = std::max(lo / 10.0, cfg.kappa_floor);
                flo = fr(lo);
                moved = true;
            }
            if (flo * fhi > 0.0 && hi < cfg.scan_window.hi) {
                hi = std::min(hi * 10.0, cfg.scan_window.hi);
                fhi = fr(hi);
                moved = true;
            }
            if (!moved) break;
        }
        if (flo * fhi > 0.0) {
            BoundStateSearch out;
            out.reason = "no sign change between kappa_floor and scan window end";
            out.step = sp.step();
            return out;
        }
        return detail::bracketed_root(sp, lo, hi, cfg);
    }
    return detail::newton_root(sp, kappa0, cfg);
}

inline BoundStateSearch find_bound_state(TwoScaleFunction const& potential, double eps,
                                         std::optional<complex> k2_hint, SolverConfig const& cfg = {},
                                         std::optional<Interval> bracket = std::nullopt) {
    if (!(eps > 0.0)) throw InputError("eps must be positive");
    cfg.validate();
    return solve_with_step(potential, eps, eps / cfg.points_per_fast_period, k2_hint, cfg, bracket);
}

struct HalfPlaneScan {
    double min_abs = std::numeric_limits<double>::infinity();
    complex argmin;
    int samples = 0;
};

/// min |F| over a polar grid on the disk |kappa - center| <= radius, restricted to Re kappa > kappa_floor.
inline HalfPlaneScan half_plane_min_mismatch(TwoScaleFunction const& potential, double eps, complex center,
                                             double radius, SolverConfig const& cfg = {}, int rings = 24,
                                             int spokes = 48) {
    cfg.validate();
    auto const sp = ShootingProblem::from_potential(potential, eps, eps / cfg.points_per_fast_period);
    HalfPlaneScan out;
    auto visit = [&](complex k) {
        if (!(k.real() > cfg.kappa_floor)) return;
        double const a = std::abs(sp.mismatch(k));
        ++out.samples;
        if (a < out.min_abs) out.min_abs = a, out.argmin = k;
    };
    visit(center);
    for (int r = 1; r <= rings; ++r) {
        double const rad = radius * r / rings;
        for (int s = 0; s < spokes; ++s) {
            double const th = 2.0 * std::numbers::pi * s / spokes;
            visit(center + std::polar(rad, th));
        }
    }
    return out;
}

struct RootScan {
    std::vector<double> roots;
    std::vector<double> residuals;
    std::size_t count() const { return roots.size(); }
};

/// Counts sign changes of Re F on log-spaced kappa samples over the window and polishes each.
inline RootScan scan_roots(TwoScaleFunction const& potential, double eps, Interval window, int samples,
                           SolverConfig const& cfg = {}) {
    cfg.validate();
    if (!potential.is_real()) throw InputError("root scan needs a real potential; use the Newton path");
    if (!(window.lo >= cfg.kappa_floor) || !(window.hi > window.lo))
        throw InputError("scan window must lie in (kappa_floor, kappa_max]");
    if (samples < 2) throw InputError("scan needs at least 2 samples");
    RootScan out;
    if (potential.is_zero()) return out;
    auto const sp = ShootingProblem::from_potential(potential, eps, eps / cfg.points_per_fast_period);
    double const ratio = std::log(window.hi / window.lo);
    double prev_k = window.lo;
    double prev_f = sp.mismatch(prev_k).real();
    for (int i = 1; i < samples; ++i) {
        double const k = i + 1 == samples ? window.hi : window.lo * std::exp(ratio * i / (samples - 1));
        double const f = sp.mismatch(k).real();
        if ((prev_f < 0.0) != (f < 0.0) || f == 0.0) {
            auto const polished = detail::bracketed_root(sp, prev_k, k, cfg);
            double const root = polished.result ? polished.result->kappa.real() : polished.last_kappa.real();
            out.roots.push_back(root);
            out.residuals.push_back(polished.last_residual);
        }
        prev_k = k;
        prev_f = f;
    }
    return out;
}

struct Eigenfunction {
    std::vector<double> x;
    std::vector<complex> u;
    double norm = 1.0;         // L2 norm of the returned samples' underlying function
    double match_residual = 0; // |u'(x1) + kappa u(x1)| / (|u'(x1)| + |kappa u(x1)|), before scaling
};

/// Eigenfunction samples on a uniform grid over [lo, hi] (may extend past M):
/// RK4 inside M, analytic exponential tails outside, unit L2 norm on the whole line.
inline Eigenfunction eigenfunction(TwoScaleFunction const& potential, double eps, complex kappa, SampleGrid grid,
                                   SolverConfig const& cfg = {}, double match_tol = 1e-8) {
    cfg.validate();
    if (!(kappa.real() > 0.0)) throw InputError("kappa not in the physical half-plane (Re kappa must be > 0)");
    auto const sp = ShootingProblem::from_potential(potential, eps, eps / cfg.points_per_fast_period);
    auto const traj = sp.march(kappa);
    complex const u1 = traj.u.back(), du1 = traj.du.back();
    Eigenfunction out;
    double const denom = std::abs(du1) + std::abs(kappa * u1);
    out.match_residual = std::abs(du1 + kappa * u1) / (denom > 0.0 ? denom : 1.0);
    if (!(out.match_residual <= match_tol))
        throw NumericalError("kappa is not a root: mismatch at x1 has relative size " +
                             std::to_string(out.match_residual));

    double const tails = (1.0 + std::norm(u1)) / (2.0 * kappa.real());
    double const total = traj.norm2.back() + tails;
    double const scale = 1.0 / std::sqrt(total);
    auto const m = sp.segment();
    out.x.reserve(grid.n);
    out.u.reserve(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        double const x = grid[i];
        complex u;
        if (x <= m.lo) u = std::exp(kappa * (x - m.lo));
        else if (x >= m.hi) u = u1 * std::exp(-kappa * (x - m.hi));
        else u = sp.interpolate(traj, x, kappa).first;
        out.x.push_back(x);
        out.u.push_back(scale * u);
    }
    return out;
}

struct ConvergenceStudy {
    std::vector<double> steps;
    std::vector<complex> lambdas;
    double observed_order = std::numeric_limits<double>::quiet_NaN();
    complex extrapolated;
    double error_bar = 0.0;
};

/// lambda(h) over a halving step sequence; Richardson extrapolation with the observed order
/// (classical RK4 order 4 when the differences are at round-off).
inline ConvergenceStudy convergence_study(TwoScaleFunction const& potential, double eps,
                                          std::vector<double> const& steps, std::optional<complex> k2_hint,
                                          SolverConfig const& cfg = {},
                                          std::optional<Interval> bracket = std::nullopt) {
    if (steps.size() < 3) throw InputError("convergence study needs at least 3 steps");
    for (std::size_t i = 1; i < steps.size(); ++i)
        if (std::abs(steps[i] - 0.5 * steps[i - 1]) > 1e-12 * steps[i - 1])
            throw InputError("convergence study steps must halve");
    ConvergenceStudy out;
    out.steps = steps;
    for (double h : steps) {
        if (h > eps / 20.0 * (1.0 + 1e-12)) throw InputError("step too large (h must be <= eps/20)");
        auto const s = solve_with_step(potential, eps, h, k2_hint, cfg, bracket);
        if (!s.result) throw NumericalError("convergence study: solver failed at h = " + std::to_string(h) + ": " + s.reason);
        out.lambdas.push_back(s.result->lambda);
    }
    std::size_t const n = out.lambdas.size();
    double const d1 = std::abs(out.lambdas[n - 2] - out.lambdas[n - 3]);
    double const d2 = std::abs(out.lambdas[n - 1] - out.lambdas[n - 2]);
    if (d1 > 0.0 && d2 > 0.0) out.observed_order = std::log2(d1 / d2);
    double const p = std::isfinite(out.observed_order) && out.observed_order > 0.5 ? out.observed_order : 4.0;
    out.extrapolated = out.lambdas[n - 1] + (out.lambdas[n - 1] - out.lambdas[n - 2]) / (std::pow(2.0, p) - 1.0);
    out.error_bar = std::abs(out.extrapolated - out.lambdas[n - 1]);
    return out;
}

} // namespace fastosc
