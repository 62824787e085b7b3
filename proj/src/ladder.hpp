#pragma once

#include <cmath>
#include <functional>

#include "polypuzzle/polynomial.hpp"

// Shared Newton ladder for Böttcher targets: solve f^m(z) = w where w is the
// truncated Böttcher preimage exp(d^m t + 2 pi i theta_m) at large modulus.
// Used by the ray tracer, the equipotential sampler, and the branch fallback
// of external_argument.
namespace polypuzzle::detail {

inline constexpr double kTau = 6.283185307179586476925286766559;
// log(1e8): potentials at or above this admit the direct far-field inverse.
inline constexpr double kTBig = 18.420680743952367;
inline constexpr int kLadderSubsteps = 8;  // ladder rungs per halving of t

// Minimal m with d^m * t >= kTBig.
inline int lift_steps(int d, double t) {
    int m = 0;
    while (t < kTBig) {
        t *= d;
        ++m;
    }
    return m;
}

// Principal Böttcher normalization: phi(z) ~ A (z + b) at infinity.
struct FarField {
    Complex A;
    Complex b;
    explicit FarField(const Polynomial& f) {
        const int d = f.degree();
        A = std::pow(f.leading(), 1.0 / (d - 1));
        b = f.coefficients()[d - 1] / (static_cast<double>(d) * f.leading());
    }
};

struct NewtonResult {
    Complex z;
    bool ok = false;
};

// Damped Newton on f^m(z) - w from `seed`.
inline NewtonResult newton_target(const Polynomial& f, int m, Complex w, Complex seed,
                                  int budget = 60) {
    Complex z = seed;
    const double tol = 1e-11 * std::abs(w);
    for (int it = 0; it < budget; ++it) {
        Complex v = z;
        Complex dv{1.0, 0.0};
        for (int k = 0; k < m; ++k) {
            dv *= f.derivative(v);
            v = f(v);
        }
        if (!is_finite(v) || !is_finite(dv)) return {z, false};
        const Complex err = v - w;
        if (std::abs(err) < tol) return {z, true};
        if (std::abs(dv) == 0.0) return {z, false};
        Complex step = err / dv;
        // Forward evaluation of f^m amplifies rounding by ~d^m ulp, so the
        // residual has a noise floor; a step below double resolution at z
        // means the iterate cannot be improved further.
        if (std::abs(step) < 8.0 * 2.220446049250313e-16 * (1.0 + std::abs(z))) {
            return {z, true};
        }
        // Backtrack while the step overshoots into non-finite territory or
        // fails to reduce the residual.
        double damp = 1.0;
        bool accepted = false;
        for (int half = 0; half < 20; ++half) {
            const Complex trial = z - damp * step;
            Complex tv = trial;
            bool finite = true;
            for (int k = 0; k < m; ++k) {
                tv = f(tv);
                if (!is_finite(tv)) {
                    finite = false;
                    break;
                }
            }
            if (finite && std::abs(tv - w) < std::abs(err)) {
                z = trial;
                accepted = true;
                break;
            }
            damp *= 0.5;
        }
        if (!accepted) return {z, false};
    }
    // Accept a slightly looser residual after the full budget.
    Complex v = z;
    for (int k = 0; k < m; ++k) v = f(v);
    return {z, is_finite(v) && std::abs(v - w) < 1e4 * tol};
}

struct DescentResult {
    Complex endpoint;
    double potential = 0.0;
    bool stalled = false;
};

// Walk the potential ladder from kTBig down to t_target along the ray whose
// angle at lift depth m is angle_at(m) (in turns). Emits each accepted
// vertex; halves the ladder step on Newton failure, and reports a stall when
// 14 successive halvings cannot advance.
inline DescentResult descend_ray(const Polynomial& f,
                                 const std::function<double(int)>& angle_at,
                                 double t_target,
                                 const std::function<void(Complex, double)>& emit) {
    const int d = f.degree();
    const FarField far(f);
    const double shrink = std::pow(2.0, -1.0 / kLadderSubsteps);

    double t = kTBig;
    Complex w_top = std::exp(Complex{t, kTau * angle_at(0)});
    Complex z = w_top / far.A - far.b;
    if (emit) emit(z, t);
    if (t_target >= t) return {z, t, false};

    int failures = 0;
    double factor = shrink;
    while (t > t_target) {
        double t_next = std::max(t_target, t * factor);
        const int m = lift_steps(d, t_next);
        double scaled = t_next;
        for (int k = 0; k < m; ++k) scaled *= d;
        const Complex w = std::exp(Complex{scaled, kTau * angle_at(m)});
        const NewtonResult step = newton_target(f, m, w, z);
        if (!step.ok) {
            factor = std::sqrt(factor);  // halve the step in log t
            if (++failures > 14) return {z, t, true};
            continue;
        }
        z = step.z;
        t = t_next;
        failures = 0;
        factor = shrink;
        if (emit) emit(z, t);
    }
    return {z, t, false};
}

}  // namespace polypuzzle::detail
