#pragma once

#include <cmath>
#include <stdexcept>

#include "polypuzzle/polynomial.hpp"
#include "polypuzzle/root_finding.hpp"

namespace fixtures {

using polypuzzle::Complex;
using polypuzzle::Polynomial;

inline Polynomial squaring() { return polypuzzle::parse_polynomial("z^2"); }

inline Polynomial basilica() { return polypuzzle::parse_polynomial("z^2 - 1"); }

// Parameter of the quadratic whose critical orbit is 3-periodic in the upper
// half plane: the Im > 0 root of c^3 + 2c^2 + c + 1.
inline Complex rabbit_c() {
    static const Complex cached = [] {
        const std::vector<Complex> roots =
            polypuzzle::polynomial_roots({{1.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}, {1.0, 0.0}});
        for (Complex r : roots) {
            if (r.imag() > 0.0) return r;
        }
        throw std::runtime_error("rabbit parameter not found");
    }();
    return cached;
}

inline Polynomial rabbit() {
    return Polynomial({rabbit_c(), {0.0, 0.0}, {1.0, 0.0}});
}

// Quadratic with an irrationally neutral fixed point: multiplier
// exp(2*pi*i*g), g the golden-mean rotation number.
inline Polynomial golden_neutral() {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    const double tau = 6.283185307179586476925286766559;
    const Complex lambda{std::cos(tau * g), std::sin(tau * g)};
    const Complex c = lambda / 2.0 - lambda * lambda / 4.0;
    return Polynomial({c, {0.0, 0.0}, {1.0, 0.0}});
}

// Cubic z^3 - 3a^2 z + b with b = a + 2a^3: +a is a superattracting fixed
// point while the other critical point -a escapes, so the filled set is
// disconnected.
inline constexpr double kCubicA = 0.75;

inline Polynomial cubic() {
    const double a = kCubicA;
    return Polynomial({{a + 2.0 * a * a * a, 0.0}, {-3.0 * a * a, 0.0}, {0.0, 0.0}, {1.0, 0.0}});
}

}  // namespace fixtures
