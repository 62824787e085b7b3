#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "polypuzzle/polynomial.hpp"

namespace polypuzzle {

struct RootOptions {
    double tol = 1e-12;
    int max_sweeps = 200;
    std::uint64_t seed = 2026;
    // Seed circle radius; 0 selects an automatic root bound.
    double seed_radius = 0.0;
};

// All roots of the polynomial given by dense low-to-high coefficients
// (degree >= 1), by simultaneous Aberth iteration from a perturbed circle,
// followed by a Newton polish. Throws NumericError when the residual check
// fails after the sweep budget.
std::vector<Complex> polynomial_roots(const std::vector<Complex>& coefficients,
                                      const RootOptions& options = {});

// Same simultaneous iteration driven by callables, for maps like f^p(z) - z
// that are polynomial of known degree but too large to expand. `value` and
// `deriv` must be the map and its derivative. No residual exception; callers
// verify roots against their own acceptance threshold.
std::vector<Complex> functional_roots(int degree,
                                      const std::function<Complex(Complex)>& value,
                                      const std::function<Complex(Complex)>& deriv,
                                      double seed_radius,
                                      const RootOptions& options = {});

}  // namespace polypuzzle
