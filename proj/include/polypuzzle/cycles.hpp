#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polypuzzle/polynomial.hpp"

namespace polypuzzle {

enum class CycleType {
    Superattracting,
    Attracting,
    Parabolic,
    IrrationallyNeutral,
    Repelling,
};

const char* to_string(CycleType type);

struct MultiplierClass {
    CycleType type = CycleType::Repelling;
    // Rotation denominator q of the nearest root of unity, parabolic only.
    int parabolic_q = 0;
};

// Magnitude bands: below 1e-9 superattracting, below 1-1e-6 attracting,
// above 1+1e-6 repelling. In the unit band the multiplier is matched against
// roots of unity of order <= 64 within 1e-6; no match means irrationally
// neutral.
MultiplierClass classify_multiplier(Complex multiplier);

struct Cycle {
    // Orbit order, starting from the lexicographically (re, im) smallest point.
    std::vector<Complex> points;
    int period = 1;
    Complex multiplier{0.0, 0.0};
    CycleType type = CycleType::Repelling;
    int parabolic_q = 0;
};

// Every cycle of exact period <= max_period, found by simultaneous root
// finding on f^p(z) - z for each p, de-duplicated against divisor periods and
// orbit rotations, each point polished to |f^p(z) - z| < 1e-10. Cycles are
// sorted by their starting point (re, im). Caps: max_period <= 8 and
// degree^max_period <= 6561, beyond which the call refuses.
std::vector<Cycle> find_cycles(const Polynomial& poly, int max_period, std::uint64_t seed = 2026);

}  // namespace polypuzzle
