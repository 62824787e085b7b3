#pragma once

#include <vector>

#include "polypuzzle/polynomial.hpp"

namespace polypuzzle {

// Immutable query context for the basin of infinity. All operations are pure
// and thread-safe. The referenced polynomial must outlive the field.
struct PotentialField {
    const Polynomial* poly = nullptr;
    double escape_radius = 0.0;
    int iter_budget = 2000;
    // Minimum potential a point must demonstrate before its external
    // argument is considered defined.
    double green_tol = 0.0;

    static PotentialField make(const Polynomial& poly) {
        PotentialField f;
        f.poly = &poly;
        f.escape_radius = poly.escape_radius();
        return f;
    }
};

// Green's function of the basin of infinity: d^{-n}(log|f^n(z)| +
// log|a_d|/(d-1)) once the orbit escapes, 0 when it stays below the escape
// radius for the whole budget (not proven bounded, reported as 0).
double green_potential(const PotentialField& field, Complex z);

// External argument in [0, 1): the argument of the Böttcher coordinate,
// computed by escaping to large modulus and pulling the far-field argument
// back through the orbit one division-by-d branch at a time. Deterministic.
// Throws NumericError("undefined argument ...") for non-escaping input.
double external_argument(const PotentialField& field, Complex z);

// Closed polyline of `samples` points with G = level, ordered by external
// argument k/samples. Throws NumericError naming the failing argument if a
// sample cannot be refined.
std::vector<Complex> trace_equipotential(const PotentialField& field, double level, int samples);

}  // namespace polypuzzle
