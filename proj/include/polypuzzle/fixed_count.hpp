#pragma once

#include <vector>

#include "polypuzzle/pieces.hpp"
#include "polypuzzle/polynomial.hpp"

namespace polypuzzle {

struct FixedPointCount {
    // Argument-principle winding of g - id over the piece boundary, with the
    // contour indented around boundary fixed points.
    int interior = 0;
    // Fixed points of g matching a polygon vertex within 1e-8, counted by
    // direct comparison because the integral is singular there.
    int boundary_matched = 0;
    int total = 0;  // interior + boundary_matched
    // Distance of the raw winding sum from the nearest integer.
    double residual = 0.0;
    std::vector<Complex> boundary_points;
};

// Counts solutions of g(z) = z, g = f^iterate_power, inside the piece's
// polygon. Only the polygon and vertex_points fields are consulted, so
// hand-built pieces work. Residual at or above 0.2 throws
// NumericError("inconclusive count ...").
FixedPointCount count_fixed_points_in_piece(const Polynomial& poly,
                                            const PuzzlePiece& piece,
                                            int iterate_power);

}  // namespace polypuzzle
