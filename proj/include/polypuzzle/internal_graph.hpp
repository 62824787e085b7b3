#pragma once

#include <vector>

#include "polypuzzle/cycles.hpp"
#include "polypuzzle/polynomial.hpp"

namespace polypuzzle {

// Internal cut graph of a superattracting periodic Fatou component: the
// Böttcher circle of the return map at radius 0.5 plus one radial arm per
// sheet of the return map, traced outward until it lands on the component
// boundary. Arm j follows the internal angle j/k, so the arm set is forward
// invariant (k tuples every angle onto arm 0) and arm 0 lands at a fixed
// point of the return map.
struct InternalGraph {
    Complex center{0.0, 0.0};
    int return_period = 1;  // p: the component's period under f
    int return_degree = 1;  // k: local degree of f^p on the component
    double radius = 0.5;    // Böttcher radius of the circle
    std::vector<Complex> circle;             // closed polyline, |phi| = radius
    std::vector<std::vector<Complex>> arms;  // k polylines, circle -> boundary
    std::vector<Complex> landings;           // arm landing points, on the Julia set
};

// Build the internal graph for the component of cycle.points[point_index].
// Only superattracting cycles are supported: attracting components would
// need linearizer arcs and parabolic basins petal arcs, both refused with
// BuildError("unsupported internal graph ...").
InternalGraph build_internal_graph(const Polynomial& poly, const Cycle& cycle,
                                   int point_index = 0);

}  // namespace polypuzzle
