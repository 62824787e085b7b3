#pragma once

#include <vector>

#include "polypuzzle/pieces.hpp"
#include "polypuzzle/puzzle.hpp"

namespace polypuzzle {

// Union of the puzzle pieces whose closures contain a cut point z, at depth
// n of the iterate clock: one step pulls the cut system back through
// g = f^iterate_power. For this construction the cut system is enriched
// inside each g-fixed bounded Fatou component with a disk around the center
// (holding the critical point) and the internal rays joining it to the
// boundary, so the neighborhood excludes every critical value of g and the
// sector count at z stays constant: one piece per corner between
// consecutive spokes (external rays and internal arms) at z.
struct SatelliteNeighborhood {
    Complex point{0.0, 0.0};
    int depth = 0;  // n, in g-steps
    // The 2q sector pieces at z, each a closed polygon with z as a vertex,
    // where q counts the external rays landing at z.
    std::vector<std::vector<Complex>> piece_polygons;
    // Boundary of the union, ccw. At depth 0 a degree-two component return
    // map leaves the union with an annular interior; the polygon is then the
    // outer boundary alone.
    std::vector<Complex> union_polygon;
    double diameter = 0.0;
};

// z must match a graph fixed point. Depths 0 and 1 are built directly from
// the enriched cut system; beyond that each polygon is lifted through the
// inverse branch of g fixing z, which is exact while the interior avoids
// the critical values of g (verified per step).
SatelliteNeighborhood satellite_neighborhood(const PuzzleGraph& graph, Complex z, int n);

}  // namespace polypuzzle
