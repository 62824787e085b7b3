#pragma once

#include <vector>

#include "errors.hpp"
#include "polynomial.hpp"

namespace polypuzzle {

// Planar geometry helpers shared by the grid component extractor and the
// puzzle subdivision. A polygon is a vertex list in order with an implicit
// closing edge from the last vertex back to the first.

// Convex hull by monotone chain: counterclockwise, first vertex not
// repeated, collinear interior points dropped. Fewer than three distinct
// input points return the distinct points sorted by (re, im).
std::vector<Complex> convex_hull(std::vector<Complex> points);

// Largest pairwise distance over a point set: rotating calipers on the
// convex hull when the hull has more than 1000 vertices, direct pairwise
// comparison on the hull otherwise. Empty and singleton sets give 0.
double max_pairwise_distance(const std::vector<Complex>& points);

// Distance from z to the segment [a, b]; a == b degenerates to |z - a|.
double segment_distance(Complex a, Complex b, Complex z);

enum class PointLocation { Inside, Boundary, Outside };

// Crossing-number location with a boundary band: any point within tol of
// an edge reports Boundary. Fewer than three vertices have no interior.
PointLocation locate_in_polygon(const std::vector<Complex>& polygon, Complex z,
                                double tol);

// Distance from z to the polygon's boundary polyline.
double polygon_boundary_distance(const std::vector<Complex>& polygon,
                                 Complex z);

// True when no vertex of inner lies outside outer beyond the tol band.
bool polygon_contains(const std::vector<Complex>& outer,
                      const std::vector<Complex>& inner, double tol);

// Ratio of the farthest to the nearest boundary distance about z. The
// farthest distance over a polygon boundary is attained at a vertex and
// the nearest at a vertex or an edge foot, so both sides are exact.
// Throws when z is not strictly inside the polygon.
double shape_about(const std::vector<Complex>& polygon, Complex z);

}  // namespace polypuzzle
