#pragma once

#include <memory>
#include <vector>

#include "polypuzzle/angle.hpp"
#include "polypuzzle/puzzle.hpp"

namespace polypuzzle {

struct PieceEdge {
    enum class Kind { Ray, Arc };
    Kind kind = Kind::Ray;
    // Ray: the ray's angle. Arc: counterclockwise start angle.
    Angle angle;
    // Arc only: counterclockwise end angle. Arcs never wrap a full turn.
    Angle angle_to;

    bool operator==(const PieceEdge& o) const {
        return kind == o.kind && angle == o.angle &&
               (kind == Kind::Ray || angle_to == o.angle_to);
    }
};

// One depth-n complementary region of the pulled-back cut system. The
// combinatorial boundary is exact (rational angles); the polygon realizes it
// at ray-tracing accuracy, counterclockwise, with landing points on the
// Julia set included as vertices.
struct PuzzlePiece {
    int depth = 0;
    int index = 0;  // position within pieces_at_depth(graph, depth)
    double level = 0.0;  // equipotential level bounding this depth
    std::vector<PieceEdge> boundary;  // cyclic, in traversal order
    std::vector<Complex> polygon;     // closed polyline (implicit last->first)
    std::vector<Complex> vertex_points;  // landing points shared with neighbors
    // False when a boundary ray stalled during realization; the combinatorial
    // boundary is still exact and the polygon bridges the gap by a chord.
    bool realization_complete = true;
    std::shared_ptr<const PuzzleCache> cache;
};

// All depth-n pieces, assembled combinatorially from the landing pattern of
// the pulled-back rays and then realized geometrically. Results are memoized
// on the graph's cache, so repeated calls are free.
std::vector<PuzzlePiece> pieces_at_depth(const PuzzleGraph& graph, int n);

struct PieceLocation {
    int index = -1;
    // True when z sits within the boundary band (2x tracing accuracy); the
    // index is then the nearest piece, or -1 when no polygon resolves it.
    bool on_boundary = false;
};

// Point location against the realized polygons of a single depth. Throws
// Error("outside puzzle") when G(z) exceeds the pieces' equipotential level.
PieceLocation locate_piece(const std::vector<PuzzlePiece>& pieces, Complex z);

struct PieceImage {
    int index = -1;  // the depth-(n-1) piece the image equals
    int degree = 1;  // covering degree of f restricted to the piece
};

// Multiplies every boundary angle by the degree and matches the resulting
// edge set against the pieces one depth up. The match must be exact; a
// mismatch throws BuildError("piece image consistency ...").
PieceImage piece_image(const PuzzlePiece& piece);

}  // namespace polypuzzle
