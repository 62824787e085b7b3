#pragma once

// Private machinery behind the puzzle graph. A layer at depth n is the set
// of ray landing classes obtained by pulling the fixed-point classes back
// through the polynomial n times, together with the sorted list of all ray
// angles at that depth. Faces of the planar graph cut out by the rays and
// the depth-n equipotential are traced combinatorially from the circular
// order alone; geometry only realizes the face boundaries afterwards.

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "polypuzzle/angle.hpp"
#include "polypuzzle/pieces.hpp"
#include "polypuzzle/potential.hpp"
#include "polypuzzle/puzzle.hpp"
#include "polypuzzle/ray.hpp"

namespace polypuzzle {
namespace detail {

// Value and derivative of the m-th iterate at z by the chain rule.
std::pair<Complex, Complex> iterate_with_derivative(const Polynomial& poly,
                                                    Complex z, int m);

// Coefficient vector (low to high) of the m-th iterate as a polynomial.
// Degree grows as d^m, so callers must keep m small.
std::vector<Complex> iterate_coefficients(const Polynomial& poly, int m);

// Newton solve of f^m(zeta) = target from seed. Returns the converged root
// or the seed unchanged with ok = false.
struct BranchSolve {
    Complex point;
    bool ok = false;
};
BranchSolve solve_iterate_preimage(const Polynomial& poly, int m,
                                   Complex target, Complex seed);

struct LandingClass {
    Complex point;
    std::vector<Angle> angles;  // sorted, all landing at point
    int parent = -1;            // class index in the previous layer
};

struct Layer {
    int depth = 0;
    double level = 0;
    std::vector<LandingClass> classes;
    std::vector<Angle> angles;     // every class angle, sorted ascending
    std::vector<int> angle_class;  // angles[i] lands at classes[angle_class[i]]
};

// Oriented boundary edge of a face. A ray edge connects the landing point
// of angles[pos] to its equipotential corner (forward = outward); an arc
// edge connects corner pos to corner pos+1 counterclockwise (wrapping).
struct HalfEdge {
    bool is_ray = false;
    int pos = 0;
    bool forward = false;
};

struct Face {
    std::vector<HalfEdge> edges;  // counterclockwise, interior on the left
    bool outer = false;
};

// Faces of the layer graph. skip_class removes that class's rays, merging
// the faces around its landing point; half edges keep their identity so
// faces can be matched between the full and the reduced walk. The walk
// checks the Euler count F = E - V + 2, which fails exactly when the class
// assignment is not realizable by disjoint rays in the plane.
struct FaceSet {
    std::vector<Face> faces;
    std::vector<int> half_edge_face;  // 4*pos + {0 ray out, 1 ray in, 2 arc fwd, 3 arc rev}
    std::vector<int> face_piece;      // face index -> piece index, -1 for the outer face
};
FaceSet trace_faces(const Layer& layer, int skip_class = -1);

// Ray polyline ordered by strictly decreasing potential, approaching but
// not including the landing point; below the tracer floor the points come
// from inverse iterate steps anchored at the known landing point.
struct DeepRay {
    std::vector<Complex> points;
    std::vector<double> potentials;  // same length as points
    Complex landing;
    bool complete = true;  // reached the landing within the chord tolerance
};

}  // namespace detail

class PuzzleCache {
  public:
    PuzzleCache(Polynomial poly, double base_level, int depth_cap,
                std::vector<FixedPointEntry> base);

    const Polynomial& poly() const { return poly_; }
    const PotentialField& field() const { return field_; }
    double base_level() const { return level_; }
    int depth_cap() const { return depth_cap_; }

    const detail::Layer& layer(int depth) const;
    const detail::FaceSet& faces(int depth) const;
    const std::vector<PuzzlePiece>& pieces(
        int depth, const std::shared_ptr<const PuzzleCache>& self) const;

    // Deep polyline for an angle present in some built layer.
    const detail::DeepRay& deep_ray(const Angle& angle) const;
    // Endpoint of the ray at the depth-n equipotential level.
    Complex corner_point(const Angle& angle, int depth) const;
    // Counterclockwise equipotential polyline from angle a to angle b at
    // the depth-n level, both corners included.
    std::vector<Complex> arc_points(const Angle& a, const Angle& b,
                                    int depth) const;
    // Cached tracer run down to the floor potential.
    const ExternalRay& trace_raw(const Angle& angle) const;
    // Batch the tracer runs these angles need, in parallel.
    void prefetch_traces(const std::vector<Angle>& angles) const;
    void prefetch_corners(const std::vector<Angle>& angles, int depth) const;

    // Boundary polyline of one traced face, realized at the layer's level.
    // Also reports the landing points visited and whether every ray was
    // traced to completion.
    struct FacePolygon {
        std::vector<Complex> polygon;
        std::vector<Complex> vertices;
        bool complete = true;
    };
    FacePolygon realize_face(int depth, const detail::Face& face) const;

  private:
    struct TailState {
        std::vector<Complex> points;  // decreasing potential below floor
        std::vector<double> potentials;
        Complex landing;
        Complex start;  // tracer endpoint the tail hangs off
        double start_potential = 0;
        int period = 0;    // angle orbit period (0 = preperiodic)
        int consumed = 0;  // parent polyline entries lifted so far
        bool usable = true;
    };

    void build_layer0() const;
    void build_next_layer() const;
    TailState& tail(const Angle& angle) const;
    double tail_end_distance(const TailState& state) const;
    void ensure_tail(const Angle& angle, double eps) const;
    void extend_periodic_tail(TailState& state) const;

    Polynomial poly_;
    PotentialField field_;
    double level_;
    int depth_cap_;
    std::vector<FixedPointEntry> base_;

    mutable std::vector<detail::Layer> layers_;
    mutable std::vector<detail::FaceSet> faces_;
    mutable std::map<int, std::vector<PuzzlePiece>> pieces_;
    mutable std::map<Angle, ExternalRay> traces_;
    mutable std::map<Angle, TailState> tails_;
    mutable std::map<Angle, detail::DeepRay> deep_;
    mutable std::map<Angle, std::map<int, Complex>> corners_;
    mutable std::map<Angle, Complex> landings_;
};

}  // namespace polypuzzle
