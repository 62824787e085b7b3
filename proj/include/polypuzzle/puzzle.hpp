#pragma once

#include <memory>
#include <vector>

#include "polypuzzle/angle.hpp"
#include "polypuzzle/internal_graph.hpp"
#include "polypuzzle/polynomial.hpp"

namespace polypuzzle {

class PuzzleCache;

struct PuzzleConfig {
    double equipotential_level = 1.0;
    // Periodic angles with reduced denominator up to this bound are landed
    // when searching for biaccessible fixed points.
    int max_angle_denominator = 63;
    // Cycle periods screened for the irrationally-neutral refusal.
    int neutral_period_cap = 6;
    // Build internal graphs for superattracting fixed components of the
    // iterate. Off by default: for the supported examples the external rays
    // at the cut point already subdivide the plane.
    bool internal_graphs = false;
    int depth_cap = 12;
};

struct FixedPointEntry {
    Complex point{0.0, 0.0};
    std::vector<Angle> angles;  // sorted; all land at `point`
};

// The cut system: equipotential at `equipotential_level`, external rays at
// `ray_angles` (closed under multiplication by the degree), optional internal
// graphs, all through the biaccessible fixed points in `fixed_point_set`.
// Puzzle pieces of depth n are the complementary regions after pulling the
// system back n times under f.
struct PuzzleGraph {
    Polynomial poly;
    // Minimal power making periodic Fatou components and the ray cycles
    // fixed: lcm of component periods and angle orbit periods.
    int iterate_power = 1;
    double equipotential_level = 1.0;
    std::vector<Angle> ray_angles;
    std::vector<FixedPointEntry> fixed_point_set;
    std::vector<InternalGraph> internal_graphs;
    int depth_cap = 12;
    // Shared subdivision memo; pieces keep it alive after the graph is gone.
    std::shared_ptr<PuzzleCache> cache;
};

// Errors: escaping critical orbit -> BuildError("disconnected Julia set is
// unsupported"); an irrationally neutral cycle -> BuildError
// ("irrationally-neutral detected ..."); no biaccessible fixed point up to
// the denominator cap -> BuildError("no cut point found"); internal graphs
// requested over an attracting or parabolic component -> BuildError
// ("unsupported internal graph ..."); iterate lcm above 24 -> ConfigError.
PuzzleGraph build_puzzle_graph(const Polynomial& poly, const PuzzleConfig& config = {});

}  // namespace polypuzzle
