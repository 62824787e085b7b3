#pragma once

#include <cstdint>
#include <vector>

#include "grid.hpp"
#include "polynomial.hpp"

namespace polypuzzle {

enum class ComponentKind { FilledJulia, Fatou };

struct ComponentRecord {
    int id = -1;  // position after sorting by diameter descending
    ComponentKind kind = ComponentKind::FilledJulia;
    // Fatou: owning cycle id and entry phase shared by every pixel;
    // filled-Julia: -1.
    std::int32_t cycle = -1;
    std::int32_t phase = -1;
    std::int64_t pixel_count = 0;
    std::vector<Complex> hull;  // convex hull of member pixel centers
    double diameter = 0.0;      // max pairwise distance over hull vertices
    bool touches_boundary = false;
    // Contains a point of a detected attracting or superattracting cycle.
    bool periodic = false;
};

// 4-connected union-find labeling. Filled-Julia components take every
// non-escaping pixel (basin and unresolved); Fatou components take basin
// pixels only, split additionally by cycle id. Sorted by diameter
// descending (ties: pixel count, then first pixel index).
std::vector<ComponentRecord> extract_components(const GridClassification& grid,
                                                ComponentKind kind);

// Recomputes the hull diameter from the stored hull.
double component_diameter(const ComponentRecord& record);

struct ShrinkRow {
    double epsilon = 0.0;
    int count = 0;
};

// For each epsilon (positive, sorted descending), the number of components
// with diameter > epsilon. Components touching the box boundary are
// excluded from every count; callers report them separately.
std::vector<ShrinkRow> shrinkage_counts(
    const std::vector<ComponentRecord>& records,
    const std::vector<double>& epsilons);

struct StabilityReport {
    std::vector<double> epsilons;
    std::vector<int> resolutions;
    // counts[r][e]: epsilon-count at resolutions[r] for epsilons[e].
    std::vector<std::vector<int>> counts;
    // Boundary-touching components per resolution, reported separately.
    std::vector<int> excluded;
    bool stable = false;  // all resolutions produced identical count rows
};

// Runs the shrinkage experiment: finds cycles up to max_period, refuses
// maps with an irrationally neutral cycle, classifies a square grid per
// resolution, extracts components of the kind, and tabulates the
// epsilon-counts. stable means every resolution agreed on every count.
StabilityReport shrink_stability(const Polynomial& poly, const Box& box,
                                 ComponentKind kind,
                                 const std::vector<int>& resolutions,
                                 const std::vector<double>& epsilons,
                                 int max_iter, int max_period = 6,
                                 ExecutionPolicy policy =
                                     ExecutionPolicy::Parallel);

}  // namespace polypuzzle
