#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cycles.hpp"
#include "errors.hpp"
#include "polynomial.hpp"

namespace polypuzzle {

// Axis-aligned rectangle [x0, x1] x [y0, y1] in the dynamical plane.
struct Box {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    static Box centered_square(double half_side) {
        return {-half_side, -half_side, half_side, half_side};
    }
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    // True when the closed disk |z| <= r fits inside, up to slack.
    bool contains_disk(double r, double slack = 0.0) const {
        return x0 <= -(r - slack) && y0 <= -(r - slack) && x1 >= r - slack &&
               y1 >= r - slack;
    }
};

enum class PixelKind : std::uint8_t { Escaping, Basin, Unresolved };

struct PixelLabel {
    PixelKind kind = PixelKind::Unresolved;
    // Escaping: first index k with |f^k(z)| beyond the escape radius.
    // Basin: first index entering the attractor neighborhood (or opening a
    // stable parabolic run). Unresolved: -1.
    std::int32_t index = -1;
    // Basin: id of the owning cycle in `cycles`; otherwise -1.
    std::int32_t cycle = -1;
    // Basin: (cycle position of the entered point - entry index) mod period.
    // Orbits of one immediate-basin component always agree on this, and the
    // components of a p-cycle meeting at a pinch point always differ, so it
    // separates components that touch the Julia set at a single point.
    std::int32_t phase = -1;

    bool operator==(const PixelLabel&) const = default;
};

struct GridClassification {
    Box box;
    int nx = 0;
    int ny = 0;
    std::vector<PixelLabel> labels;  // row-major, iy * nx + ix
    std::vector<Cycle> cycles;       // the precomputed cycles labels refer to
    std::string warning;             // non-fatal diagnostics, empty when clean

    const PixelLabel& at(int ix, int iy) const {
        return labels[static_cast<std::size_t>(iy) * nx + ix];
    }
    Complex pixel_center(int ix, int iy) const {
        return {box.x0 + (ix + 0.5) * box.width() / nx,
                box.y0 + (iy + 0.5) * box.height() / ny};
    }
    double pitch() const {
        return std::max(box.width() / nx, box.height() / ny);
    }
};

enum class ExecutionPolicy { Serial, Parallel };

// Classifies every pixel center: escape past the escape radius, entry into
// a 1e-4 neighborhood of an attracting or superattracting cycle point,
// stabilization within 1e-5 of a parabolic point over 50 consecutive steps,
// otherwise unresolved. The box must contain the closed disk holding K_f.
// Output is pixel-indexed and identical under both execution policies.
GridClassification classify_grid(const Polynomial& poly, const Box& box,
                                 int nx, int ny, int max_iter,
                                 const std::vector<Cycle>& cycles,
                                 ExecutionPolicy policy =
                                     ExecutionPolicy::Parallel);

}  // namespace polypuzzle
