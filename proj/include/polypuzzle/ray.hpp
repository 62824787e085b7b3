#pragma once

#include <optional>
#include <vector>

#include "polypuzzle/angle.hpp"
#include "polypuzzle/cycles.hpp"
#include "polypuzzle/potential.hpp"

namespace polypuzzle {

// A traced external ray: vertices ordered by strictly decreasing potential.
struct ExternalRay {
    Angle angle;
    std::vector<Complex> points;
    std::vector<double> potentials;
    // Set only by land_periodic_ray after successful Newton refinement; the
    // raw polyline endpoint is never promoted to a landing point.
    std::optional<Complex> landing;
    bool landing_refined = false;
    bool stalled = false;
    double stalled_at = 0.0;
};

// Descend the potential ladder from the far field to t_min along the ray of
// the given exact angle. On persistent Newton failure returns the partial
// ray with `stalled` set and `stalled_at` naming the potential reached.
ExternalRay trace_external_ray(const PotentialField& field, const Angle& angle,
                               double t_min = 1e-6);

struct LandingResult {
    Complex point{0.0, 0.0};
    int exact_period = 1;
    Complex multiplier{0.0, 0.0};
    CycleType type = CycleType::Repelling;
    // Index into `match_cycles` when one was supplied and matched, else -1.
    int cycle_index = -1;
};

// Newton-refine the ray's endpoint against f^p(z) - z = 0, p the angle's
// exact period. Requires a periodic (preperiod 0) angle and an unstalled
// ray. Verifies the refined point is not attracting and sits where the ray
// converges; otherwise throws BuildError("landing mismatch ...").
// Records ray.landing on success.
LandingResult land_periodic_ray(const PotentialField& field, ExternalRay& ray,
                                const std::vector<Cycle>* match_cycles = nullptr);

struct RayPortrait {
    struct Group {
        Complex fixed_point{0.0, 0.0};
        std::vector<Angle> angles;  // sorted increasingly
        bool biaccessible = false;  // two or more rays land here
    };
    std::vector<Group> groups;   // sorted by fixed point (re, im)
    std::vector<Angle> stalled;  // angles whose ray stalled or failed to land
};

// Land every periodic angle with reduced denominator <= max_denominator
// (period under multiplication by d capped at 8) and group the rays by which
// fixed point of f they land on. Requires a connected Julia set: every
// critical orbit must stay bounded.
RayPortrait fixed_point_ray_portrait(const PotentialField& field, int max_denominator = 31);

}  // namespace polypuzzle
