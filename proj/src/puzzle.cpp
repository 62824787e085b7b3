#include "polypuzzle/puzzle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "polypuzzle/cycles.hpp"
#include "polypuzzle/errors.hpp"
#include "polypuzzle/internal_graph.hpp"
#include "polypuzzle/ray.hpp"
#include "subdivision.hpp"

namespace polypuzzle {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt(Complex z) {
    return "(" + fmt(z.real()) + ", " + fmt(z.imag()) + ")";
}

}  // namespace

PuzzleGraph build_puzzle_graph(const Polynomial& poly,
                               const PuzzleConfig& config) {
    if (poly.degree() < 2)
        throw ConfigError("puzzle construction needs degree at least 2");
    if (!(config.equipotential_level > 0) ||
        !std::isfinite(config.equipotential_level))
        throw ConfigError("equipotential level must be positive");
    if (config.depth_cap < 1 || config.depth_cap > 12)
        throw ConfigError("depth cap must lie in [1, 12]");
    if (config.max_angle_denominator < 3)
        throw ConfigError("angle denominator cap must be at least 3");
    if (config.neutral_period_cap < 1)
        throw ConfigError("neutral period cap must be at least 1");

    const int d = poly.degree();

    // A connected Julia set is the standing assumption behind external-ray
    // combinatorics: every critical orbit must stay bounded.
    for (Complex c : critical_points(poly)) {
        IterateResult orbit = poly.iterate(c, 1000);
        if (orbit.escaped)
            throw BuildError(
                "disconnected Julia set is unsupported: critical point " +
                fmt(c) + " escapes after " + std::to_string(orbit.steps) +
                " steps");
    }

    // Refuse irrationally neutral cycles before any ray work: their puzzle
    // pieces would not shrink and no finite subdivision certifies them.
    const std::vector<Cycle> cycles =
        find_cycles(poly, config.neutral_period_cap);
    for (const Cycle& c : cycles)
        if (c.type == CycleType::IrrationallyNeutral)
            throw BuildError("irrationally-neutral detected: period " +
                             std::to_string(c.period) + " cycle at " +
                             fmt(c.points.front()));

    PotentialField field = PotentialField::make(poly);
    RayPortrait portrait =
        fixed_point_ray_portrait(field, config.max_angle_denominator);
    if (!portrait.stalled.empty())
        throw BuildError("ray portrait incomplete: " +
                         std::to_string(portrait.stalled.size()) +
                         " rays stalled, first at angle " +
                         portrait.stalled.front().str());

    PuzzleGraph graph{poly};
    graph.equipotential_level = config.equipotential_level;
    graph.depth_cap = config.depth_cap;

    std::set<Angle> angle_set;
    for (const RayPortrait::Group& group : portrait.groups) {
        if (!group.biaccessible) continue;
        FixedPointEntry entry;
        entry.point = group.fixed_point;
        entry.angles = group.angles;
        std::sort(entry.angles.begin(), entry.angles.end());
        graph.fixed_point_set.push_back(std::move(entry));
        for (const Angle& a : group.angles) angle_set.insert(a);
    }
    if (graph.fixed_point_set.empty())
        throw BuildError(
            "no cut point found: no fixed point has two or more rays");
    for (const Angle& a : angle_set)
        if (angle_set.find(a.map_forward(d)) == angle_set.end())
            throw BuildError("ray angles are not forward closed at " + a.str());
    graph.ray_angles.assign(angle_set.begin(), angle_set.end());

    // The return power: one iterate that fixes every marked ray angle and
    // every bounded periodic Fatou component.
    long long power = 1;
    for (const Angle& a : graph.ray_angles) {
        AngleOrbit orbit = angle_orbit(a, d);
        power = std::lcm(power, static_cast<long long>(orbit.period));
    }
    for (const Cycle& c : cycles) {
        if (c.type == CycleType::Superattracting ||
            c.type == CycleType::Attracting || c.type == CycleType::Parabolic)
            power = std::lcm(power, static_cast<long long>(c.period));
    }
    if (power > 24)
        throw ConfigError("iterate power " + std::to_string(power) +
                          " exceeds the cap 24");
    graph.iterate_power = static_cast<int>(power);

    if (config.internal_graphs) {
        for (const Cycle& c : cycles) {
            if (graph.iterate_power % c.period != 0) continue;
            if (c.type == CycleType::Superattracting) {
                for (int i = 0; i < c.period; ++i)
                    graph.internal_graphs.push_back(
                        build_internal_graph(poly, c, i));
            } else if (c.type == CycleType::Attracting ||
                       c.type == CycleType::Parabolic) {
                // Delegates to the same refusal the direct call makes.
                build_internal_graph(poly, c, 0);
            }
        }
    }

    graph.cache = std::make_shared<PuzzleCache>(
        poly, config.equipotential_level, config.depth_cap,
        graph.fixed_point_set);
    return graph;
}

}  // namespace polypuzzle
