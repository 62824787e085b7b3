#include "polypuzzle/grid.hpp"

#include <cmath>
#include <cstddef>
#include <utility>

namespace polypuzzle {

namespace {

struct Attractor {
    Complex point;
    std::int32_t cycle;
    std::int32_t position;  // index of `point` within its cycle's orbit
    std::int32_t period;
};

// Entry thresholds, squared: 1e-4 for attractor capture, 1e-5 for a
// parabolic stability run.
constexpr double kAttractorNorm = 1e-8;
constexpr double kParabolicNorm = 1e-10;
constexpr int kParabolicRun = 50;

PixelLabel classify_point(const Polynomial& f, Complex z, int max_iter,
                          double escape_norm,
                          const std::vector<Attractor>& attractors,
                          const std::vector<Attractor>& parabolic) {
    int run = 0;
    int run_start = -1;
    std::int32_t run_cycle = -1;
    std::int32_t run_phase = -1;
    for (int k = 0;; ++k) {
        if (std::norm(z) > escape_norm) {
            return {PixelKind::Escaping, k, -1, -1};
        }
        for (const Attractor& a : attractors) {
            if (std::norm(z - a.point) < kAttractorNorm) {
                const std::int32_t phase =
                    ((a.position - k) % a.period + a.period) % a.period;
                return {PixelKind::Basin, k, a.cycle, phase};
            }
        }
        if (!parabolic.empty()) {
            double best = 1e300;
            std::int32_t best_cycle = -1;
            std::int32_t best_position = 0;
            std::int32_t best_period = 1;
            for (const Attractor& a : parabolic) {
                const double d2 = std::norm(z - a.point);
                if (d2 < best) {
                    best = d2;
                    best_cycle = a.cycle;
                    best_position = a.position;
                    best_period = a.period;
                }
            }
            if (best < kParabolicNorm) {
                if (run == 0) {
                    run_start = k;
                    run_cycle = best_cycle;
                    run_phase = ((best_position - run_start) % best_period +
                                 best_period) %
                                best_period;
                }
                if (++run >= kParabolicRun) {
                    return {PixelKind::Basin, run_start, run_cycle,
                            run_phase};
                }
            } else {
                run = 0;
            }
        }
        if (k == max_iter) break;
        z = f(z);
    }
    return {PixelKind::Unresolved, -1, -1, -1};
}

}  // namespace

GridClassification classify_grid(const Polynomial& poly, const Box& box,
                                 int nx, int ny, int max_iter,
                                 const std::vector<Cycle>& cycles,
                                 ExecutionPolicy policy) {
    if (nx < 64 || ny < 64) {
        throw ConfigError("grid resolution must be at least 64 per axis");
    }
    if (max_iter < 100) {
        throw ConfigError("grid max_iter must be at least 100");
    }
    if (!(box.x0 < box.x1) || !(box.y0 < box.y1) ||
        !std::isfinite(box.x0 + box.x1 + box.y0 + box.y1)) {
        throw ConfigError("grid box is empty or not finite");
    }
    const double r = poly.bounding_radius();
    if (!box.contains_disk(r, 1e-9 * (1.0 + r))) {
        throw ConfigError(
            "grid box must contain the disk |z| <= " + std::to_string(r) +
            " holding the filled Julia set");
    }

    std::vector<Attractor> attractors;
    std::vector<Attractor> parabolic;
    for (std::size_t id = 0; id < cycles.size(); ++id) {
        const Cycle& c = cycles[id];
        const bool attracting = c.type == CycleType::Attracting ||
                                c.type == CycleType::Superattracting;
        if (!attracting && c.type != CycleType::Parabolic) continue;
        for (std::size_t pos = 0; pos < c.points.size(); ++pos) {
            (attracting ? attractors : parabolic)
                .push_back({c.points[pos], static_cast<std::int32_t>(id),
                            static_cast<std::int32_t>(pos),
                            static_cast<std::int32_t>(c.points.size())});
        }
    }

    GridClassification grid;
    grid.box = box;
    grid.nx = nx;
    grid.ny = ny;
    grid.cycles = cycles;
    grid.labels.resize(static_cast<std::size_t>(nx) * ny);

    const double escape_norm =
        poly.escape_radius() * poly.escape_radius();
    const auto row = [&](int iy) {
        for (int ix = 0; ix < nx; ++ix) {
            grid.labels[static_cast<std::size_t>(iy) * nx + ix] =
                classify_point(poly, grid.pixel_center(ix, iy), max_iter,
                               escape_norm, attractors, parabolic);
        }
    };
    if (policy == ExecutionPolicy::Parallel) {
#pragma omp parallel for
        for (int iy = 0; iy < ny; ++iy) row(iy);
    } else {
        for (int iy = 0; iy < ny; ++iy) row(iy);
    }

    if (attractors.empty() && parabolic.empty()) {
        std::size_t unresolved = 0;
        for (const PixelLabel& L : grid.labels) {
            if (L.kind == PixelKind::Unresolved) ++unresolved;
        }
        if (unresolved * 100 > grid.labels.size()) {
            grid.warning =
                "interior suspected but no cycles supplied: " +
                std::to_string(unresolved) + " of " +
                std::to_string(grid.labels.size()) + " pixels unresolved";
        }
    }
    return grid;
}

}  // namespace polypuzzle
