#include <omp.h>

#include <chrono>
#include <cstdio>
#include <vector>

#include "polypuzzle/cycles.hpp"
#include "polypuzzle/grid.hpp"
#include "polypuzzle/polynomial.hpp"
#include "polypuzzle/potential.hpp"
#include "polypuzzle/ray.hpp"

using namespace polypuzzle;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

int main() {
    const Polynomial poly = parse_polynomial("z^2-1");
    const std::vector<Cycle> cycles = find_cycles(poly, 6);
    const Box box = Box::centered_square(2.0);
    const int threads = omp_get_max_threads();

    auto start = Clock::now();
    const GridClassification serial_grid =
        classify_grid(poly, box, 512, 512, 800, cycles, ExecutionPolicy::Serial);
    const double grid_serial_ms = ms_since(start);
    start = Clock::now();
    const GridClassification parallel_grid =
        classify_grid(poly, box, 512, 512, 800, cycles, ExecutionPolicy::Parallel);
    const double grid_parallel_ms = ms_since(start);
    const bool grid_match = serial_grid.labels == parallel_grid.labels;
    std::printf("grid 512x512 x800     serial %8.1f ms   parallel %8.1f ms   %d threads   x%.2f   labels %s\n",
                grid_serial_ms, grid_parallel_ms, threads,
                grid_serial_ms / grid_parallel_ms, grid_match ? "identical" : "DIFFER");

    const PotentialField field = PotentialField::make(poly);
    std::vector<Angle> angles;
    for (int k = 1; k < 97; ++k) angles.push_back(Angle(k, 97));

    start = Clock::now();
    std::vector<ExternalRay> serial_rays(angles.size());
    for (std::size_t i = 0; i < angles.size(); ++i)
        serial_rays[i] = trace_external_ray(field, angles[i]);
    const double ray_serial_ms = ms_since(start);

    start = Clock::now();
    std::vector<ExternalRay> parallel_rays(angles.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < angles.size(); ++i)
        parallel_rays[i] = trace_external_ray(field, angles[i]);
    const double ray_parallel_ms = ms_since(start);

    bool ray_match = true;
    for (std::size_t i = 0; i < angles.size(); ++i)
        if (serial_rays[i].points != parallel_rays[i].points) ray_match = false;
    std::printf("rays  96 x depth 1e-6 serial %8.1f ms   parallel %8.1f ms   %d threads   x%.2f   traces %s\n",
                ray_serial_ms, ray_parallel_ms, threads, ray_serial_ms / ray_parallel_ms,
                ray_match ? "identical" : "DIFFER");

    return grid_match && ray_match ? 0 : 1;
}
