#include "polypuzzle/components.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "polypuzzle/geometry.hpp"

namespace polypuzzle {

namespace {

// Union-find over pixel indices; uniting by smaller index keeps each root
// at its component's first pixel in row-major order.
struct UnionFind {
    std::vector<std::int32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n, -1) {}
    bool active(std::int32_t i) const { return parent[i] >= 0; }
    std::int32_t find(std::int32_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    }
    void unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a > b) std::swap(a, b);
        parent[b] = a;
    }
};

std::string format_point(Complex z) {
    return "(" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) +
           ")";
}

}  // namespace

std::vector<ComponentRecord> extract_components(const GridClassification& grid,
                                                ComponentKind kind) {
    const int nx = grid.nx;
    const int ny = grid.ny;
    const std::size_t total = grid.labels.size();
    const auto member = [&](std::size_t i) {
        const PixelLabel& L = grid.labels[i];
        return kind == ComponentKind::FilledJulia
                   ? L.kind != PixelKind::Escaping
                   : L.kind == PixelKind::Basin;
    };
    const auto compatible = [&](std::size_t i, std::size_t j) {
        return kind == ComponentKind::FilledJulia ||
               (grid.labels[i].cycle == grid.labels[j].cycle &&
                grid.labels[i].phase == grid.labels[j].phase);
    };

    UnionFind uf(total);
    for (std::size_t i = 0; i < total; ++i) {
        if (member(i)) uf.parent[i] = static_cast<std::int32_t>(i);
    }
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const std::size_t i = static_cast<std::size_t>(iy) * nx + ix;
            if (!member(i)) continue;
            if (ix > 0 && member(i - 1) && compatible(i, i - 1)) {
                uf.unite(static_cast<std::int32_t>(i),
                         static_cast<std::int32_t>(i - 1));
            }
            if (iy > 0 && member(i - nx) && compatible(i, i - nx)) {
                uf.unite(static_cast<std::int32_t>(i),
                         static_cast<std::int32_t>(i - nx));
            }
        }
    }

    // Roots are component-minimal pixel indices, so a component is first
    // met at its root during the ascending scan.
    std::vector<std::int32_t> slot(total, -1);
    std::vector<ComponentRecord> records;
    std::vector<std::vector<Complex>> run_ends;  // hull candidates
    std::vector<std::int32_t> first_pixel;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const std::size_t i = static_cast<std::size_t>(iy) * nx + ix;
            if (!member(i)) continue;
            const std::int32_t root = uf.find(static_cast<std::int32_t>(i));
            if (slot[root] < 0) {
                slot[root] = static_cast<std::int32_t>(records.size());
                ComponentRecord rec;
                rec.kind = kind;
                if (kind == ComponentKind::Fatou) {
                    rec.cycle = grid.labels[i].cycle;
                    rec.phase = grid.labels[i].phase;
                }
                records.push_back(rec);
                run_ends.emplace_back();
                first_pixel.push_back(root);
            }
            ComponentRecord& rec = records[slot[root]];
            ++rec.pixel_count;
            if (ix == 0 || ix == nx - 1 || iy == 0 || iy == ny - 1) {
                rec.touches_boundary = true;
            }
            // Only horizontal run endpoints can be hull vertices.
            const bool left = ix > 0 && member(i - 1) && compatible(i, i - 1);
            const bool right =
                ix + 1 < nx && member(i + 1) && compatible(i, i + 1);
            if (!left || !right) {
                run_ends[slot[root]].push_back(grid.pixel_center(ix, iy));
            }
        }
    }

    for (std::size_t k = 0; k < records.size(); ++k) {
        records[k].hull = convex_hull(run_ends[k]);
        records[k].diameter = max_pairwise_distance(records[k].hull);
    }

    // Flag components holding a detected attracting or superattracting
    // cycle point.
    for (const Cycle& c : grid.cycles) {
        if (c.type != CycleType::Attracting &&
            c.type != CycleType::Superattracting) {
            continue;
        }
        for (const Complex p : c.points) {
            const int ix = static_cast<int>(
                std::floor((p.real() - grid.box.x0) / grid.box.width() * nx));
            const int iy = static_cast<int>(
                std::floor((p.imag() - grid.box.y0) / grid.box.height() * ny));
            if (ix < 0 || ix >= nx || iy < 0 || iy >= ny) continue;
            const std::size_t i = static_cast<std::size_t>(iy) * nx + ix;
            if (!member(i)) continue;
            records[slot[uf.find(static_cast<std::int32_t>(i))]].periodic =
                true;
        }
    }

    std::vector<std::size_t> order(records.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (records[a].diameter != records[b].diameter) {
            return records[a].diameter > records[b].diameter;
        }
        if (records[a].pixel_count != records[b].pixel_count) {
            return records[a].pixel_count > records[b].pixel_count;
        }
        return first_pixel[a] < first_pixel[b];
    });
    std::vector<ComponentRecord> sorted;
    sorted.reserve(records.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        sorted.push_back(std::move(records[order[k]]));
        sorted.back().id = static_cast<int>(k);
    }
    return sorted;
}

double component_diameter(const ComponentRecord& record) {
    return max_pairwise_distance(record.hull);
}

std::vector<ShrinkRow> shrinkage_counts(
    const std::vector<ComponentRecord>& records,
    const std::vector<double>& epsilons) {
    for (std::size_t k = 0; k < epsilons.size(); ++k) {
        if (!(epsilons[k] > 0.0)) {
            throw Error("epsilons must be positive");
        }
        if (k > 0 && epsilons[k] > epsilons[k - 1]) {
            throw Error("epsilons must be sorted descending");
        }
    }
    std::vector<ShrinkRow> rows;
    rows.reserve(epsilons.size());
    for (const double eps : epsilons) {
        int count = 0;
        for (const ComponentRecord& rec : records) {
            if (!rec.touches_boundary && rec.diameter > eps) ++count;
        }
        rows.push_back({eps, count});
    }
    return rows;
}

StabilityReport shrink_stability(const Polynomial& poly, const Box& box,
                                 ComponentKind kind,
                                 const std::vector<int>& resolutions,
                                 const std::vector<double>& epsilons,
                                 int max_iter, int max_period,
                                 ExecutionPolicy policy) {
    if (resolutions.empty()) throw Error("at least one resolution required");

    // Gate on the cheap fixed-point classification first, then on the full
    // cycle sweep, so a neutral fixed point refuses before any heavy work.
    const auto gate = [](const std::vector<Cycle>& cycles) {
        for (const Cycle& c : cycles) {
            if (c.type == CycleType::IrrationallyNeutral) {
                throw BuildError("irrationally-neutral detected: period " +
                                 std::to_string(c.period) + " cycle at " +
                                 format_point(c.points.front()));
            }
        }
    };
    gate(find_cycles(poly, 1));
    const std::vector<Cycle> cycles = find_cycles(poly, max_period);
    gate(cycles);

    StabilityReport rep;
    rep.epsilons = epsilons;
    rep.resolutions = resolutions;
    for (const int res : resolutions) {
        const GridClassification grid =
            classify_grid(poly, box, res, res, max_iter, cycles, policy);
        const std::vector<ComponentRecord> records =
            extract_components(grid, kind);
        const std::vector<ShrinkRow> rows =
            shrinkage_counts(records, epsilons);
        std::vector<int> counts;
        counts.reserve(rows.size());
        for (const ShrinkRow& r : rows) counts.push_back(r.count);
        rep.counts.push_back(counts);
        int boundary = 0;
        for (const ComponentRecord& rec : records) {
            if (rec.touches_boundary) ++boundary;
        }
        rep.excluded.push_back(boundary);
    }
    rep.stable = true;
    for (std::size_t k = 1; k < rep.counts.size(); ++k) {
        if (rep.counts[k] != rep.counts.front()) rep.stable = false;
    }
    return rep;
}

}  // namespace polypuzzle
