#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "polypuzzle/components.hpp"
#include "polypuzzle/cycles.hpp"
#include "polypuzzle/errors.hpp"
#include "polypuzzle/grid.hpp"
#include "polypuzzle/potential.hpp"

using namespace polypuzzle;

namespace {

std::vector<int> fatou_counts(const Polynomial& f, int res, int max_iter,
                              int max_period,
                              const std::vector<double>& eps) {
    const auto cycles = find_cycles(f, max_period);
    const auto grid = classify_grid(f, Box::centered_square(2.0), res, res,
                                    max_iter, cycles);
    const auto records = extract_components(grid, ComponentKind::Fatou);
    std::vector<int> counts;
    for (const ShrinkRow& row : shrinkage_counts(records, eps)) {
        counts.push_back(row.count);
    }
    return counts;
}

}  // namespace

TEST_CASE("squaring map grid has the unit-circle split") {
    const Polynomial f = parse_polynomial("z^2");
    const auto cycles = find_cycles(f, 1);
    const auto grid =
        classify_grid(f, Box::centered_square(2.0), 256, 256, 500, cycles);
    CHECK(grid.warning.empty());

    int super_id = -1;
    for (std::size_t k = 0; k < cycles.size(); ++k) {
        if (cycles[k].type == CycleType::Superattracting) {
            super_id = static_cast<int>(k);
        }
    }
    REQUIRE(super_id >= 0);

    const double pitch = grid.pitch();
    int escaping = 0;
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const PixelLabel& L = grid.at(ix, iy);
            const double r = std::abs(grid.pixel_center(ix, iy));
            if (L.kind == PixelKind::Unresolved) {
                CHECK(std::abs(r - 1.0) <= 2.0 * pitch);
            } else if (L.kind == PixelKind::Escaping) {
                ++escaping;
                CHECK(r >= 1.0 - 2.0 * pitch);
                CHECK(L.index >= 0);
            } else {
                CHECK(r <= 1.0 + 2.0 * pitch);
                CHECK(L.cycle == super_id);
                CHECK(L.phase == 0);
            }
        }
    }
    CHECK(escaping > 0);

    // Escape labels certify positive escape rate.
    const PotentialField field = PotentialField::make(f);
    int sampled = 0;
    for (std::size_t i = 0; i < grid.labels.size() && sampled < 64; i += 499) {
        if (grid.labels[i].kind != PixelKind::Escaping) continue;
        const int ix = static_cast<int>(i) % grid.nx;
        const int iy = static_cast<int>(i) / grid.nx;
        CHECK(green_potential(field, grid.pixel_center(ix, iy)) > 0.0);
        ++sampled;
    }
    CHECK(sampled == 64);

    const auto fatou = extract_components(grid, ComponentKind::Fatou);
    REQUIRE(fatou.size() == 1);
    CHECK(fatou[0].id == 0);
    CHECK(fatou[0].periodic);
    CHECK_FALSE(fatou[0].touches_boundary);
    CHECK(fatou[0].cycle == super_id);
    CHECK(fatou[0].diameter > 2.0 - 2.0 * pitch);
    CHECK(fatou[0].diameter <= 2.0);
    CHECK(component_diameter(fatou[0]) == fatou[0].diameter);

    const auto filled = extract_components(grid, ComponentKind::FilledJulia);
    REQUIRE(filled.size() == 1);
    CHECK(filled[0].diameter > 2.0 - 2.0 * pitch);
}

TEST_CASE("escaped-critical-point map classifies as all escaping") {
    const Polynomial f = parse_polynomial("z^2 + 2");
    CHECK(f.iterate(Complex{0, 0}, 100).escaped);
    CHECK(f.bounding_radius() == doctest::Approx(2.0).epsilon(1e-12));

    const auto cycles = find_cycles(f, 2);
    const auto grid =
        classify_grid(f, Box::centered_square(2.0), 256, 256, 500, cycles);
    CHECK(grid.warning.empty());
    for (const PixelLabel& L : grid.labels) {
        CHECK(L.kind == PixelKind::Escaping);
    }
    CHECK(extract_components(grid, ComponentKind::Fatou).empty());
    const auto filled = extract_components(grid, ComponentKind::FilledJulia);
    for (const ComponentRecord& rec : filled) {
        CHECK(rec.diameter <= 2.0 * grid.pitch());
    }
    CHECK(shrinkage_counts(filled, {0.1}).front().count == 0);
}

TEST_CASE("basilica grid structure and component table") {
    const Polynomial f = fixtures::basilica();
    const auto cycles = find_cycles(f, 2);
    const auto grid =
        classify_grid(f, Box::centered_square(2.0), 512, 512, 1000, cycles);
    CHECK(grid.warning.empty());

    std::size_t unresolved = 0;
    for (const PixelLabel& L : grid.labels) {
        if (L.kind == PixelKind::Unresolved) ++unresolved;
    }
    CHECK(unresolved < grid.labels.size() / 50);

    const auto fatou = extract_components(grid, ComponentKind::Fatou);
    REQUIRE(fatou.size() >= 7);
    // Component of 0 spans alpha to -alpha; the components of -1 and its
    // mirror twin at +1 tie in diameter by the z -> -z symmetry.
    CHECK(fatou[0].diameter > 1.15);
    CHECK(fatou[0].diameter < 1.30);
    CHECK(fatou[1].diameter > 0.60);
    CHECK(fatou[1].diameter < 0.68);
    CHECK(fatou[1].diameter == doctest::Approx(fatou[2].diameter).epsilon(1e-13));

    int periodic_count = 0;
    for (const ComponentRecord& rec : fatou) {
        if (rec.periodic) ++periodic_count;
        CHECK(rec.cycle >= 0);
        CHECK(rec.phase >= 0);
    }
    CHECK(periodic_count == 2);
    CHECK(fatou[0].periodic);
    CHECK((fatou[1].periodic || fatou[2].periodic));
    // The two periodic components took different entry phases.
    const ComponentRecord& second =
        fatou[1].periodic ? fatou[1] : fatou[2];
    CHECK(second.phase != fatou[0].phase);

    // Forward invariance: the image of a basin pixel center lands in a
    // basin pixel of the same cycle for nearly all samples.
    int sampled = 0;
    int preserved = 0;
    for (int iy = 1; iy < grid.ny - 1; ++iy) {
        for (int ix = 1; ix < grid.nx - 1; ix += 5) {
            const PixelLabel& L = grid.at(ix, iy);
            if (L.kind != PixelKind::Basin) continue;
            const Complex w = f(grid.pixel_center(ix, iy));
            const int jx = static_cast<int>(
                std::floor((w.real() - grid.box.x0) / grid.box.width() *
                           grid.nx));
            const int jy = static_cast<int>(
                std::floor((w.imag() - grid.box.y0) / grid.box.height() *
                           grid.ny));
            if (jx <= 0 || jx >= grid.nx - 1 || jy <= 0 || jy >= grid.ny - 1) {
                continue;
            }
            ++sampled;
            const PixelLabel& M = grid.at(jx, jy);
            if (M.kind == PixelKind::Basin && M.cycle == L.cycle) ++preserved;
        }
    }
    REQUIRE(sampled > 1000);
    CHECK(preserved * 100 >= sampled * 95);
}

TEST_CASE("serial and parallel classification agree bitwise") {
    const Polynomial f = fixtures::basilica();
    const auto cycles = find_cycles(f, 2);
    const auto a = classify_grid(f, Box::centered_square(2.0), 128, 128, 500,
                                 cycles, ExecutionPolicy::Serial);
    const auto b = classify_grid(f, Box::centered_square(2.0), 128, 128, 500,
                                 cycles, ExecutionPolicy::Parallel);
    CHECK(a.labels == b.labels);
}

TEST_CASE("epsilon-counts are resolution stable") {
    const std::vector<double> eps = {0.4, 0.2, 0.1};
    SUBCASE("basilica across three resolutions") {
        const auto c128 = fatou_counts(fixtures::basilica(), 128, 1000, 2,
                                       {0.4});
        const auto c256 = fatou_counts(fixtures::basilica(), 256, 1000, 2,
                                       eps);
        const auto c512 = fatou_counts(fixtures::basilica(), 512, 1000, 2,
                                       eps);
        CHECK(c256 == c512);
        CHECK(c128.front() == c256.front());
        // Regression baseline from the first derivation.
        CHECK(c512 == std::vector<int>{3, 5, 7});
    }
    SUBCASE("rabbit across two resolutions") {
        const auto c256 = fatou_counts(fixtures::rabbit(), 256, 1000, 3, eps);
        const auto c512 = fatou_counts(fixtures::rabbit(), 512, 1000, 3, eps);
        CHECK(c256 == c512);
        CHECK(c512 == std::vector<int>{5, 7, 15});
    }
}

TEST_CASE("rabbit periodic components carry the three phases") {
    const Polynomial f = fixtures::rabbit();
    const auto cycles = find_cycles(f, 3);
    const auto grid =
        classify_grid(f, Box::centered_square(2.0), 256, 256, 1000, cycles);
    const auto fatou = extract_components(grid, ComponentKind::Fatou);
    std::vector<int> phases;
    for (const ComponentRecord& rec : fatou) {
        if (rec.periodic) phases.push_back(rec.phase);
    }
    REQUIRE(phases.size() == 3);
    std::sort(phases.begin(), phases.end());
    CHECK(phases == std::vector<int>{0, 1, 2});
    CHECK(fatou[0].diameter > 1.05);
    CHECK(fatou[0].diameter < 1.15);
}

TEST_CASE("diameters refine with resolution") {
    const Polynomial f = fixtures::basilica();
    const auto cycles = find_cycles(f, 2);
    std::vector<double> coarse;
    std::vector<double> fine;
    for (int res : {256, 512}) {
        const auto grid = classify_grid(f, Box::centered_square(2.0), res,
                                        res, 1000, cycles);
        const auto fatou = extract_components(grid, ComponentKind::Fatou);
        REQUIRE(fatou.size() >= 3);
        auto& out = res == 256 ? coarse : fine;
        for (int k = 0; k < 3; ++k) out.push_back(fatou[k].diameter);
    }
    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(coarse[k] - fine[k]) < 0.05 * fine[k]);
    }
}

TEST_CASE("shrinkage count table") {
    SUBCASE("edge cases and validation") {
        CHECK(shrinkage_counts({}, {1.0, 0.5}).size() == 2);
        CHECK(shrinkage_counts({}, {1.0, 0.5})[1].count == 0);
        ComponentRecord big;
        big.diameter = 0.5;
        ComponentRecord censored;
        censored.diameter = 2.0;
        censored.touches_boundary = true;
        const std::vector<ComponentRecord> recs = {censored, big};
        CHECK(shrinkage_counts(recs, {1.0}).front().count == 0);
        CHECK(shrinkage_counts(recs, {0.4}).front().count == 1);
        CHECK_THROWS_AS(shrinkage_counts(recs, {0.1, 0.4}), Error);
        CHECK_THROWS_AS(shrinkage_counts(recs, {0.4, 0.0}), Error);
    }
    SUBCASE("monotone in epsilon on real data") {
        const Polynomial f = fixtures::basilica();
        const auto grid = classify_grid(f, Box::centered_square(2.0), 256,
                                        256, 1000, find_cycles(f, 2));
        const auto fatou = extract_components(grid, ComponentKind::Fatou);
        const auto rows = shrinkage_counts(
            fatou, {1.5, 1.0, 0.6, 0.4, 0.25, 0.12, 0.05});
        for (std::size_t k = 1; k < rows.size(); ++k) {
            CHECK(rows[k].count >= rows[k - 1].count);
        }
        CHECK(rows.front().count == 0);
    }
}

TEST_CASE("shrink stability pipeline and neutral gate") {
    SUBCASE("basilica proceeds and is stable") {
        const auto rep = shrink_stability(
            fixtures::basilica(), Box::centered_square(2.0),
            ComponentKind::Fatou, {256, 512}, {0.4, 0.2, 0.1}, 1000);
        CHECK(rep.stable);
        REQUIRE(rep.counts.size() == 2);
        CHECK(rep.counts[0] == std::vector<int>{3, 5, 7});
        CHECK(rep.excluded == std::vector<int>{0, 0});
    }
    SUBCASE("irrationally neutral parameter refuses") {
        try {
            shrink_stability(fixtures::golden_neutral(),
                             Box::centered_square(2.0), ComponentKind::Fatou,
                             {128}, {0.4}, 500);
            FAIL("expected a refusal");
        } catch (const BuildError& e) {
            CHECK(std::string(e.what()).find("irrationally-neutral detected") !=
                  std::string::npos);
        }
    }
}

TEST_CASE("grid validation") {
    const Polynomial f = fixtures::basilica();
    const auto cycles = find_cycles(f, 2);
    CHECK_THROWS_AS(classify_grid(f, Box::centered_square(2.0), 32, 256, 500,
                                  cycles),
                    ConfigError);
    CHECK_THROWS_AS(classify_grid(f, Box::centered_square(2.0), 256, 256, 50,
                                  cycles),
                    ConfigError);
    // Box too small for the filled Julia set (radius is the golden ratio).
    CHECK_THROWS_AS(classify_grid(f, Box::centered_square(1.0), 256, 256, 500,
                                  cycles),
                    ConfigError);
    CHECK_THROWS_AS(classify_grid(f, {2.0, -2.0, -2.0, 2.0}, 256, 256, 500,
                                  cycles),
                    ConfigError);

    const auto warned = classify_grid(f, Box::centered_square(2.0), 128, 128,
                                      500, {});
    CHECK(warned.warning.find("no cycles") != std::string::npos);
}
