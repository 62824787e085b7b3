#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "polypuzzle/errors.hpp"
#include "polypuzzle/geometry.hpp"

using polypuzzle::Complex;
using polypuzzle::PointLocation;

namespace {

constexpr double kPi = 3.14159265358979323846;

double signed_area2(const std::vector<Complex>& poly) {
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Complex a = poly[i];
        const Complex b = poly[(i + 1) % poly.size()];
        s += a.real() * b.imag() - b.real() * a.imag();
    }
    return s;
}

double brute_force_diameter(const std::vector<Complex>& pts) {
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            best = std::max(best, std::abs(pts[i] - pts[j]));
        }
    }
    return best;
}

std::vector<Complex> unit_square() {
    return {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
}

std::vector<Complex> regular_ngon(int n, Complex center, double radius) {
    std::vector<Complex> poly;
    poly.reserve(n);
    for (int k = 0; k < n; ++k) {
        const double a = 2.0 * kPi * k / n;
        poly.push_back(center + radius * Complex{std::cos(a), std::sin(a)});
    }
    return poly;
}

// Dense boundary sampling oracle for the shape ratio: samples_per_edge
// points per edge, endpoints included, so every vertex is sampled exactly.
double dense_shape_oracle(const std::vector<Complex>& poly, Complex z,
                          int samples_per_edge) {
    double sup = 0.0;
    double inf = std::abs(z - poly[0]);
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Complex a = poly[i];
        const Complex b = poly[(i + 1) % poly.size()];
        for (int k = 0; k <= samples_per_edge; ++k) {
            const double t = static_cast<double>(k) / samples_per_edge;
            const double d = std::abs(z - (a + t * (b - a)));
            sup = std::max(sup, d);
            inf = std::min(inf, d);
        }
    }
    return sup / inf;
}

}  // namespace

TEST_CASE("convex hull of simple configurations") {
    SUBCASE("square with interior and edge points") {
        std::vector<Complex> pts = unit_square();
        pts.push_back({0.5, 0.5});
        pts.push_back({0.25, 0.75});
        pts.push_back({0.5, 0.0});
        pts.push_back({1.0, 0.5});
        const auto hull = polypuzzle::convex_hull(pts);
        REQUIRE(hull.size() == 4);
        CHECK(signed_area2(hull) > 0.0);
        for (const Complex c : unit_square()) {
            CHECK(std::count(hull.begin(), hull.end(), c) == 1);
        }
    }
    SUBCASE("collinear points reduce to the extremes") {
        std::vector<Complex> pts = {{2, 0}, {0, 0}, {3, 0}, {1, 0}};
        const auto hull = polypuzzle::convex_hull(pts);
        REQUIRE(hull.size() == 2);
        CHECK(hull[0] == Complex{0, 0});
        CHECK(hull[1] == Complex{3, 0});
    }
    SUBCASE("degenerate sizes") {
        CHECK(polypuzzle::convex_hull({}).empty());
        CHECK(polypuzzle::convex_hull({{1, 2}}).size() == 1);
        CHECK(polypuzzle::convex_hull({{1, 2}, {1, 2}, {1, 2}}).size() == 1);
        CHECK(polypuzzle::convex_hull({{1, 2}, {3, 4}}).size() == 2);
    }
}

TEST_CASE("convex hull properties on random clouds") {
    std::mt19937 rng(2026);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Complex> pts;
        for (int i = 0; i < 200; ++i) pts.push_back({u(rng), u(rng)});
        const auto hull = polypuzzle::convex_hull(pts);
        REQUIRE(hull.size() >= 3);

        // Strict convexity: every consecutive triple is a strict left turn.
        for (std::size_t i = 0; i < hull.size(); ++i) {
            const Complex o = hull[i];
            const Complex a = hull[(i + 1) % hull.size()];
            const Complex b = hull[(i + 2) % hull.size()];
            const double cr = (a.real() - o.real()) * (b.imag() - o.imag()) -
                              (a.imag() - o.imag()) * (b.real() - o.real());
            CHECK(cr > 0.0);
        }
        // Every hull vertex is an input point.
        for (const Complex h : hull) {
            CHECK(std::count(pts.begin(), pts.end(), h) >= 1);
        }
        // Every input point lies inside or on the hull.
        for (const Complex p : pts) {
            CHECK(polypuzzle::locate_in_polygon(hull, p, 1e-12) !=
                  PointLocation::Outside);
        }
    }
}

TEST_CASE("max pairwise distance matches brute force") {
    SUBCASE("three collinear pixels with pitch h") {
        const double h = 0.125;
        const std::vector<Complex> pts = {{0, 0}, {h, 0}, {2 * h, 0}};
        CHECK(polypuzzle::max_pairwise_distance(pts) ==
              doctest::Approx(2 * h).epsilon(1e-14));
    }
    SUBCASE("degenerate sizes") {
        CHECK(polypuzzle::max_pairwise_distance({}) == 0.0);
        CHECK(polypuzzle::max_pairwise_distance({{3, 4}}) == 0.0);
        CHECK(polypuzzle::max_pairwise_distance({{0, 0}, {3, 4}}) ==
              doctest::Approx(5.0));
    }
    SUBCASE("random clouds, direct path") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (int n : {3, 17, 200}) {
            std::vector<Complex> pts;
            for (int i = 0; i < n; ++i) pts.push_back({u(rng), u(rng)});
            CHECK(polypuzzle::max_pairwise_distance(pts) ==
                  doctest::Approx(brute_force_diameter(pts)).epsilon(1e-13));
        }
    }
    SUBCASE("1500-vertex circle hull, calipers path") {
        std::vector<Complex> pts;
        const Complex center{0.3, 0.1};
        for (int k = 0; k < 1500; ++k) {
            const double a = 2.0 * kPi * k / 1500.0;
            pts.push_back(center + 2.0 * Complex{std::cos(a), std::sin(a)});
        }
        REQUIRE(polypuzzle::convex_hull(pts).size() == 1500);
        const double d = polypuzzle::max_pairwise_distance(pts);
        CHECK(d == doctest::Approx(brute_force_diameter(pts)).epsilon(1e-13));
        CHECK(d == doctest::Approx(4.0).epsilon(1e-12));
    }
}

TEST_CASE("segment distance") {
    CHECK(polypuzzle::segment_distance({0, 0}, {2, 0}, {1, 3}) ==
          doctest::Approx(3.0));
    CHECK(polypuzzle::segment_distance({0, 0}, {2, 0}, {5, 4}) ==
          doctest::Approx(5.0));
    CHECK(polypuzzle::segment_distance({0, 0}, {2, 0}, {-3, -4}) ==
          doctest::Approx(5.0));
    CHECK(polypuzzle::segment_distance({0, 0}, {2, 0}, {1.5, 0}) ==
          doctest::Approx(0.0));
    CHECK(polypuzzle::segment_distance({1, 1}, {1, 1}, {4, 5}) ==
          doctest::Approx(5.0));
}

TEST_CASE("point location in polygons") {
    const auto sq = unit_square();
    SUBCASE("square cases") {
        CHECK(polypuzzle::locate_in_polygon(sq, {0.5, 0.5}, 1e-9) ==
              PointLocation::Inside);
        CHECK(polypuzzle::locate_in_polygon(sq, {2.0, 0.5}, 1e-9) ==
              PointLocation::Outside);
        CHECK(polypuzzle::locate_in_polygon(sq, {1.0, 0.5}, 1e-9) ==
              PointLocation::Boundary);
        CHECK(polypuzzle::locate_in_polygon(sq, {0.5, 1e-10}, 1e-9) ==
              PointLocation::Boundary);
        CHECK(polypuzzle::locate_in_polygon(sq, {0.5, 1e-6}, 1e-9) ==
              PointLocation::Inside);
    }
    SUBCASE("ray through a vertex height") {
        CHECK(polypuzzle::locate_in_polygon(sq, {-0.5, 0.0}, 1e-12) ==
              PointLocation::Outside);
        CHECK(polypuzzle::locate_in_polygon(sq, {-0.5, 1.0}, 1e-12) ==
              PointLocation::Outside);
    }
    SUBCASE("concave L shape") {
        // L covering [0,2]x[0,1] plus [0,1]x[1,2]; notch is [1,2]x[1,2].
        const std::vector<Complex> ell = {{0, 0}, {2, 0}, {2, 1},
                                          {1, 1}, {1, 2}, {0, 2}};
        CHECK(polypuzzle::locate_in_polygon(ell, {1.5, 0.5}, 1e-9) ==
              PointLocation::Inside);
        CHECK(polypuzzle::locate_in_polygon(ell, {0.5, 1.5}, 1e-9) ==
              PointLocation::Inside);
        CHECK(polypuzzle::locate_in_polygon(ell, {1.5, 1.5}, 1e-9) ==
              PointLocation::Outside);
        CHECK(polypuzzle::locate_in_polygon(ell, {1.0, 1.5}, 1e-9) ==
              PointLocation::Boundary);
    }
    SUBCASE("containment with tolerance") {
        const std::vector<Complex> inner = {
            {0.25, 0.25}, {0.75, 0.25}, {0.75, 0.75}, {0.25, 0.75}};
        CHECK(polypuzzle::polygon_contains(sq, inner, 1e-9));
        CHECK_FALSE(polypuzzle::polygon_contains(inner, sq, 1e-9));
        std::vector<Complex> nudged = sq;
        for (Complex& v : nudged) v += Complex{1e-4, 0};
        CHECK(polypuzzle::polygon_contains(sq, nudged, 1e-3));
        CHECK_FALSE(polypuzzle::polygon_contains(sq, nudged, 1e-5));
    }
}

TEST_CASE("shape ratio exact cases") {
    const auto sq = unit_square();
    CHECK(polypuzzle::shape_about(sq, {0.5, 0.5}) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
    // Off-center point: sup is the distance to the far corners, inf the
    // distance to the near edge.
    CHECK(polypuzzle::shape_about(sq, {0.9, 0.5}) ==
          doctest::Approx(std::sqrt(1.06) / 0.1).epsilon(1e-13));
    for (int n : {3, 4, 5, 8, 16, 64}) {
        const auto gon = regular_ngon(n, {0.2, -0.3}, 1.5);
        CHECK(polypuzzle::shape_about(gon, {0.2, -0.3}) ==
              doctest::Approx(1.0 / std::cos(kPi / n)).epsilon(1e-12));
    }
}

TEST_CASE("shape ratio matches dense boundary sampling") {
    const auto sq = unit_square();
    std::mt19937 rng(2026);
    std::uniform_real_distribution<double> u(0.3, 0.7);
    for (int i = 0; i < 25; ++i) {
        const Complex z{u(rng), u(rng)};
        const double exact = polypuzzle::shape_about(sq, z);
        const double oracle = dense_shape_oracle(sq, z, 2500);
        CHECK(std::abs(exact - oracle) < 1e-6);
    }
    // Non-convex polygon: the vertex/edge-foot formula still applies.
    const std::vector<Complex> ell = {{0, 0}, {2, 0}, {2, 1},
                                      {1, 1}, {1, 2}, {0, 2}};
    const Complex z{0.6, 0.55};
    const double exact = polypuzzle::shape_about(ell, z);
    const double oracle = dense_shape_oracle(ell, z, 4000);
    CHECK(std::abs(exact - oracle) < 1e-5);
}

TEST_CASE("shape rejects points not strictly inside") {
    const auto sq = unit_square();
    CHECK_THROWS_AS(polypuzzle::shape_about(sq, {2.0, 2.0}), polypuzzle::Error);
    CHECK_THROWS_AS(polypuzzle::shape_about(sq, {1.0, 0.5}), polypuzzle::Error);
    CHECK_THROWS_AS(polypuzzle::shape_about(sq, {0.0, 0.0}), polypuzzle::Error);
    CHECK_THROWS_AS(polypuzzle::shape_about({{0, 0}, {1, 0}}, {0.5, 0.0}),
                    polypuzzle::Error);
}
