#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "polypuzzle/errors.hpp"
#include "polypuzzle/potential.hpp"

using polypuzzle::Complex;
using polypuzzle::Polynomial;
using polypuzzle::PotentialField;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

std::vector<Complex> escaping_samples(const PotentialField& field, int want,
                                      std::uint64_t seed, double box = 3.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-box, box);
    std::vector<Complex> out;
    while (static_cast<int>(out.size()) < want) {
        const Complex z{u(rng), u(rng)};
        if (polypuzzle::green_potential(field, z) > 1e-6) out.push_back(z);
    }
    return out;
}

}  // namespace

TEST_CASE("green potential is log modulus for pure powers") {
    for (const char* text : {"z^2", "z^3"}) {
        const Polynomial p = polypuzzle::parse_polynomial(text);
        const PotentialField field = PotentialField::make(p);
        for (int k = 0; k < 8; ++k) {
            const double t = kTau * k / 8.0;
            const Complex z = std::exp(Complex{1.0, t});
            CHECK(std::abs(polypuzzle::green_potential(field, z) - 1.0) < 1e-9);
            const Complex w = std::exp(Complex{0.5, t});
            CHECK(std::abs(polypuzzle::green_potential(field, w) - 0.5) < 1e-9);
        }
    }
}

TEST_CASE("green potential vanishes exactly on bounded orbits") {
    const Polynomial b = fixtures::basilica();
    const PotentialField field = PotentialField::make(b);
    CHECK(polypuzzle::green_potential(field, {0.0, 0.0}) == 0.0);
    CHECK(polypuzzle::green_potential(field, {-1.0, 0.0}) == 0.0);
    const Polynomial r = fixtures::rabbit();
    const PotentialField rf = PotentialField::make(r);
    CHECK(polypuzzle::green_potential(rf, {0.0, 0.0}) == 0.0);
    CHECK(polypuzzle::green_potential(rf, fixtures::rabbit_c()) == 0.0);
}

TEST_CASE("green potential respects leading coefficient normalization") {
    // For f = 2z^2 the Böttcher conjugacy is w = 2z, so G = log(2|z|) far out.
    const Polynomial p = polypuzzle::parse_polynomial("2z^2");
    const PotentialField field = PotentialField::make(p);
    const Complex z{40.0, 0.0};
    CHECK(std::abs(polypuzzle::green_potential(field, z) - std::log(80.0)) < 1e-6);
}

TEST_CASE("functional equation holds for escaping points") {
    const Polynomial polys[] = {fixtures::squaring(), fixtures::basilica(), fixtures::rabbit(),
                                fixtures::cubic()};
    std::uint64_t seed = 11;
    for (const Polynomial& p : polys) {
        const PotentialField field = PotentialField::make(p);
        const int d = p.degree();
        for (Complex z : escaping_samples(field, 100, seed++)) {
            const double g = polypuzzle::green_potential(field, z);
            const double gf = polypuzzle::green_potential(field, p(z));
            CHECK(std::abs(gf - d * g) < 1e-9 * std::max(1.0, gf));
        }
    }

    // The pinned spot check: z^2 - 1 at z = 3.
    const PotentialField field = PotentialField::make(polys[1]);
    const double g3 = polypuzzle::green_potential(field, {3.0, 0.0});
    const double g8 = polypuzzle::green_potential(field, {8.0, 0.0});
    CHECK(std::abs(g8 - 2.0 * g3) < 1e-9);
}

TEST_CASE("external argument of radial maps") {
    const Polynomial sq = fixtures::squaring();
    const PotentialField field = PotentialField::make(sq);
    CHECK(polypuzzle::external_argument(field, {3.0, 0.0}) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(polypuzzle::external_argument(field, {-3.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(polypuzzle::external_argument(field, {0.0, 3.0}) == doctest::Approx(0.25).epsilon(1e-9));
    const Complex z = 2.0 * std::exp(Complex{0.0, kTau * 0.3});
    CHECK(std::abs(polypuzzle::external_argument(field, z) - 0.3) < 1e-9);
}

TEST_CASE("external argument is undefined off the basin") {
    const Polynomial b = fixtures::basilica();
    const PotentialField field = PotentialField::make(b);
    CHECK_THROWS_AS(polypuzzle::external_argument(field, {0.0, 0.0}), polypuzzle::NumericError);
}

TEST_CASE("external argument is deterministic") {
    const Polynomial r = fixtures::rabbit();
    const PotentialField field = PotentialField::make(r);
    const Complex z{1.7, 0.4};
    const double a = polypuzzle::external_argument(field, z);
    const double b = polypuzzle::external_argument(field, z);
    CHECK(a == b);
}

TEST_CASE("argument equation under the dynamics") {
    const Polynomial polys[] = {fixtures::basilica(), fixtures::rabbit(), fixtures::cubic()};
    std::uint64_t seed = 101;
    for (const Polynomial& p : polys) {
        const PotentialField field = PotentialField::make(p);
        const int d = p.degree();
        for (Complex z : escaping_samples(field, 40, seed++)) {
            const double a = polypuzzle::external_argument(field, z);
            const double af = polypuzzle::external_argument(field, p(z));
            double target = d * a;
            target -= std::floor(target);
            const double diff = std::abs(af - target);
            CHECK(std::min(diff, 1.0 - diff) < 1e-6);
        }
    }
}

TEST_CASE("equipotential circles for pure powers") {
    const Polynomial sq = fixtures::squaring();
    const PotentialField field = PotentialField::make(sq);

    const std::vector<Complex> half = polypuzzle::trace_equipotential(field, 0.5, 8);
    REQUIRE(half.size() == 8);
    for (int k = 0; k < 8; ++k) {
        const Complex expected = std::exp(Complex{0.5, kTau * k / 8.0});
        CHECK(std::abs(half[k] - expected) < 1e-6);
    }

    const Polynomial cube = polypuzzle::parse_polynomial("z^3");
    const PotentialField cf = PotentialField::make(cube);
    const std::vector<Complex> quad = polypuzzle::trace_equipotential(cf, 1.0, 4);
    REQUIRE(quad.size() == 4);
    for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(std::abs(quad[k]) - std::exp(1.0)) < 1e-6);
    }
}

TEST_CASE("equipotential self-check and winding") {
    const Polynomial b = fixtures::basilica();
    const PotentialField field = PotentialField::make(b);
    const std::vector<Complex> loop = polypuzzle::trace_equipotential(field, 1.0, 64);
    REQUIRE(loop.size() == 64);
    for (Complex z : loop) {
        CHECK(std::abs(polypuzzle::green_potential(field, z) - 1.0) < 1e-6);
    }
    // Winding number about the center of the filled set's bounding box.
    double winding = 0.0;
    for (size_t k = 0; k < loop.size(); ++k) {
        const Complex a = loop[k];
        const Complex c = loop[(k + 1) % loop.size()];
        winding += std::arg(c / a);
    }
    CHECK(std::lround(winding / kTau) == 1);

    CHECK_THROWS_AS(polypuzzle::trace_equipotential(field, 1.0, 3), polypuzzle::Error);
    CHECK_THROWS_AS(polypuzzle::trace_equipotential(field, 0.0, 64), polypuzzle::Error);
}
