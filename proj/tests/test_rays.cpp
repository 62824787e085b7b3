#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "polypuzzle/angle.hpp"
#include "polypuzzle/errors.hpp"
#include "polypuzzle/potential.hpp"
#include "polypuzzle/ray.hpp"

using polypuzzle::Angle;
using polypuzzle::AngleOrbit;
using polypuzzle::Complex;
using polypuzzle::ExternalRay;
using polypuzzle::Polynomial;
using polypuzzle::PotentialField;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

Complex alpha_fixed_point(Complex c) {
    // Fixed points of z^2 + c are (1 +- sqrt(1 - 4c)) / 2; alpha takes the
    // minus branch.
    return (Complex{1.0, 0.0} - std::sqrt(Complex{1.0, 0.0} - 4.0 * c)) / 2.0;
}

}  // namespace

TEST_CASE("exact angle arithmetic") {
    CHECK(Angle(1, 3).str() == "1/3");
    CHECK(Angle::parse("3/6") == Angle(1, 2));
    CHECK(Angle::parse("7/4") == Angle(3, 4));
    CHECK(Angle::parse("2") == Angle(0, 1));
    CHECK(Angle(1, 3).map_forward(2) == Angle(2, 3));
    CHECK(Angle(2, 3).map_forward(2) == Angle(1, 3));
    CHECK(Angle(1, 2).value() == 0.5);
    CHECK_THROWS_AS(Angle::parse("1/0"), polypuzzle::Error);
    CHECK_THROWS_AS(Angle::parse("x"), polypuzzle::Error);

    // Multiply-by-d after the matching preimage branch is the identity.
    const Angle theta(5, 7);
    for (int d = 2; d <= 4; ++d) {
        const std::vector<Angle> pre = theta.preimages(d);
        REQUIRE(static_cast<int>(pre.size()) == d);
        for (const Angle& p : pre) CHECK(p.map_forward(d) == theta);
        for (size_t i = 1; i < pre.size(); ++i) CHECK(pre[i - 1] < pre[i]);
    }
}

TEST_CASE("angle denominators are capped at d^32") {
    Angle a(1, 3);
    auto deepen = [&a] {
        for (int k = 0; k < 40; ++k) a = a.preimage(2, 0);
    };
    CHECK_THROWS_AS(deepen(), polypuzzle::Error);
}

TEST_CASE("ccw arc membership") {
    CHECK(polypuzzle::in_ccw_arc(Angle(1, 2), Angle(1, 3), Angle(2, 3)));
    CHECK(!polypuzzle::in_ccw_arc(Angle(0, 1), Angle(1, 3), Angle(2, 3)));
    // Arc wrapping through zero.
    CHECK(polypuzzle::in_ccw_arc(Angle(0, 1), Angle(2, 3), Angle(1, 3)));
    CHECK(polypuzzle::in_ccw_arc(Angle(5, 6), Angle(2, 3), Angle(1, 3)));
    CHECK(!polypuzzle::in_ccw_arc(Angle(1, 2), Angle(2, 3), Angle(1, 3)));
    CHECK(!polypuzzle::in_ccw_arc(Angle(1, 3), Angle(1, 3), Angle(2, 3)));
}

TEST_CASE("angle orbit reports") {
    const AngleOrbit third = polypuzzle::angle_orbit(Angle(1, 3), 2);
    CHECK(third.preperiod == 0);
    CHECK(third.period == 2);
    REQUIRE(third.orbit.size() == 2);
    CHECK(third.orbit[0] == Angle(1, 3));
    CHECK(third.orbit[1] == Angle(2, 3));

    const AngleOrbit seventh = polypuzzle::angle_orbit(Angle(1, 7), 2);
    CHECK(seventh.preperiod == 0);
    CHECK(seventh.period == 3);
    REQUIRE(seventh.orbit.size() == 3);
    CHECK(seventh.orbit[2] == Angle(4, 7));

    const AngleOrbit half = polypuzzle::angle_orbit(Angle(1, 2), 2);
    CHECK(half.preperiod == 1);
    CHECK(half.period == 1);
    REQUIRE(half.orbit.size() == 2);
    CHECK(half.orbit[1] == Angle(0, 1));

    const AngleOrbit sixth = polypuzzle::angle_orbit(Angle(1, 6), 2);
    CHECK(sixth.preperiod == 1);
    CHECK(sixth.period == 2);
}

TEST_CASE("rays of the squaring map are radial") {
    const Polynomial sq = fixtures::squaring();
    const PotentialField field = PotentialField::make(sq);
    const ExternalRay ray = polypuzzle::trace_external_ray(field, Angle(0, 1), 1e-4);
    REQUIRE(!ray.stalled);
    REQUIRE(ray.points.size() >= 2);
    for (size_t k = 0; k < ray.points.size(); ++k) {
        CHECK(std::abs(ray.points[k].imag()) < 1e-9 * (1.0 + std::abs(ray.points[k].real())));
        CHECK(ray.points[k].real() > 0.0);
        // G = log|z| for z^2: each vertex sits at its target potential.
        CHECK(std::abs(std::log(std::abs(ray.points[k])) - ray.potentials[k]) < 1e-8);
        if (k > 0) CHECK(ray.potentials[k] < ray.potentials[k - 1]);
    }
    CHECK(std::abs(ray.points.back() - Complex{std::exp(1e-4), 0.0}) < 1e-6);
}

TEST_CASE("vertex potentials match targets on the basilica") {
    const Polynomial b = fixtures::basilica();
    const PotentialField field = PotentialField::make(b);
    const ExternalRay ray = polypuzzle::trace_external_ray(field, Angle(1, 3), 1e-6);
    REQUIRE(!ray.stalled);
    for (size_t k = 0; k < ray.points.size(); k += 16) {
        CHECK(std::abs(polypuzzle::green_potential(field, ray.points[k]) - ray.potentials[k]) <
              1e-8);
    }
    CHECK(ray.potentials.back() == doctest::Approx(1e-6));
}

TEST_CASE("ray vertices carry their own angle") {
    const Polynomial b = fixtures::basilica();
    const PotentialField field = PotentialField::make(b);
    const ExternalRay ray = polypuzzle::trace_external_ray(field, Angle(1, 3), 0.1);
    REQUIRE(!ray.stalled);
    const Complex deep = ray.points.back();
    CHECK(std::abs(polypuzzle::external_argument(field, deep) - 1.0 / 3.0) < 1e-6);

    // Pushforward: f maps the theta ray into the 2*theta ray at doubled
    // potential.
    const Complex image = b(deep);
    CHECK(std::abs(polypuzzle::external_argument(field, image) - 2.0 / 3.0) < 1e-6);
    CHECK(std::abs(polypuzzle::green_potential(field, image) - 0.2) < 1e-8);
}

TEST_CASE("deep vertices keep their angle through the fallback") {
    const Polynomial r = fixtures::rabbit();
    const PotentialField field = PotentialField::make(r);
    for (const Angle& a : {Angle(1, 7), Angle(4, 7)}) {
        const ExternalRay ray = polypuzzle::trace_external_ray(field, a, 1e-5);
        REQUIRE(!ray.stalled);
        const double measured = polypuzzle::external_argument(field, ray.points.back());
        const double diff = std::abs(measured - a.value());
        CHECK(std::min(diff, 1.0 - diff) < 1e-6);
    }
}

TEST_CASE("landing the fixed rays") {
    const Polynomial sq = fixtures::squaring();
    const PotentialField sf = PotentialField::make(sq);
    ExternalRay zero = polypuzzle::trace_external_ray(sf, Angle(0, 1), 1e-6);
    const polypuzzle::LandingResult one = polypuzzle::land_periodic_ray(sf, zero);
    CHECK(std::abs(one.point - Complex{1.0, 0.0}) < 1e-10);
    CHECK(one.exact_period == 1);
    CHECK(zero.landing.has_value());
    CHECK(zero.landing_refined);

    const Polynomial b = fixtures::basilica();
    const PotentialField bf = PotentialField::make(b);
    ExternalRay beta_ray = polypuzzle::trace_external_ray(bf, Angle(0, 1), 1e-6);
    const polypuzzle::LandingResult beta = polypuzzle::land_periodic_ray(bf, beta_ray);
    CHECK(std::abs(beta.point - Complex{(1.0 + std::sqrt(5.0)) / 2.0, 0.0}) < 1e-10);

    ExternalRay alpha_ray = polypuzzle::trace_external_ray(bf, Angle(1, 3), 1e-6);
    const polypuzzle::LandingResult alpha = polypuzzle::land_periodic_ray(bf, alpha_ray);
    CHECK(std::abs(alpha.point - Complex{(1.0 - std::sqrt(5.0)) / 2.0, 0.0}) < 1e-10);
    CHECK(alpha.exact_period == 1);
    CHECK(alpha.type == polypuzzle::CycleType::Repelling);
}

TEST_CASE("landing periods divide the angle period") {
    const Polynomial sq = fixtures::squaring();
    const PotentialField sf = PotentialField::make(sq);
    ExternalRay third = polypuzzle::trace_external_ray(sf, Angle(1, 3), 1e-6);
    const polypuzzle::LandingResult lr = polypuzzle::land_periodic_ray(sf, third);
    CHECK(lr.exact_period == 2);
    CHECK(std::abs(lr.point - std::exp(Complex{0.0, kTau / 3.0})) < 1e-10);

    const Polynomial r = fixtures::rabbit();
    const PotentialField rf = PotentialField::make(r);
    ExternalRay seventh = polypuzzle::trace_external_ray(rf, Angle(1, 7), 1e-6);
    const polypuzzle::LandingResult rl = polypuzzle::land_periodic_ray(rf, seventh);
    CHECK(rl.exact_period == 1);
    CHECK(std::abs(rl.point - alpha_fixed_point(fixtures::rabbit_c())) < 1e-10);
    CHECK(std::abs(rl.multiplier.imag()) > 0.1);  // alpha has non-real multiplier
}

TEST_CASE("landing refuses preperiodic angles") {
    const Polynomial b = fixtures::basilica();
    const PotentialField field = PotentialField::make(b);
    ExternalRay ray = polypuzzle::trace_external_ray(field, Angle(1, 6), 1e-5);
    CHECK_THROWS_AS(polypuzzle::land_periodic_ray(field, ray), polypuzzle::Error);
}

TEST_CASE("fixed point portraits") {
    const Polynomial sq = fixtures::squaring();
    const polypuzzle::RayPortrait sp =
        polypuzzle::fixed_point_ray_portrait(PotentialField::make(sq));
    REQUIRE(sp.groups.size() == 1);
    CHECK(std::abs(sp.groups[0].fixed_point - Complex{1.0, 0.0}) < 1e-8);
    REQUIRE(sp.groups[0].angles.size() == 1);
    CHECK(sp.groups[0].angles[0] == Angle(0, 1));
    CHECK(!sp.groups[0].biaccessible);
    CHECK(sp.stalled.empty());

    const Polynomial b = fixtures::basilica();
    const polypuzzle::RayPortrait bp =
        polypuzzle::fixed_point_ray_portrait(PotentialField::make(b));
    REQUIRE(bp.groups.size() == 2);
    // Sorted by fixed point: alpha < beta on the real axis.
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    CHECK(std::abs(bp.groups[0].fixed_point - Complex{1.0 - phi, 0.0}) < 1e-8);
    REQUIRE(bp.groups[0].angles.size() == 2);
    CHECK(bp.groups[0].angles[0] == Angle(1, 3));
    CHECK(bp.groups[0].angles[1] == Angle(2, 3));
    CHECK(bp.groups[0].biaccessible);
    CHECK(std::abs(bp.groups[1].fixed_point - Complex{phi, 0.0}) < 1e-8);
    REQUIRE(bp.groups[1].angles.size() == 1);
    CHECK(!bp.groups[1].biaccessible);

    const Polynomial r = fixtures::rabbit();
    const polypuzzle::RayPortrait rp =
        polypuzzle::fixed_point_ray_portrait(PotentialField::make(r));
    REQUIRE(rp.groups.size() == 2);
    const Complex alpha = alpha_fixed_point(fixtures::rabbit_c());
    bool saw_alpha = false;
    for (const auto& g : rp.groups) {
        if (std::abs(g.fixed_point - alpha) < 1e-8) {
            saw_alpha = true;
            REQUIRE(g.angles.size() == 3);
            CHECK(g.angles[0] == Angle(1, 7));
            CHECK(g.angles[1] == Angle(2, 7));
            CHECK(g.angles[2] == Angle(4, 7));
            CHECK(g.biaccessible);
        } else {
            CHECK(g.angles.size() == 1);
            CHECK(g.angles[0] == Angle(0, 1));
        }
    }
    CHECK(saw_alpha);
}

TEST_CASE("portrait requires a connected Julia set") {
    const Polynomial c = fixtures::cubic();
    try {
        polypuzzle::fixed_point_ray_portrait(PotentialField::make(c));
        FAIL("expected BuildError");
    } catch (const polypuzzle::BuildError& e) {
        CHECK(std::string(e.what()).find("connected") != std::string::npos);
    }
}
