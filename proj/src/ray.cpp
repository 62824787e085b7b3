#include "polypuzzle/ray.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "ladder.hpp"
#include "polypuzzle/errors.hpp"
#include "polypuzzle/root_finding.hpp"

namespace polypuzzle {

namespace {

// Geometric extrapolation of the ray tail: for vertices approaching a
// repelling point the offsets shrink by a stable complex ratio, so the tail
// sums like a geometric series. The last rung may be clamped to t_min and
// breaks the ratio structure, so extrapolate from full rungs only.
Complex extrapolate_tail(const std::vector<Complex>& pts, const std::vector<double>& pots) {
    const size_t n = pts.size();
    if (n < 3) return pts.back();
    size_t idx = n - 1;
    if (n >= 4 && pots[n - 1] / pots[n - 2] > 0.93) idx = n - 2;
    if (idx < 2) return pts.back();
    const Complex d1 = pts[idx] - pts[idx - 1];
    const Complex d0 = pts[idx - 1] - pts[idx - 2];
    if (std::abs(d0) < 1e-300) return pts.back();
    const Complex r = d1 / d0;
    if (std::abs(r) > 0.995) return pts.back();
    return pts[idx] + d1 * r / (Complex{1.0, 0.0} - r);
}

}  // namespace

ExternalRay trace_external_ray(const PotentialField& field, const Angle& angle, double t_min) {
    if (!(t_min >= 1e-9)) throw Error("ray t_min must be at least 1e-9");
    const Polynomial& f = *field.poly;
    const int d = f.degree();

    // Exact forward angles per lift depth, extended lazily.
    std::vector<Angle> forward{angle};
    const auto angle_at = [&forward, d](int m) {
        while (static_cast<int>(forward.size()) <= m) {
            forward.push_back(forward.back().map_forward(d));
        }
        return forward[static_cast<size_t>(m)].value();
    };

    ExternalRay ray;
    ray.angle = angle;
    const auto emit = [&ray](Complex z, double t) {
        ray.points.push_back(z);
        ray.potentials.push_back(t);
    };
    const detail::DescentResult r = detail::descend_ray(f, angle_at, t_min, emit);
    ray.stalled = r.stalled;
    if (r.stalled) ray.stalled_at = r.potential;
    return ray;
}

LandingResult land_periodic_ray(const PotentialField& field, ExternalRay& ray,
                                const std::vector<Cycle>* match_cycles) {
    const Polynomial& f = *field.poly;
    const AngleOrbit orbit = angle_orbit(ray.angle, f.degree());
    if (orbit.preperiod != 0) {
        throw Error("landing requires a periodic angle; " + ray.angle.str() +
                    " has preperiod " + std::to_string(orbit.preperiod));
    }
    if (ray.stalled) throw BuildError("cannot land a stalled ray at angle " + ray.angle.str());
    if (ray.points.empty()) throw Error("cannot land an empty ray");
    const int p = orbit.period;

    const Complex seed = extrapolate_tail(ray.points, ray.potentials);
    Complex z = seed;
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
        Complex v = z;
        Complex dv{1.0, 0.0};
        for (int k = 0; k < p; ++k) {
            dv *= f.derivative(v);
            v = f(v);
        }
        if (!is_finite(v) || !is_finite(dv)) break;
        const Complex err = v - z;
        if (std::abs(err) < 1e-10) {
            converged = true;
            break;
        }
        const Complex denom = dv - Complex{1.0, 0.0};
        if (std::abs(denom) < 1e-300) break;
        const Complex step = err / denom;
        if (!is_finite(z - step)) break;
        z -= step;
    }
    if (!converged) {
        throw NumericError("landing refinement did not converge for angle " + ray.angle.str());
    }

    // Exact period of the landed point divides the angle period.
    int exact = p;
    for (int q = 1; q < p; ++q) {
        if (p % q != 0) continue;
        Complex v = z;
        for (int k = 0; k < q; ++k) v = f(v);
        if (std::abs(v - z) < 1e-9) {
            exact = q;
            break;
        }
    }
    Complex lambda{1.0, 0.0};
    {
        Complex v = z;
        for (int k = 0; k < exact; ++k) {
            lambda *= f.derivative(v);
            v = f(v);
        }
    }
    const MultiplierClass cls = classify_multiplier(lambda);
    if (cls.type == CycleType::Attracting || cls.type == CycleType::Superattracting) {
        throw BuildError("landing mismatch: ray " + ray.angle.str() +
                         " refined into an attracting cycle");
    }

    // Certify the landing dynamically: the ray approaches its landing point
    // like t^beta with beta = log|lambda| / (q log d), so deepening the ray
    // by a factor of 64 in potential must contract the distance accordingly.
    // A Newton escape into a distant periodic point shows no contraction.
    const double t_deep = ray.potentials.back();
    const double t_cert = std::max(1e-9, t_deep / 64.0);
    if (t_cert < 0.5 * t_deep) {
        const ExternalRay deeper = trace_external_ray(field, ray.angle, t_cert);
        if (!deeper.stalled) {
            const double beta = std::log(std::max(std::abs(lambda), 1.0 + 1e-12)) /
                                (exact * std::log(static_cast<double>(f.degree())));
            const double before = std::abs(ray.points.back() - z);
            const double after = std::abs(deeper.points.back() - z);
            const double expected = std::pow(t_cert / t_deep, beta);
            if (after > 1e-6 && after > 3.0 * expected * before) {
                throw BuildError("landing mismatch: refinement of ray " + ray.angle.str() +
                                 " is not the ray limit");
            }
        }
    }

    LandingResult result;
    result.point = z;
    result.exact_period = exact;
    result.multiplier = lambda;
    result.type = cls.type;
    if (match_cycles) {
        for (size_t i = 0; i < match_cycles->size(); ++i) {
            for (Complex pt : (*match_cycles)[i].points) {
                if (std::abs(pt - z) < 1e-6) {
                    result.cycle_index = static_cast<int>(i);
                    break;
                }
            }
            if (result.cycle_index >= 0) break;
        }
    }
    ray.landing = z;
    ray.landing_refined = true;
    return result;
}

RayPortrait fixed_point_ray_portrait(const PotentialField& field, int max_denominator) {
    if (max_denominator < 3) throw Error("portrait needs max_denominator >= 3");
    const Polynomial& f = *field.poly;
    const int d = f.degree();

    for (Complex crit : critical_points(f)) {
        if (f.iterate(crit, field.iter_budget).escaped) {
            throw BuildError("portrait requires connected Julia set");
        }
    }

    // Fixed points of f as the anchor cycles.
    const std::vector<Cycle> fixed = find_cycles(f, 1);

    constexpr int kPeriodCap = 8;
    RayPortrait portrait;
    std::map<size_t, std::vector<Angle>> groups;  // fixed-cycle index -> angles

    for (int q = 1; q <= max_denominator; ++q) {
        if (std::gcd(q, d) != 1) continue;  // preperiodic angles never land at fixed points
        for (int j = q == 1 ? 0 : 1; j < q; ++j) {
            if (std::gcd(j, q) != 1 && !(j == 0 && q == 1)) continue;
            const Angle angle(static_cast<unsigned long long>(j),
                              static_cast<unsigned long long>(q));
            const AngleOrbit orbit = angle_orbit(angle, d);
            if (orbit.preperiod != 0 || orbit.period > kPeriodCap) continue;

            ExternalRay ray = trace_external_ray(field, angle);
            if (ray.stalled) {
                portrait.stalled.push_back(angle);
                continue;
            }
            LandingResult landing;
            try {
                landing = land_periodic_ray(field, ray, &fixed);
            } catch (const Error&) {
                portrait.stalled.push_back(angle);
                continue;
            }
            if (landing.exact_period != 1 || landing.cycle_index < 0) continue;
            groups[static_cast<size_t>(landing.cycle_index)].push_back(angle);
        }
    }

    for (auto& [index, angles] : groups) {
        RayPortrait::Group g;
        g.fixed_point = fixed[index].points.front();
        std::sort(angles.begin(), angles.end());
        g.angles = angles;
        g.biaccessible = angles.size() >= 2;
        portrait.groups.push_back(std::move(g));
    }
    std::sort(portrait.groups.begin(), portrait.groups.end(),
              [](const RayPortrait::Group& a, const RayPortrait::Group& b) {
                  if (a.fixed_point.real() != b.fixed_point.real()) {
                      return a.fixed_point.real() < b.fixed_point.real();
                  }
                  return a.fixed_point.imag() < b.fixed_point.imag();
              });
    return portrait;
}

}  // namespace polypuzzle
