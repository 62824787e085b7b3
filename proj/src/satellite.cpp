#include "polypuzzle/satellite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "polypuzzle/cycles.hpp"
#include "polypuzzle/errors.hpp"
#include "polypuzzle/geometry.hpp"
#include "polypuzzle/internal_graph.hpp"
#include "polypuzzle/root_finding.hpp"
#include "subdivision.hpp"

namespace polypuzzle {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(Complex z) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "(%.6g, %.6g)", z.real(), z.imag());
    return buf;
}

double wrap_pi(double a) {
    while (a > kPi) a -= 2.0 * kPi;
    while (a < -kPi) a += 2.0 * kPi;
    return a;
}

double frac(const Angle& a) {
    return static_cast<double>(a.numerator()) /
           static_cast<double>(a.denominator());
}

// Counterclockwise distance from angle u to angle v, in turns.
double ccw_gap(double u, double v) {
    double d = v - u;
    d -= std::floor(d);
    return d;
}

std::vector<Complex> iterate_preimages(const std::vector<Complex>& gcoeffs,
                                       Complex target) {
    std::vector<Complex> coeffs = gcoeffs;
    coeffs[0] -= target;
    return polynomial_roots(coeffs);
}

void push_pt(std::vector<Complex>& out, Complex p) {
    if (!out.empty() && std::abs(out.back() - p) < 1e-9) return;
    out.push_back(p);
}

template <typename It>
void push_range(std::vector<Complex>& out, It first, It last) {
    for (It it = first; it != last; ++it) push_pt(out, *it);
}

// Ray polyline strictly below the equipotential level, toward the landing.
void push_ray_down(std::vector<Complex>& out, const detail::DeepRay& dr,
                   double level) {
    for (size_t i = 0; i < dr.points.size(); ++i)
        if (dr.potentials[i] < level * (1.0 - 1e-12))
            push_pt(out, dr.points[i]);
}

// The same polyline away from the landing, up to the level.
void push_ray_up(std::vector<Complex>& out, const detail::DeepRay& dr,
                 double level) {
    for (int i = static_cast<int>(dr.points.size()) - 1; i >= 0; --i)
        if (dr.potentials[i] < level * (1.0 - 1e-12))
            push_pt(out, dr.points[i]);
}

// One pullback round of a closed curve around a component center, matching
// the internal graph conventions: index j of the result sits at conjugacy
// angle j / (count * k), and index 0 stays on the zero internal ray.
std::vector<Complex> lift_closed_curve(const Polynomial& poly, int p, int k,
                                       const std::vector<Complex>& gcoeffs,
                                       Complex center,
                                       const std::vector<Complex>& curve) {
    const int count = static_cast<int>(curve.size());
    const int next_count = count * k;
    std::vector<Complex> next(next_count);
    for (int j = 0; j < next_count; ++j) {
        const Complex target = curve[j % count];
        std::vector<Complex> roots = iterate_preimages(gcoeffs, target);
        Complex pred;
        if (j == 0) {
            double best = 1e18;
            for (const Complex& r : roots) {
                double dev = std::abs(
                    wrap_pi(std::arg((r - center) / (curve[0] - center))));
                if (dev < best) {
                    best = dev;
                    pred = r;
                }
            }
        } else {
            const Complex guess =
                center + (next[j - 1] - center) *
                             std::polar(1.0, 2.0 * kPi / next_count);
            double best = 1e18;
            for (const Complex& r : roots) {
                double dist = std::abs(r - guess);
                if (dist < best) {
                    best = dist;
                    pred = r;
                }
            }
        }
        detail::BranchSolve polish =
            detail::solve_iterate_preimage(poly, p, target, pred);
        next[j] = polish.ok ? polish.point : pred;
        if (std::abs(detail::iterate_with_derivative(poly, next[j], p).first -
                     target) > 1e-9 * (1.0 + std::abs(target)))
            throw NumericError("satellite circle lift failed at " +
                               fmt(target));
    }
    return next;
}

// Pull an internal arm back through the return map along the branch whose
// circle end is seed_start (a point of the lifted circle).
std::vector<Complex> lift_arm(const Polynomial& poly, int p,
                              const std::vector<Complex>& gcoeffs,
                              const std::vector<Complex>& arm,
                              Complex seed_start) {
    std::vector<Complex> x;
    x.push_back(seed_start);
    for (size_t t = 1; t < arm.size(); ++t) {
        const Complex target = arm[t];
        Complex dprev =
            detail::iterate_with_derivative(poly, x.back(), p).second;
        Complex pred = x.back();
        if (std::abs(dprev) > 1e-12) pred += (arm[t] - arm[t - 1]) / dprev;
        std::vector<Complex> roots = iterate_preimages(gcoeffs, target);
        Complex chosen;
        double best = 1e18;
        for (const Complex& r : roots) {
            double dist = std::abs(r - pred);
            if (dist < best) {
                best = dist;
                chosen = r;
            }
        }
        detail::BranchSolve polish =
            detail::solve_iterate_preimage(poly, p, target, chosen);
        if (polish.ok) chosen = polish.point;
        if (std::abs(detail::iterate_with_derivative(poly, chosen, p).first -
                     target) > 1e-9 * (1.0 + std::abs(target)))
            throw NumericError("satellite arm lift failed at " + fmt(target));
        x.push_back(chosen);
    }
    return x;
}

// The carved cut structure of one fixed Fatou component at the chosen base
// depth: the lifted circle, the two arms adjacent to the zero arm with
// their boundary pinch points, and the arcs of the circle between the
// crossings. Arm polylines run from the circle crossing to the pinch.
struct ComponentCut {
    InternalGraph ig;
    std::vector<Complex> arm_zero;   // circle crossing -> cut point
    std::vector<Complex> arm_in;     // internal angle +1/k^(b+1)
    std::vector<Complex> arm_out;    // internal angle -1/k^(b+1)
    std::vector<Complex> c_arc_in;   // crossing(+) -> crossing(0), cw
    std::vector<Complex> c_arc_out;  // crossing(0) -> crossing(-), cw
    Complex pinch_in{0.0, 0.0};
    Complex pinch_out{0.0, 0.0};
    std::vector<Angle> in_angles, out_angles;
    Angle ray_in{0, 1}, ray_out{0, 1};
    bool merged = false;  // depth 0, degree-two return map: one pinch only
    int gap = -1;
};

struct ClassMatch {
    Complex point;
    std::vector<Angle> angles;
};

// Snap an internally lifted boundary landing onto the matching external
// landing class; the two machineries must agree on pinch points.
ClassMatch match_pinch(const detail::Layer& lay, Complex w) {
    int best = -1;
    double bd = 1e18;
    for (size_t i = 0; i < lay.classes.size(); ++i) {
        double d = std::abs(lay.classes[i].point - w);
        if (d < bd) {
            bd = d;
            best = static_cast<int>(i);
        }
    }
    if (best < 0 || bd > 1e-5 * (1.0 + std::abs(w)))
        throw BuildError("internal and external subdivisions disagree at " +
                         fmt(w));
    return {lay.classes[best].point, lay.classes[best].angles};
}

}  // namespace

SatelliteNeighborhood satellite_neighborhood(const PuzzleGraph& graph,
                                             Complex z, int n) {
    if (!graph.cache) throw ConfigError("puzzle graph has no cache");
    if (n < 0 || n > 64)
        throw ConfigError("satellite depth must lie in [0, 64]");

    const FixedPointEntry* entry = nullptr;
    for (const FixedPointEntry& e : graph.fixed_point_set)
        if (std::abs(e.point - z) <= 1e-8) {
            entry = &e;
            break;
        }
    if (!entry)
        throw Error("satellite neighborhood needs a marked cut point, got " +
                    fmt(z));
    const Complex z0 = entry->point;
    const int q = static_cast<int>(entry->angles.size());
    const int m = graph.iterate_power;
    const PuzzleCache& cache = *graph.cache;
    const Polynomial& poly = cache.poly();

    const Complex lam = detail::iterate_with_derivative(poly, z0, m).second;
    if (std::abs(lam) <= 1.0)
        throw BuildError("marked point " + fmt(z0) +
                         " is not repelling under the return map");

    if (m > 8)
        throw ConfigError(
            "satellite construction supports iterate power at most 8");

    // The cut system inside the bounded components: one superattracting
    // cycle whose components all anchor their zero arms at the cut point.
    const std::vector<Cycle> cycles = find_cycles(poly, m);
    const Cycle* sup = nullptr;
    for (const Cycle& c : cycles) {
        if (c.type != CycleType::Superattracting) continue;
        if (m % c.period != 0) continue;
        if (c.period != m)
            throw BuildError(
                "satellite construction needs the superattracting period to "
                "equal the iterate power, got period " +
                std::to_string(c.period));
        if (sup)
            throw BuildError(
                "satellite construction supports one superattracting cycle, "
                "found several");
        sup = &c;
    }
    if (!sup)
        throw BuildError(
            "satellite construction needs a superattracting cycle anchored "
            "at the cut point");
    if (static_cast<int>(sup->points.size()) != q)
        throw BuildError("satellite needs one fixed component per cut "
                         "sector, got " +
                         std::to_string(sup->points.size()) +
                         " components for " + std::to_string(q) + " sectors");

    const int b = std::min(n, 1);
    const int fdepth = b * m;
    const double level_b =
        cache.base_level() / std::pow(static_cast<double>(poly.degree()),
                                      static_cast<double>(fdepth));
    const detail::Layer& lay = cache.layer((b + 1) * m);
    const std::vector<Complex> gcoeffs = detail::iterate_coefficients(poly, m);

    std::vector<ComponentCut> comps(q);
    for (int i = 0; i < q; ++i) {
        ComponentCut& c = comps[i];
        c.ig = build_internal_graph(poly, *sup, i);
        if (std::abs(c.ig.landings[0] - z0) > 1e-8)
            throw BuildError(
                "satellite needs every fixed component anchored at the cut "
                "point; component at " +
                fmt(c.ig.center) + " lands at " + fmt(c.ig.landings[0]));
        const int k = c.ig.return_degree;

        std::vector<Complex> curve = c.ig.circle;
        std::vector<Complex> arm_in = c.ig.arms[1];
        std::vector<Complex> arm_out = c.ig.arms[k - 1];
        if (b >= 1) {
            curve = lift_closed_curve(poly, m, k, gcoeffs, c.ig.center,
                                      c.ig.circle);
            const int o = static_cast<int>(c.ig.circle.size()) / k;
            arm_in = lift_arm(poly, m, gcoeffs, c.ig.arms[1], curve[o]);
            arm_out = lift_arm(poly, m, gcoeffs, c.ig.arms[k - 1],
                               curve[curve.size() - o]);
        }
        c.merged = (b == 0 && k == 2);

        ClassMatch in = match_pinch(lay, arm_in.back());
        ClassMatch outm = match_pinch(lay, arm_out.back());
        arm_in.back() = in.point;
        arm_out.back() = outm.point;
        c.pinch_in = in.point;
        c.pinch_out = outm.point;
        c.in_angles = in.angles;
        c.out_angles = outm.angles;
        c.arm_in = std::move(arm_in);
        c.arm_out = std::move(arm_out);

        // The zero arm's pullback tail sits on the lifted circle depth by
        // depth, so the part outside the depth-b circle is a suffix.
        if (static_cast<int>(c.ig.arms[0].size()) <= b + 1)
            throw NumericError("satellite zero arm too short at " +
                               fmt(c.ig.center));
        c.arm_zero.assign(c.ig.arms[0].begin() + b, c.ig.arms[0].end());
        c.arm_zero.back() = z0;

        // Crossing offset: curve index of conjugacy angle 1/k^(b+1) is the
        // same count/k at both base depths since the lift multiplies the
        // point count by k.
        const int count_c = static_cast<int>(curve.size());
        const int off = static_cast<int>(c.ig.circle.size()) / k;
        for (int j = off; j >= 0; --j) c.c_arc_in.push_back(curve[j]);
        c.c_arc_out.push_back(curve[0]);
        for (int j = count_c - 1; j >= count_c - off; --j)
            c.c_arc_out.push_back(curve[j]);
    }

    // Slot each component into its angular gap between consecutive rays at
    // the cut point, then orient its boundary rays toward the gap ends.
    const std::vector<Angle>& thetas = entry->angles;
    std::vector<int> gap_owner(q, -1);
    for (int i = 0; i < q; ++i) {
        ComponentCut& c = comps[i];
        for (int gidx = 0; gidx < q; ++gidx) {
            const double t0 = frac(thetas[gidx]);
            const double t1 = frac(thetas[(gidx + 1) % q]);
            const double len = ccw_gap(t0, t1);
            bool all = true;
            for (const Angle& a : c.in_angles)
                if (ccw_gap(t0, frac(a)) >= len) all = false;
            for (const Angle& a : c.out_angles)
                if (ccw_gap(t0, frac(a)) >= len) all = false;
            if (all) {
                c.gap = gidx;
                break;
            }
        }
        if (c.gap < 0)
            throw BuildError("satellite component at " + fmt(c.ig.center) +
                             " does not fit a cut sector");
        if (gap_owner[c.gap] >= 0)
            throw BuildError(
                "satellite components do not separate the cut sectors");
        gap_owner[c.gap] = i;

        const double t0 = frac(thetas[c.gap]);
        const double t1 = frac(thetas[(c.gap + 1) % q]);
        double best = 1e18;
        for (const Angle& a : c.in_angles) {
            double d = ccw_gap(t0, frac(a));
            if (d < best) {
                best = d;
                c.ray_in = a;
            }
        }
        best = 1e18;
        for (const Angle& a : c.out_angles) {
            double d = ccw_gap(frac(a), t1);
            if (d < best) {
                best = d;
                c.ray_out = a;
            }
        }
    }
    std::vector<ComponentCut> ordered;
    ordered.reserve(q);
    for (int gidx = 0; gidx < q; ++gidx)
        ordered.push_back(std::move(comps[gap_owner[gidx]]));

    SatelliteNeighborhood out;
    out.point = z0;
    out.depth = n;

    // Union boundary, ccw: descend the ray into each component's entry
    // pinch, cross the component between the adjacent arms along the carved
    // circle, ascend from the exit pinch, and bridge to the next component
    // along the equipotential.
    std::vector<Complex> uni;
    for (int i = 0; i < q; ++i) {
        const ComponentCut& c = ordered[i];
        const ComponentCut& nx = ordered[(i + 1) % q];
        push_pt(uni, cache.corner_point(c.ray_in, fdepth));
        push_ray_down(uni, cache.deep_ray(c.ray_in), level_b);
        push_pt(uni, c.pinch_in);
        if (!c.merged) {
            push_range(uni, c.arm_in.rbegin(), c.arm_in.rend());
            push_range(uni, c.c_arc_in.begin(), c.c_arc_in.end());
            push_range(uni, c.c_arc_out.begin(), c.c_arc_out.end());
            push_range(uni, c.arm_out.begin(), c.arm_out.end());
        }
        push_ray_up(uni, cache.deep_ray(c.ray_out), level_b);
        for (const Complex& pt :
             cache.arc_points(c.ray_out, nx.ray_in, fdepth))
            push_pt(uni, pt);
    }
    if (uni.size() > 1 && std::abs(uni.back() - uni.front()) < 1e-9)
        uni.pop_back();
    out.union_polygon = std::move(uni);
    if (locate_in_polygon(out.union_polygon, z0, 1e-9) !=
        PointLocation::Inside)
        throw BuildError("satellite region does not surround " + fmt(z0));

    // The 2q sector pieces: per gap, the piece against the entry ray and
    // the piece against the exit ray, split along the zero arm.
    for (int i = 0; i < q; ++i) {
        const ComponentCut& c = ordered[i];
        std::vector<Complex> pa;
        push_pt(pa, z0);
        push_ray_up(pa, cache.deep_ray(thetas[i]), level_b);
        for (const Complex& pt :
             cache.arc_points(thetas[i], c.ray_in, fdepth))
            push_pt(pa, pt);
        push_ray_down(pa, cache.deep_ray(c.ray_in), level_b);
        push_pt(pa, c.pinch_in);
        push_range(pa, c.arm_in.rbegin(), c.arm_in.rend());
        push_range(pa, c.c_arc_in.begin(), c.c_arc_in.end());
        push_range(pa, c.arm_zero.begin(), c.arm_zero.end());
        if (pa.size() > 1 && std::abs(pa.back() - pa.front()) < 1e-9)
            pa.pop_back();
        out.piece_polygons.push_back(std::move(pa));

        std::vector<Complex> pb;
        push_range(pb, c.arm_zero.rbegin(), c.arm_zero.rend());
        push_range(pb, c.c_arc_out.begin(), c.c_arc_out.end());
        push_range(pb, c.arm_out.begin(), c.arm_out.end());
        push_ray_up(pb, cache.deep_ray(c.ray_out), level_b);
        for (const Complex& pt :
             cache.arc_points(c.ray_out, thetas[(i + 1) % q], fdepth))
            push_pt(pb, pt);
        push_ray_down(pb, cache.deep_ray(thetas[(i + 1) % q]), level_b);
        if (pb.size() > 1 && std::abs(pb.back() - pb.front()) < 1e-9)
            pb.pop_back();
        out.piece_polygons.push_back(std::move(pb));
    }

    // Deeper levels: lift through the inverse branch of the return map
    // fixing the marked point. Degree one on the region is certified by
    // keeping every critical value of the iterate outside it.
    if (n > b) {
        std::vector<Complex> dcoeffs;
        for (size_t i = 1; i < gcoeffs.size(); ++i)
            dcoeffs.push_back(gcoeffs[i] * static_cast<double>(i));
        std::vector<Complex> crit_values;
        for (const Complex& r : polynomial_roots(dcoeffs))
            crit_values.push_back(
                detail::iterate_with_derivative(poly, r, m).first);

        auto lift_polygon = [&](const std::vector<Complex>& pts) {
            std::vector<Complex> lifted;
            lifted.reserve(pts.size());
            for (size_t i = 0; i < pts.size(); ++i) {
                const Complex w = pts[i];
                Complex seed;
                if (i == 0) {
                    seed = z0 + (w - z0) / lam;
                } else {
                    Complex dprev =
                        detail::iterate_with_derivative(poly, lifted.back(), m)
                            .second;
                    if (std::abs(dprev) < 1e-12) dprev = lam;
                    seed = lifted.back() + (w - pts[i - 1]) / dprev;
                }
                detail::BranchSolve s =
                    detail::solve_iterate_preimage(poly, m, w, seed);
                if (!s.ok) {
                    // Fall back to the nearest explicit preimage.
                    std::vector<Complex> coeffs = gcoeffs;
                    coeffs[0] -= w;
                    double best = 1e18;
                    for (const Complex& r : polynomial_roots(coeffs)) {
                        double dist = std::abs(r - seed);
                        if (dist < best) {
                            best = dist;
                            s = {r, true};
                        }
                    }
                    Complex v = detail::iterate_with_derivative(
                                    poly, s.point, m)
                                    .first;
                    if (!s.ok ||
                        std::abs(v - w) > 1e-8 * (1.0 + std::abs(w)))
                        throw BuildError("satellite lift failed at " + fmt(w));
                }
                lifted.push_back(s.point);
            }
            // Closing the loop must return to the first lifted point.
            Complex dlast =
                detail::iterate_with_derivative(poly, lifted.back(), m).second;
            if (std::abs(dlast) < 1e-12) dlast = lam;
            Complex close_seed =
                lifted.back() + (pts.front() - pts.back()) / dlast;
            detail::BranchSolve close =
                detail::solve_iterate_preimage(poly, m, pts.front(),
                                               close_seed);
            if (!close.ok ||
                std::abs(close.point - lifted.front()) >
                    1e-6 * (1.0 + std::abs(lifted.front())))
                throw BuildError("satellite lift crossed branches near " +
                                 fmt(pts.front()));
            return lifted;
        };

        for (int level = b + 1; level <= n; ++level) {
            for (const Complex& v : crit_values)
                if (locate_in_polygon(out.union_polygon, v, 1e-9) ==
                    PointLocation::Inside)
                    throw BuildError(
                        "satellite lift obstructed by a critical value at " +
                        fmt(v));
            for (std::vector<Complex>& poly_pts : out.piece_polygons)
                poly_pts = lift_polygon(poly_pts);
            out.union_polygon = lift_polygon(out.union_polygon);
            if (locate_in_polygon(out.union_polygon, z0, 1e-9) !=
                PointLocation::Inside)
                throw BuildError("satellite lift lost the marked point " +
                                 fmt(z0));
        }
    }

    out.diameter = max_pairwise_distance(out.union_polygon);
    return out;
}

}  // namespace polypuzzle
