#include "polypuzzle/pieces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "polypuzzle/errors.hpp"
#include "polypuzzle/geometry.hpp"
#include "polypuzzle/ray.hpp"
#include "polypuzzle/root_finding.hpp"
#include "subdivision.hpp"

namespace polypuzzle {

namespace {

// Tracer floor: rays are traced to this potential once and cached; below it
// the polyline continues by inverse iterate steps anchored at the landing.
constexpr double kTraceFloor = 1e-9;
// Inverse-step tails stop once within this distance of the landing point.
constexpr double kTailEps = 2e-4;
// Equipotential arcs are sampled at this density per full turn, clamped.
constexpr int kArcDensity = 512;
constexpr int kArcCap = 128;
// A preimage root within this distance of an existing landing point is the
// same point persisting to the next layer.
constexpr double kPersistTol = 1e-9;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt(Complex z) {
    return "(" + fmt(z.real()) + ", " + fmt(z.imag()) + ")";
}

void index_layer(detail::Layer& layer) {
    std::vector<std::pair<Angle, int>> all;
    for (size_t i = 0; i < layer.classes.size(); ++i)
        for (const Angle& a : layer.classes[i].angles)
            all.emplace_back(a, static_cast<int>(i));
    std::sort(all.begin(), all.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    layer.angles.clear();
    layer.angle_class.clear();
    for (size_t i = 0; i < all.size(); ++i) {
        if (i > 0 && all[i].first == all[i - 1].first)
            throw BuildError("duplicate ray angle " + all[i].first.str() +
                             " at depth " + std::to_string(layer.depth));
        layer.angles.push_back(all[i].first);
        layer.angle_class.push_back(all[i].second);
    }
}

// Point on the traced ray at potential at most t, or nullptr.
const Complex* ray_point_at(const ExternalRay& ray, double t) {
    for (size_t i = 0; i < ray.points.size(); ++i)
        if (ray.potentials[i] <= t) return &ray.points[i];
    return nullptr;
}

// Exact interior sample angles of the counterclockwise arc from a to b.
std::vector<Angle> arc_samples(const Angle& a, const Angle& b) {
    BigRat av(a.numerator(), a.denominator());
    BigRat bv(b.numerator(), b.denominator());
    BigRat gap = bv - av;
    if (gap <= 0) gap += 1;
    double g = gap.convert_to<double>();
    int steps = std::max(
        2, std::min(kArcCap, static_cast<int>(std::ceil(g * kArcDensity))));
    std::vector<Angle> out;
    BigInt cap = BigInt(1) << 62;
    for (int j = 1; j < steps; ++j) {
        BigRat s = av + gap * j / steps;
        if (s >= 1) s -= 1;
        BigInt num = boost::multiprecision::numerator(s);
        BigInt den = boost::multiprecision::denominator(s);
        if (den >= cap || num < 0) throw NumericError("arc sample angle overflow");
        out.push_back(Angle(num.convert_to<unsigned long long>(),
                            den.convert_to<unsigned long long>()));
    }
    return out;
}

}  // namespace

namespace detail {

std::pair<Complex, Complex> iterate_with_derivative(const Polynomial& poly,
                                                    Complex z, int m) {
    Complex v = z;
    Complex dv{1.0, 0.0};
    for (int i = 0; i < m; ++i) {
        dv = poly.derivative(v) * dv;
        v = poly(v);
    }
    return {v, dv};
}

std::vector<Complex> iterate_coefficients(const Polynomial& poly, int m) {
    double deg = std::pow(poly.degree(), m);
    if (deg > 64.5)
        throw ConfigError("iterate coefficients need degree^power <= 64");
    std::vector<Complex> cur{Complex{0.0, 0.0}, Complex{1.0, 0.0}};
    const std::vector<Complex>& c = poly.coefficients();
    auto mul = [](const std::vector<Complex>& a, const std::vector<Complex>& b) {
        std::vector<Complex> r(a.size() + b.size() - 1, Complex{0.0, 0.0});
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
        return r;
    };
    for (int step = 0; step < m; ++step) {
        std::vector<Complex> acc{c.back()};
        for (int k = static_cast<int>(c.size()) - 2; k >= 0; --k) {
            acc = mul(acc, cur);
            acc[0] += c[k];
        }
        cur = std::move(acc);
    }
    return cur;
}

BranchSolve solve_iterate_preimage(const Polynomial& poly, int m,
                                   Complex target, Complex seed) {
    Complex z = seed;
    const double big = 4.0 * poly.escape_radius() + 4.0;
    for (int it = 0; it < 80; ++it) {
        auto [v, dv] = iterate_with_derivative(poly, z, m);
        Complex err = v - target;
        if (std::abs(err) < 1e-13 * (1.0 + std::abs(target))) return {z, true};
        if (std::abs(dv) < 1e-300 || std::abs(z) > big) return {seed, false};
        z -= err / dv;
    }
    auto [v, dv] = iterate_with_derivative(poly, z, m);
    (void)dv;
    if (std::abs(v - target) < 1e-11 * (1.0 + std::abs(target)))
        return {z, true};
    return {seed, false};
}

FaceSet trace_faces(const Layer& layer, int skip_class) {
    const int m = static_cast<int>(layer.angles.size());
    if (m < 2) throw BuildError("face walk needs at least two ray angles");

    // Half edge ids per angle position: 0 ray outward (landing to corner),
    // 1 ray inward, 2 arc counterclockwise to pos+1, 3 that arc reversed.
    auto ray_out = [](int p) { return 4 * p; };
    auto ray_in = [](int p) { return 4 * p + 1; };
    auto arc_fwd = [](int p) { return 4 * p + 2; };
    auto arc_rev = [](int p) { return 4 * p + 3; };

    std::vector<char> active(4 * m, 1);
    int skipped_rays = 0;
    for (int p = 0; p < m; ++p) {
        if (layer.angle_class[p] == skip_class) {
            active[ray_out(p)] = active[ray_in(p)] = 0;
            ++skipped_rays;
        }
    }

    std::vector<std::vector<int>> class_positions(layer.classes.size());
    for (int p = 0; p < m; ++p)
        class_positions[layer.angle_class[p]].push_back(p);

    // next(h): the rotation predecessor of twin(h) among the half edges
    // departing from the head vertex of h, in counterclockwise order. This
    // walks every bounded face counterclockwise with its interior on the
    // left; the unbounded face comes out as the all-arcs-reversed cycle.
    std::vector<int> next(4 * m, -1);
    auto corner_rotation = [&](int p) {
        std::vector<int> rot;
        rot.push_back(arc_fwd(p));
        if (active[ray_in(p)]) rot.push_back(ray_in(p));
        rot.push_back(arc_rev((p + m - 1) % m));
        return rot;
    };
    auto pred_in = [](const std::vector<int>& rot, int h) {
        for (size_t i = 0; i < rot.size(); ++i)
            if (rot[i] == h) return rot[(i + rot.size() - 1) % rot.size()];
        throw BuildError("face walk rotation is inconsistent");
    };
    for (int p = 0; p < m; ++p) {
        std::vector<int> rot_here = corner_rotation(p);
        std::vector<int> rot_ahead = corner_rotation((p + 1) % m);
        if (active[ray_out(p)]) next[ray_out(p)] = pred_in(rot_here, ray_in(p));
        next[arc_fwd(p)] = pred_in(rot_ahead, arc_rev(p));
        next[arc_rev(p)] = pred_in(rot_here, arc_fwd(p));
        if (active[ray_in(p)]) {
            const std::vector<int>& ring = class_positions[layer.angle_class[p]];
            size_t idx = std::find(ring.begin(), ring.end(), p) - ring.begin();
            int prev_pos = ring[(idx + ring.size() - 1) % ring.size()];
            next[ray_in(p)] = ray_out(prev_pos);
        }
    }

    FaceSet out;
    out.half_edge_face.assign(4 * m, -1);
    std::vector<char> seen(4 * m, 0);
    for (int h0 = 0; h0 < 4 * m; ++h0) {
        if (!active[h0] || seen[h0]) continue;
        Face face;
        int h = h0;
        do {
            seen[h] = 1;
            out.half_edge_face[h] = static_cast<int>(out.faces.size());
            HalfEdge e;
            e.is_ray = (h % 4) < 2;
            e.pos = h / 4;
            e.forward = (h % 4) == 0 || (h % 4) == 2;
            face.edges.push_back(e);
            h = next[h];
            if (h < 0) throw BuildError("face walk left the graph");
        } while (h != h0);
        bool all_arc_rev = true;
        for (const HalfEdge& e : face.edges)
            if (e.is_ray || e.forward) all_arc_rev = false;
        face.outer = all_arc_rev;
        out.faces.push_back(std::move(face));
    }

    // Euler count: V = corners + surviving class centers, E = arcs +
    // surviving rays. A non-planar class assignment raises the genus and
    // produces strictly fewer faces, so equality certifies planarity.
    int active_classes = 0;
    for (size_t ci = 0; ci < class_positions.size(); ++ci)
        if (!class_positions[ci].empty() && static_cast<int>(ci) != skip_class)
            ++active_classes;
    int expected = (m + (m - skipped_rays)) - (m + active_classes) + 2;
    if (static_cast<int>(out.faces.size()) != expected)
        throw BuildError("landing classes are not planar: face count " +
                         std::to_string(out.faces.size()) + " at depth " +
                         std::to_string(layer.depth) + ", expected " +
                         std::to_string(expected));
    int outer_count = 0;
    for (const Face& f : out.faces) outer_count += f.outer ? 1 : 0;
    if (outer_count != 1)
        throw BuildError("face walk found " + std::to_string(outer_count) +
                         " outer faces at depth " +
                         std::to_string(layer.depth));

    out.face_piece.assign(out.faces.size(), -1);
    int piece = 0;
    for (size_t i = 0; i < out.faces.size(); ++i)
        if (!out.faces[i].outer) out.face_piece[i] = piece++;
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// PuzzleCache

PuzzleCache::PuzzleCache(Polynomial poly, double base_level, int depth_cap,
                         std::vector<FixedPointEntry> base)
    : poly_(std::move(poly)),
      field_(PotentialField::make(poly_)),
      level_(base_level),
      depth_cap_(depth_cap),
      base_(std::move(base)) {
    field_.poly = &poly_;
}

void PuzzleCache::build_layer0() const {
    detail::Layer layer;
    layer.depth = 0;
    layer.level = level_;
    for (const FixedPointEntry& e : base_) {
        detail::LandingClass c;
        c.point = e.point;
        c.angles = e.angles;
        std::sort(c.angles.begin(), c.angles.end());
        if (c.angles.size() < 2)
            throw BuildError("landing class at " + fmt(c.point) +
                             " has fewer than two rays");
        c.parent = -1;
        layer.classes.push_back(std::move(c));
    }
    std::sort(layer.classes.begin(), layer.classes.end(),
              [](const detail::LandingClass& a, const detail::LandingClass& b) {
                  return a.angles.front() < b.angles.front();
              });
    index_layer(layer);
    for (size_t i = 0; i < layer.classes.size(); ++i)
        for (const Angle& a : layer.classes[i].angles)
            landings_[a] = layer.classes[i].point;
    layers_.push_back(std::move(layer));
}

const ExternalRay& PuzzleCache::trace_raw(const Angle& angle) const {
    auto it = traces_.find(angle);
    if (it != traces_.end()) return it->second;
    ExternalRay ray = trace_external_ray(field_, angle, kTraceFloor);
    return traces_.emplace(angle, std::move(ray)).first->second;
}

void PuzzleCache::prefetch_traces(const std::vector<Angle>& angles) const {
    std::vector<const Angle*> missing;
    for (const Angle& a : angles)
        if (traces_.find(a) == traces_.end()) missing.push_back(&a);
    if (missing.empty()) return;
    std::vector<ExternalRay> result(missing.size());
    const int count = static_cast<int>(missing.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i)
        result[i] = trace_external_ray(field_, *missing[i], kTraceFloor);
    for (int i = 0; i < count; ++i)
        traces_.emplace(*missing[i], std::move(result[i]));
}

void PuzzleCache::prefetch_corners(const std::vector<Angle>& angles,
                                   int depth) const {
    const double level = level_ / std::pow(poly_.degree(), depth);
    std::vector<const Angle*> missing;
    for (const Angle& a : angles) {
        auto it = corners_.find(a);
        if (it == corners_.end() || it->second.find(depth) == it->second.end())
            missing.push_back(&a);
    }
    if (missing.empty()) return;
    std::vector<Complex> result(missing.size());
    const int count = static_cast<int>(missing.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
        ExternalRay ray = trace_external_ray(field_, *missing[i], level);
        result[i] = ray.points.empty() ? Complex{0.0, 0.0} : ray.points.back();
    }
    for (int i = 0; i < count; ++i) corners_[*missing[i]][depth] = result[i];
}

void PuzzleCache::build_next_layer() const {
    const detail::Layer& prev = layers_.back();
    const int d = poly_.degree();
    const int depth = prev.depth + 1;

    detail::Layer next;
    next.depth = depth;
    next.level = prev.level / d;

    // Trace every candidate angle of the new layer up front, in parallel.
    std::vector<Angle> all_new;
    for (const Angle& a : prev.angles)
        for (const Angle& p : a.preimages(d)) all_new.push_back(p);
    prefetch_traces(all_new);

    int persisted = 0;
    for (size_t ci = 0; ci < prev.classes.size(); ++ci) {
        const detail::LandingClass& parent = prev.classes[ci];
        std::vector<Complex> coeffs = poly_.coefficients();
        coeffs[0] -= parent.point;
        std::vector<Complex> roots = polynomial_roots(coeffs);
        std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
            return std::make_pair(a.real(), a.imag()) <
                   std::make_pair(b.real(), b.imag());
        });
        double sep = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < roots.size(); ++i)
            for (size_t j = i + 1; j < roots.size(); ++j)
                sep = std::min(sep, std::abs(roots[i] - roots[j]));
        if (roots.size() > 1 && sep < 1e-9)
            throw BuildError("critical ray landing: preimages of " +
                             fmt(parent.point) + " collide at depth " +
                             std::to_string(depth));

        // Angles feeding this class, minus those owned by persisting points.
        std::set<Angle> pool;
        for (const Angle& a : parent.angles)
            for (const Angle& p : a.preimages(d)) pool.insert(p);

        std::vector<detail::LandingClass> made;
        std::vector<int> fresh;
        for (size_t r = 0; r < roots.size(); ++r) {
            int match = -1;
            for (size_t k = 0; k < prev.classes.size(); ++k)
                if (std::abs(prev.classes[k].point - roots[r]) <= kPersistTol) {
                    match = static_cast<int>(k);
                    break;
                }
            if (match >= 0) {
                const detail::LandingClass& old = prev.classes[match];
                std::set<Angle> images;
                for (const Angle& a : old.angles)
                    images.insert(a.map_forward(d));
                if (images !=
                    std::set<Angle>(parent.angles.begin(), parent.angles.end()))
                    throw BuildError("forward closure violated at " +
                                     fmt(old.point));
                for (const Angle& a : old.angles) pool.erase(a);
                detail::LandingClass c;
                c.point = old.point;
                c.angles = old.angles;
                c.parent = static_cast<int>(ci);
                made.push_back(std::move(c));
                ++persisted;
            } else {
                detail::LandingClass c;
                c.point = roots[r];
                c.parent = static_cast<int>(ci);
                fresh.push_back(static_cast<int>(made.size()));
                made.push_back(std::move(c));
            }
        }

        // Assign each remaining angle to the fresh root its ray converges
        // to, reading deeper points off the cached trace until the margin
        // is decisive: nearest root within sep/3 and twice closer than the
        // runner-up.
        const double ladder[4] = {1e-4, 1e-6, 1e-8, kTraceFloor};
        for (const Angle& theta : pool) {
            if (fresh.empty())
                throw BuildError("ray assignment has no root left for angle " +
                                 theta.str());
            const ExternalRay& ray = trace_raw(theta);
            int best = -1;
            for (double t : ladder) {
                const Complex* pt = ray_point_at(ray, t);
                if (!pt) break;
                double d1 = std::numeric_limits<double>::infinity();
                double d2 = d1;
                int arg = -1;
                for (int fi : fresh) {
                    double dist = std::abs(made[fi].point - *pt);
                    if (dist < d1) {
                        d2 = d1;
                        d1 = dist;
                        arg = fi;
                    } else {
                        d2 = std::min(d2, dist);
                    }
                }
                if (d1 <= sep / 3.0 && (fresh.size() == 1 || d2 >= 2.0 * d1)) {
                    best = arg;
                    break;
                }
            }
            if (best < 0)
                throw BuildError("ray assignment ambiguous for angle " +
                                 theta.str() + " at depth " +
                                 std::to_string(depth));
            made[best].angles.push_back(theta);
        }
        for (int fi : fresh) {
            std::sort(made[fi].angles.begin(), made[fi].angles.end());
            if (made[fi].angles.size() != parent.angles.size())
                throw BuildError("landing class count mismatch at depth " +
                                 std::to_string(depth) + ": point " +
                                 fmt(made[fi].point) + " received " +
                                 std::to_string(made[fi].angles.size()) +
                                 " rays, expected " +
                                 std::to_string(parent.angles.size()));
        }
        for (detail::LandingClass& c : made)
            next.classes.push_back(std::move(c));
    }

    if (persisted != static_cast<int>(prev.classes.size()))
        throw BuildError("forward closure violated at depth " +
                         std::to_string(depth));

    std::sort(next.classes.begin(), next.classes.end(),
              [](const detail::LandingClass& a, const detail::LandingClass& b) {
                  return a.angles.front() < b.angles.front();
              });
    index_layer(next);
    if (next.angles.size() != prev.angles.size() * static_cast<size_t>(d))
        throw BuildError("layer angle count mismatch at depth " +
                         std::to_string(depth));
    for (size_t i = 0; i < next.classes.size(); ++i)
        for (const Angle& a : next.classes[i].angles)
            if (landings_.find(a) == landings_.end())
                landings_[a] = next.classes[i].point;
    layers_.push_back(std::move(next));
}

const detail::Layer& PuzzleCache::layer(int depth) const {
    if (depth < 0) throw ConfigError("piece depth must be nonnegative");
    if (depth > depth_cap_)
        throw ConfigError("piece depth " + std::to_string(depth) +
                          " exceeds the cap " + std::to_string(depth_cap_));
    if (layers_.empty()) build_layer0();
    while (static_cast<int>(layers_.size()) <= depth) build_next_layer();
    return layers_[depth];
}

const detail::FaceSet& PuzzleCache::faces(int depth) const {
    layer(depth);
    if (static_cast<int>(faces_.size()) <= depth) faces_.resize(depth + 1);
    if (faces_[depth].faces.empty())
        faces_[depth] = detail::trace_faces(layers_[depth]);
    return faces_[depth];
}

// ---------------------------------------------------------------------------
// Deep rays and tails

PuzzleCache::TailState& PuzzleCache::tail(const Angle& angle) const {
    auto it = tails_.find(angle);
    if (it != tails_.end()) return it->second;
    TailState ts;
    auto lit = landings_.find(angle);
    if (lit == landings_.end())
        throw BuildError("no landing recorded for angle " + angle.str());
    ts.landing = lit->second;
    const ExternalRay& ray = trace_raw(angle);
    if (ray.stalled || ray.points.empty()) {
        ts.usable = false;
    } else {
        ts.start = ray.points.back();
        ts.start_potential = ray.potentials.back();
        AngleOrbit orbit = angle_orbit(angle, poly_.degree());
        ts.period = orbit.preperiod == 0 ? orbit.period : 0;
    }
    return tails_.emplace(angle, std::move(ts)).first->second;
}

void PuzzleCache::extend_periodic_tail(TailState& ts) const {
    auto [gx, lam] = detail::iterate_with_derivative(poly_, ts.landing,
                                                     ts.period);
    (void)gx;
    if (std::abs(lam) < 1.0 + 1e-9) {
        ts.usable = false;
        return;
    }
    Complex prev = ts.points.empty() ? ts.start : ts.points.back();
    double prev_pot =
        ts.potentials.empty() ? ts.start_potential : ts.potentials.back();
    Complex seed = ts.landing + (prev - ts.landing) / lam;
    detail::BranchSolve s =
        detail::solve_iterate_preimage(poly_, ts.period, prev, seed);
    if (!s.ok || std::abs(s.point - ts.landing) >
                     std::abs(prev - ts.landing) * (1.0 - 1e-6)) {
        ts.usable = false;
        return;
    }
    ts.points.push_back(s.point);
    ts.potentials.push_back(prev_pot / std::pow(poly_.degree(), ts.period));
}

double PuzzleCache::tail_end_distance(const TailState& ts) const {
    Complex end = ts.points.empty() ? ts.start : ts.points.back();
    return std::abs(end - ts.landing);
}

void PuzzleCache::ensure_tail(const Angle& angle, double eps) const {
    TailState& ts = tail(angle);
    int guard = 0;
    while (ts.usable && tail_end_distance(ts) > eps && guard++ < 500) {
        if (ts.period > 0) {
            extend_periodic_tail(ts);
            continue;
        }
        // Preperiodic: lift the parent ray's sub-floor polyline one branch
        // of f at a time, anchored at this ray's landing point.
        const double fp = std::abs(poly_.derivative(ts.landing));
        if (fp < 1e-8) {
            ts.usable = false;
            break;
        }
        const int d = poly_.degree();
        Angle pa = angle.map_forward(d);
        const ExternalRay& pray = trace_raw(pa);
        // Sources: parent trace points below floor*d, then the parent tail.
        std::vector<Complex> src;
        std::vector<double> src_pot;
        for (size_t i = 0; i < pray.points.size(); ++i)
            if (pray.potentials[i] < kTraceFloor * d * 0.999) {
                src.push_back(pray.points[i]);
                src_pot.push_back(pray.potentials[i]);
            }
        {
            TailState& parent_tail = tail(pa);
            if (static_cast<size_t>(ts.consumed) >=
                src.size() + parent_tail.points.size()) {
                ensure_tail(pa, std::max(eps * fp * 0.5, 1e-13));
                if (static_cast<size_t>(ts.consumed) >=
                    src.size() + parent_tail.points.size()) {
                    ts.usable = false;  // parent cannot be deepened further
                    break;
                }
            }
        }
        const TailState& parent_tail = tails_.at(pa);
        for (size_t k = ts.consumed;
             k < src.size() + parent_tail.points.size() &&
             tail_end_distance(ts) > eps;
             ++k) {
            Complex target =
                k < src.size() ? src[k] : parent_tail.points[k - src.size()];
            double tpot = (k < src.size()
                               ? src_pot[k]
                               : parent_tail.potentials[k - src.size()]) /
                          d;
            Complex prev = ts.points.empty() ? ts.start : ts.points.back();
            Complex fprev = poly_(prev);
            Complex dprev = poly_.derivative(prev);
            if (std::abs(dprev) < 1e-12) {
                ts.usable = false;
                break;
            }
            Complex seed = prev + (target - fprev) / dprev;
            detail::BranchSolve s =
                detail::solve_iterate_preimage(poly_, 1, target, seed);
            double prev_dist = std::abs(prev - ts.landing);
            if (!s.ok || std::abs(s.point - ts.landing) >
                             std::max(prev_dist * 1.5, 1e-3)) {
                ts.usable = false;
                break;
            }
            ts.points.push_back(s.point);
            ts.potentials.push_back(tpot);
            ts.consumed = static_cast<int>(k) + 1;
        }
    }
}

const detail::DeepRay& PuzzleCache::deep_ray(const Angle& angle) const {
    auto it = deep_.find(angle);
    if (it != deep_.end()) return it->second;
    detail::DeepRay dr;
    auto lit = landings_.find(angle);
    if (lit == landings_.end())
        throw BuildError("no landing recorded for angle " + angle.str());
    dr.landing = lit->second;
    const ExternalRay& ray = trace_raw(angle);
    dr.points = ray.points;
    dr.potentials = ray.potentials;
    if (!ray.stalled) {
        ensure_tail(angle, kTailEps);
        const TailState& ts = tails_.at(angle);
        dr.points.insert(dr.points.end(), ts.points.begin(), ts.points.end());
        dr.potentials.insert(dr.potentials.end(), ts.potentials.begin(),
                             ts.potentials.end());
    }
    Complex end = dr.points.empty() ? dr.landing : dr.points.back();
    dr.complete = !ray.stalled && std::abs(end - dr.landing) < 5.0 * kTailEps;
    return deep_.emplace(angle, std::move(dr)).first->second;
}

Complex PuzzleCache::corner_point(const Angle& angle, int depth) const {
    auto it = corners_.find(angle);
    if (it != corners_.end()) {
        auto jt = it->second.find(depth);
        if (jt != it->second.end()) return jt->second;
    }
    const double level = level_ / std::pow(poly_.degree(), depth);
    ExternalRay ray = trace_external_ray(field_, angle, level);
    Complex pt = ray.points.empty() ? Complex{0.0, 0.0} : ray.points.back();
    corners_[angle][depth] = pt;
    return pt;
}

std::vector<Complex> PuzzleCache::arc_points(const Angle& a, const Angle& b,
                                             int depth) const {
    std::vector<Complex> out;
    out.push_back(corner_point(a, depth));
    for (const Angle& s : arc_samples(a, b))
        out.push_back(corner_point(s, depth));
    out.push_back(corner_point(b, depth));
    return out;
}

// ---------------------------------------------------------------------------
// Realization

PuzzleCache::FacePolygon PuzzleCache::realize_face(
    int depth, const detail::Face& face) const {
    const detail::Layer& lay = layer(depth);
    const double level = lay.level;
    const int m = static_cast<int>(lay.angles.size());
    FacePolygon out;
    for (const detail::HalfEdge& he : face.edges) {
        if (he.is_ray) {
            const Angle& a = lay.angles[he.pos];
            const detail::DeepRay& dr = deep_ray(a);
            out.complete = out.complete && dr.complete;
            out.vertices.push_back(dr.landing);
            if (he.forward) {
                out.polygon.push_back(dr.landing);
                for (int i = static_cast<int>(dr.points.size()) - 1; i >= 0;
                     --i)
                    if (dr.potentials[i] < level * (1.0 - 1e-12))
                        out.polygon.push_back(dr.points[i]);
            } else {
                out.polygon.push_back(corner_point(a, depth));
                for (size_t i = 0; i < dr.points.size(); ++i)
                    if (dr.potentials[i] < level * (1.0 - 1e-12))
                        out.polygon.push_back(dr.points[i]);
            }
        } else {
            const Angle& a = lay.angles[he.pos];
            const Angle& b = lay.angles[(he.pos + 1) % m];
            std::vector<Angle> samples = arc_samples(a, b);
            if (he.forward) {
                out.polygon.push_back(corner_point(a, depth));
                for (const Angle& s : samples)
                    out.polygon.push_back(corner_point(s, depth));
            } else {
                out.polygon.push_back(corner_point(b, depth));
                for (auto rit = samples.rbegin(); rit != samples.rend(); ++rit)
                    out.polygon.push_back(corner_point(*rit, depth));
            }
        }
    }
    // Drop consecutive duplicates, including across the closing edge.
    std::vector<Complex> clean;
    for (const Complex& p : out.polygon)
        if (clean.empty() || std::abs(p - clean.back()) > 1e-14)
            clean.push_back(p);
    while (clean.size() > 1 && std::abs(clean.front() - clean.back()) <= 1e-14)
        clean.pop_back();
    out.polygon = std::move(clean);
    std::sort(out.vertices.begin(), out.vertices.end(), [](Complex x, Complex y) {
        return std::make_pair(x.real(), x.imag()) <
               std::make_pair(y.real(), y.imag());
    });
    out.vertices.erase(
        std::unique(out.vertices.begin(), out.vertices.end(),
                    [](Complex x, Complex y) { return std::abs(x - y) < 1e-12; }),
        out.vertices.end());
    return out;
}

const std::vector<PuzzlePiece>& PuzzleCache::pieces(
    int depth, const std::shared_ptr<const PuzzleCache>& self) const {
    auto it = pieces_.find(depth);
    if (it != pieces_.end()) return it->second;
    const detail::Layer& lay = layer(depth);
    const detail::FaceSet& fs = faces(depth);

    // Fetch every ray trace and corner point the realization will touch.
    prefetch_traces(lay.angles);
    std::vector<Angle> corner_angles = lay.angles;
    const int m = static_cast<int>(lay.angles.size());
    for (int p = 0; p < m; ++p) {
        std::vector<Angle> samples =
            arc_samples(lay.angles[p], lay.angles[(p + 1) % m]);
        corner_angles.insert(corner_angles.end(), samples.begin(),
                             samples.end());
    }
    prefetch_corners(corner_angles, depth);

    std::vector<PuzzlePiece> result;
    for (size_t fi = 0; fi < fs.faces.size(); ++fi) {
        if (fs.faces[fi].outer) continue;
        PuzzlePiece piece;
        piece.depth = depth;
        piece.index = fs.face_piece[fi];
        piece.level = lay.level;
        for (const detail::HalfEdge& he : fs.faces[fi].edges) {
            PieceEdge e;
            if (he.is_ray) {
                e.kind = PieceEdge::Kind::Ray;
                e.angle = lay.angles[he.pos];
                e.angle_to = e.angle;
            } else {
                e.kind = PieceEdge::Kind::Arc;
                e.angle = lay.angles[he.pos];
                e.angle_to = lay.angles[(he.pos + 1) % m];
            }
            piece.boundary.push_back(std::move(e));
        }
        FacePolygon fp = realize_face(depth, fs.faces[fi]);
        piece.polygon = std::move(fp.polygon);
        piece.vertex_points = std::move(fp.vertices);
        piece.realization_complete = fp.complete;
        piece.cache = self;
        result.push_back(std::move(piece));
    }
    return pieces_.emplace(depth, std::move(result)).first->second;
}

// ---------------------------------------------------------------------------
// Public operations

std::vector<PuzzlePiece> pieces_at_depth(const PuzzleGraph& graph, int n) {
    if (!graph.cache) throw ConfigError("puzzle graph has no cache");
    if (n < 0 || n > graph.depth_cap)
        throw ConfigError("piece depth " + std::to_string(n) +
                          " is outside [0, " + std::to_string(graph.depth_cap) +
                          "]");
    return graph.cache->pieces(n, graph.cache);
}

PieceLocation locate_piece(const std::vector<PuzzlePiece>& pieces, Complex z) {
    if (pieces.empty()) throw ConfigError("locate_piece needs pieces");
    if (!pieces.front().cache) throw ConfigError("pieces have no cache");
    const PuzzleCache& cache = *pieces.front().cache;
    const double level = pieces.front().level;
    const double g = green_potential(cache.field(), z);
    if (g > level * (1.0 + 1e-9) + 1e-15)
        throw Error("outside puzzle: potential " + fmt(g) +
                    " exceeds the piece level " + fmt(level));
    int boundary_best = -1;
    double boundary_dist = std::numeric_limits<double>::infinity();
    for (const PuzzlePiece& p : pieces) {
        switch (locate_in_polygon(p.polygon, z, 1e-3)) {
            case PointLocation::Inside:
                return {p.index, false};
            case PointLocation::Boundary: {
                double dist = polygon_boundary_distance(p.polygon, z);
                if (dist < boundary_dist) {
                    boundary_dist = dist;
                    boundary_best = p.index;
                }
                break;
            }
            case PointLocation::Outside:
                break;
        }
    }
    if (boundary_best >= 0) return {boundary_best, true};
    // Between realized polygons: attribute to the nearest boundary.
    for (const PuzzlePiece& p : pieces) {
        double dist = polygon_boundary_distance(p.polygon, z);
        if (dist < boundary_dist) {
            boundary_dist = dist;
            boundary_best = p.index;
        }
    }
    if (boundary_best >= 0 && boundary_dist <= 0.05)
        return {boundary_best, true};
    return {-1, true};
}

PieceImage piece_image(const PuzzlePiece& piece) {
    if (!piece.cache) throw ConfigError("piece has no cache");
    if (piece.depth < 1)
        throw ConfigError("piece image needs depth at least 1");
    const int d = piece.cache->poly().degree();
    using Key = std::tuple<int, std::string, std::string>;
    auto key_of = [](const PieceEdge& e) {
        return Key{e.kind == PieceEdge::Kind::Ray ? 0 : 1, e.angle.str(),
                   e.angle_to.str()};
    };
    std::map<Key, int> counts;
    for (const PieceEdge& e : piece.boundary) {
        PieceEdge img;
        img.kind = e.kind;
        img.angle = e.angle.map_forward(d);
        img.angle_to = e.angle_to.map_forward(d);
        ++counts[key_of(img)];
    }
    int degree = counts.begin()->second;
    for (const auto& [key, count] : counts)
        if (count != degree)
            throw BuildError(
                "piece image consistency violated: boundary covers edge " +
                std::get<1>(key) + " with multiplicity " +
                std::to_string(count) + " but others with " +
                std::to_string(degree));
    const auto& parents = piece.cache->pieces(piece.depth - 1, piece.cache);
    std::set<Key> image_set;
    for (const auto& [key, count] : counts) image_set.insert(key);
    for (const PuzzlePiece& parent : parents) {
        std::set<Key> parent_set;
        for (const PieceEdge& e : parent.boundary) parent_set.insert(key_of(e));
        if (parent_set == image_set) return {parent.index, degree};
    }
    throw BuildError("piece image consistency violated: the image of piece " +
                     std::to_string(piece.index) + " at depth " +
                     std::to_string(piece.depth) +
                     " is not a piece one level up");
}

}  // namespace polypuzzle
